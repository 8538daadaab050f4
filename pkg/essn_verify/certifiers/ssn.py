# Python Version: 3.x
from typing import *

from essn_verify.certifiers.models import Protocol
from essn_verify.certifiers.stamps import ExclusionCertifier, TxnStamps
from essn_verify.mvsg import Edge
from essn_verify.stamp import Stamp


class SsnCertifier(ExclusionCertifier):
    """SsnCertifier is the Serial Safety Net test: abort iff π(t) <= η(t).

    η uses σ of the forward predecessors, so the test is also defined for a begin-ordered KTO.
    """

    protocol = Protocol.SSN

    def bound(self, stamps: TxnStamps) -> Tuple[Stamp, Optional[Edge]]:
        return stamps.eta, stamps.eta_edge
