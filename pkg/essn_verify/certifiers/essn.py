# Python Version: 3.x
from typing import *

from essn_verify.certifiers.models import Protocol
from essn_verify.certifiers.stamps import ExclusionCertifier, TxnStamps
from essn_verify.mvsg import Edge
from essn_verify.stamp import Stamp


class EssnCertifier(ExclusionCertifier):
    """EssnCertifier aborts iff π(t) <= ξ(t), where ξ takes the π (not σ) of forward predecessors.
    """

    protocol = Protocol.ESSN

    def bound(self, stamps: TxnStamps) -> Tuple[Stamp, Optional[Edge]]:
        return stamps.xi, stamps.xi_edge
