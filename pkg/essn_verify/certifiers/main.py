# Python Version: 3.x
from typing import *

import essn_verify.certifiers.list
from essn_verify.certifiers.models import CertResult, Protocol
from essn_verify.history.type import TxnId
from essn_verify.mvsg import Mvsg


def certify(g: Mvsg, protocol: Union[Protocol, str], *, excise: bool = True) -> CertResult:
    """certify judges every transaction of g as a commit-time certifier would.

    With excise=True transactions are evaluated in σ order (commit order for SSI) and a transaction aborted earlier no longer contributes edges.

    :throws ProtocolPrecondition: for SSI on a history which is not snapshot isolation
    """

    return essn_verify.certifiers.list.get(protocol).certify(g, excise=excise)


def abort_targets(g: Mvsg, protocol: Union[Protocol, str]) -> FrozenSet[TxnId]:
    """abort_targets returns the transactions the protocol's test rejects on the whole graph, without excising earlier victims.
    """

    return certify(g, protocol, excise=False).aborted()
