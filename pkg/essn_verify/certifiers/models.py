# Python Version: 3.x
import abc
import enum
from typing import *

from essn_verify.history.type import TxnId
from essn_verify.mvsg import Edge, Mvsg
from essn_verify.stamp import Stamp


class Protocol(enum.Enum):
    SSI = 'ssi'
    SSN = 'ssn'
    ESSN = 'essn'


class Verdict(enum.Enum):
    COMMIT = 'C'
    ABORT = 'A'


# (back edge, forward edge) for SSN/ESSN; (incoming rw, outgoing rw) of the pivot for SSI
Witness = Tuple[Edge, Edge]


class TxnVerdict(NamedTuple):
    txn: TxnId
    sigma: Stamp
    pi: Stamp
    eta: Stamp
    xi: Stamp
    verdict: Verdict
    witness: Optional[Witness] = None


class CertResult(NamedTuple):
    protocol: Protocol
    verdicts: Dict[TxnId, TxnVerdict]

    def aborted(self) -> FrozenSet[TxnId]:
        return frozenset(txn for txn, v in self.verdicts.items() if v.verdict == Verdict.ABORT)

    def committed(self) -> FrozenSet[TxnId]:
        return frozenset(txn for txn, v in self.verdicts.items() if v.verdict == Verdict.COMMIT)

    def verdict(self, txn: TxnId) -> Verdict:
        return self.verdicts[txn].verdict


class Certifier:
    @abc.abstractmethod
    def certify(self, g: Mvsg, *, excise: bool = True) -> CertResult:
        """
        :param excise: evaluate in KTO order and ignore the edges of transactions aborted earlier in that order. Otherwise every transaction is judged on the whole graph.
        :throws ProtocolPrecondition:
        """

        raise NotImplementedError
