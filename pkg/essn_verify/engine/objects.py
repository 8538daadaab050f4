# Python Version: 3.x
"""This module has the in-memory objects of the online engine: configuration, transactions, versions and commit outcomes.
"""

from typing import *

from essn_verify.certifiers.models import Protocol
from essn_verify.history.type import KtoFlavor, RfPolicy, TxnId, TxnStatus
from essn_verify.stamp import NEG_INF, POS_INF, Stamp

__all__ = [
    'EngineConfig',
    'VersionObject',
    'TxnObject',
    'Committed',
    'Aborted',
    'Stalled',
    'Outcome',
    'StallQueue',
]


class EngineConfig(NamedTuple):
    kto_flavor: KtoFlavor = KtoFlavor.COMMIT
    rf_policy: RfPolicy = RfPolicy.AS_OF_READ_COMMIT
    protocol: Protocol = Protocol.ESSN  # ESSN, or SSN for comparison runs
    shortcut: bool = False
    stall_bypass: bool = True
    priority_restart: bool = False


class VersionObject:
    """VersionObject is one installed (or staged) version of a key.

    sstamp is π of the committed writer that overwrote this version; psstamp is the prefix max of the π of readers of this or any older version; crepi is π of the creator. cstamp and pstamp are their σ counterparts, consulted by the SSN rule.
    """
    def __init__(self, *, key: str, writer: TxnId, prev: Optional['VersionObject'] = None, crepi: Stamp = NEG_INF, cstamp: Stamp = NEG_INF) -> None:
        self.key = key
        self.writer = writer
        self.prev = prev
        self.sstamp = POS_INF
        self.psstamp = NEG_INF
        self.crepi = crepi
        self.cstamp = cstamp
        self.pstamp = NEG_INF
        self.commit_tick = -1  # the base version predates every transaction

    def __repr__(self) -> str:
        return 'VersionObject({}{}, sstamp={}, psstamp={}, crepi={})'.format(self.key, self.writer, self.sstamp, self.psstamp, self.crepi)


class TxnObject:
    def __init__(self, *, txn: TxnId, begin_tick: int, long: bool = False) -> None:
        self.txn = txn
        self.sigma: Optional[Stamp] = None  # drawn at begin or at commit entry, per the KTO flavor
        self.status = TxnStatus.IN_FLIGHT
        self.sstamp = POS_INF  # π accumulator; π after finalization
        self.psstamp = NEG_INF  # ξ accumulator
        self.pstamp = NEG_INF  # η accumulator
        self.reads: List[VersionObject] = []
        self.writes: Dict[str, VersionObject] = {}
        self.begin_tick = begin_tick
        self.long = long
        self.reason: Optional[str] = None
        self.bypassed = False  # committed ahead of σ-smaller transactions; reader registration is pending

    def is_read_only(self) -> bool:
        return not self.writes

    def __repr__(self) -> str:
        return 'TxnObject(t{}, sigma={}, status={})'.format(self.txn, self.sigma, self.status.value)


class Committed(NamedTuple):
    txn: TxnId
    pi: Stamp
    bound: Stamp  # ξ for ESSN, η for SSN
    bypassed: bool = False


class Aborted(NamedTuple):
    txn: TxnId
    pi: Stamp
    bound: Stamp
    reason: str = 'exclusion'


class Stalled(NamedTuple):
    txn: TxnId
    blockers: Tuple[TxnId, ...]  # in-flight σ-smaller transactions


Outcome = Union[Committed, Aborted, Stalled]


class StallQueue:
    """StallQueue keeps the stalled commits ordered by σ with the reason each one waits.
    """
    def __init__(self) -> None:
        self._waiting: Dict[TxnId, Tuple[Stamp, Tuple[TxnId, ...]]] = {}

    def push(self, txn: TxnObject, blockers: Sequence[TxnId]) -> None:
        assert txn.sigma is not None
        self._waiting[txn.txn] = (txn.sigma, tuple(blockers))

    def discard(self, txn: TxnId) -> None:
        self._waiting.pop(txn, None)

    def reason(self, txn: TxnId) -> Optional[Tuple[TxnId, ...]]:
        item = self._waiting.get(txn)
        return None if item is None else item[1]

    def pending(self) -> List[TxnId]:
        return sorted(self._waiting, key=lambda txn: self._waiting[txn][0])

    def __contains__(self, txn: object) -> bool:
        return txn in self._waiting

    def __len__(self) -> int:
        return len(self._waiting)
