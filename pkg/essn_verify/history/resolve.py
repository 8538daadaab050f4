# Python Version: 3.x
"""This module binds the reads of a trace to versions, i.e. it applies a version function.
"""

from logging import getLogger
from typing import *

from essn_verify.history.index import TxnInfo, index_transactions, keys_of
from essn_verify.history.type import *

logger = getLogger(__name__)


def _latest_committed_before(infos: Dict[TxnId, TxnInfo], key: str, position: int, reader: TxnId) -> TxnId:
    best: Optional[TxnInfo] = None
    for info in infos.values():
        if info.txn == reader or info.status != TxnStatus.COMMITTED or key not in info.write_keys():
            continue
        assert info.terminal is not None
        if info.terminal < position and (best is None or info.terminal > cast(int, best.terminal)):
            best = info
    return INITIAL_TXN if best is None else best.txn


def _nearest_begin_predecessor(infos: Dict[TxnId, TxnInfo], key: str, position: int, reader: TxnId) -> TxnId:
    begin = infos[reader].begin
    best: Optional[TxnInfo] = None
    for info in infos.values():
        if info.txn == reader or info.status != TxnStatus.COMMITTED or info.begin >= begin:
            continue
        if not any(k == key and p < position for p, k in info.writes):
            continue
        if best is None or info.begin > best.begin:
            best = info
    return INITIAL_TXN if best is None else best.txn


def resolve_version(infos: Dict[TxnId, TxnInfo], policy: RfPolicy, reader: TxnId, key: str, position: int) -> TxnId:
    if policy == RfPolicy.AS_OF_READ_COMMIT:
        return _latest_committed_before(infos, key, position, reader)
    if policy == RfPolicy.SNAPSHOT_AT_BEGIN:
        return _latest_committed_before(infos, key, infos[reader].begin, reader)
    if policy == RfPolicy.NEAREST_BEGIN_KTO:
        return _nearest_begin_predecessor(infos, key, position, reader)
    assert False


def resolve_reads(trace: InputTrace, policy: RfPolicy) -> MVSchedule:
    """resolve_reads binds every unresolved read of the trace. Reads that already name a version are kept.

    A read that follows a write of the same key by the same transaction observes that write.
    """

    infos = index_transactions(trace.events)
    events: List[Event] = []
    own: Set[Tuple[TxnId, str]] = set()
    for position, event in enumerate(trace.events):
        if event.kind == EventKind.WRITE:
            assert event.key is not None
            own.add((event.txn, event.key))
        elif event.kind == EventKind.READ and event.version is None:
            assert event.key is not None
            if (event.txn, event.key) in own:
                version = event.txn
            else:
                version = resolve_version(infos, policy, event.txn, event.key, position)
            event = event._replace(version=version)
        events.append(event)
    return MVSchedule(events=tuple(events), keys=keys_of(events))


def check_snapshot_isolation(schedule: MVSchedule) -> List[str]:
    """check_snapshot_isolation returns the reasons why the schedule is not a snapshot-isolation history.

    The empty list means it is one: every read observes the snapshot at the reader's begin, and no two concurrent transactions that both commit write the same key.
    """

    infos = index_transactions(schedule.events)
    alive = [info for info in infos.values() if info.status != TxnStatus.ABORTED]
    reasons = []
    for info in alive:
        for _, key, version in info.reads:
            expected = _latest_committed_before(infos, key, info.begin, info.txn)
            if version != expected:
                reasons.append('r{}({}{}) does not read the snapshot at its begin'.format(info.txn, key, version))

    def end(info: TxnInfo) -> float:
        return float('inf') if info.terminal is None else info.terminal

    committed = [info for info in alive if info.status == TxnStatus.COMMITTED]
    for i, a in enumerate(committed):
        for b in committed[i + 1:]:
            if a.begin < end(b) and b.begin < end(a):
                for key in sorted(a.write_keys() & b.write_keys()):
                    reasons.append('t{} and t{} are concurrent and both write {}'.format(a.txn, b.txn, key))
    return reasons
