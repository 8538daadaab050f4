# Python Version: 3.x
"""This module summarizes the events of a trace or a schedule per transaction.
"""

import functools
from typing import *

from essn_verify.errors import TraceInvariantError
from essn_verify.history.type import *


class TxnInfo(NamedTuple):
    txn: TxnId
    begin: int  # position of the explicit begin, or of the first event
    terminal: Optional[int]  # position of the commit or abort
    status: TxnStatus
    reads: Tuple[Tuple[int, str, Optional[TxnId]], ...]  # (position, key, version) excluding reads of own writes
    writes: Tuple[Tuple[int, str], ...]  # (position, key)

    def write_keys(self) -> FrozenSet[str]:
        return frozenset(key for _, key in self.writes)

    def is_read_only(self) -> bool:
        return not self.writes


def validate_events(events: Sequence[Event]) -> None:
    """
    :raises TraceInvariantError:
    """

    seen: Set[TxnId] = set()
    begun: Set[TxnId] = set()
    terminated: Set[TxnId] = set()
    written: Set[Tuple[TxnId, str]] = set()
    for event in events:
        txn = event.txn
        if txn in terminated:
            if event.kind in (EventKind.COMMIT, EventKind.ABORT):
                raise TraceInvariantError(txn, 'DuplicateTerminal')
            raise TraceInvariantError(txn, 'EventAfterTerminal')
        if event.kind == EventKind.BEGIN:
            if txn in begun:
                raise TraceInvariantError(txn, 'DuplicateBegin')
            if txn in seen:
                raise TraceInvariantError(txn, 'BeginNotFirst')
            begun.add(txn)
        elif event.kind in (EventKind.COMMIT, EventKind.ABORT):
            terminated.add(txn)
        elif event.kind == EventKind.WRITE:
            assert event.key is not None
            if event.version is not None and event.version != txn:
                raise TraceInvariantError(txn, 'WriterMismatch')
            if (txn, event.key) in written:
                raise TraceInvariantError(txn, 'DuplicateWrite')
            written.add((txn, event.key))
        elif event.kind == EventKind.READ:
            assert event.key is not None
            if event.version == txn and (txn, event.key) not in written:
                raise TraceInvariantError(txn, 'ReadOwnBeforeWrite')
        seen.add(txn)


@functools.lru_cache(maxsize=256)
def index_transactions(events: Tuple[Event, ...]) -> Dict[TxnId, TxnInfo]:
    """index_transactions returns a TxnInfo for every transaction, in the order of first appearance.
    """

    begin: Dict[TxnId, int] = {}
    terminal: Dict[TxnId, Tuple[int, TxnStatus]] = {}
    reads: Dict[TxnId, List[Tuple[int, str, Optional[TxnId]]]] = {}
    writes: Dict[TxnId, List[Tuple[int, str]]] = {}
    for position, event in enumerate(events):
        txn = event.txn
        if txn not in begin:
            begin[txn] = position
            reads[txn] = []
            writes[txn] = []
        if event.kind == EventKind.COMMIT:
            terminal[txn] = (position, TxnStatus.COMMITTED)
        elif event.kind == EventKind.ABORT:
            terminal[txn] = (position, TxnStatus.ABORTED)
        elif event.kind == EventKind.WRITE:
            assert event.key is not None
            writes[txn].append((position, event.key))
        elif event.kind == EventKind.READ:
            assert event.key is not None
            own = any(key == event.key for _, key in writes[txn])
            if not own:
                reads[txn].append((position, event.key, event.version))

    result: Dict[TxnId, TxnInfo] = {}
    for txn, position in begin.items():
        end, status = terminal.get(txn, (None, TxnStatus.IN_FLIGHT))
        result[txn] = TxnInfo(txn=txn, begin=position, terminal=end, status=status, reads=tuple(reads[txn]), writes=tuple(writes[txn]))
    return result


def keys_of(events: Iterable[Event]) -> FrozenSet[str]:
    return frozenset(event.key for event in events if event.key is not None)
