# Python Version: 3.x
import enum
from typing import *

from essn_verify.stamp import Stamp

__all__ = [
    'TxnId',
    'INITIAL_TXN',
    'EventKind',
    'Event',
    'InputTrace',
    'MVSchedule',
    'RfPolicy',
    'KtoFlavor',
    'Kto',
    'TxnStatus',
]

TxnId = int

INITIAL_TXN: TxnId = 0


class EventKind(enum.Enum):
    BEGIN = 'b'
    READ = 'r'
    WRITE = 'w'
    COMMIT = 'c'
    ABORT = 'a'


class Event(NamedTuple):
    """A tuple represents one operation of a trace or a schedule.
    """
    kind: EventKind
    txn: TxnId
    key: Optional[str] = None  # only for reads and writes
    version: Optional[TxnId] = None  # the writer of the version; None for an unresolved read


class InputTrace(NamedTuple):
    events: Tuple[Event, ...]


class MVSchedule(NamedTuple):
    events: Tuple[Event, ...]
    keys: FrozenSet[str]


class RfPolicy(enum.Enum):
    AS_OF_READ_COMMIT = 'as_of_read_commit'
    NEAREST_BEGIN_KTO = 'nearest_begin_kto'
    SNAPSHOT_AT_BEGIN = 'snapshot_at_begin'


class KtoFlavor(enum.Enum):
    BEGIN = 'begin'
    COMMIT = 'commit'
    EXTERNAL = 'external'


class Kto(NamedTuple):
    sigma: Dict[TxnId, Stamp]
    flavor: KtoFlavor

    def order(self) -> List[TxnId]:
        return sorted(self.sigma, key=lambda txn: self.sigma[txn])


class TxnStatus(enum.Enum):
    IN_FLIGHT = 'in_flight'
    COMMITTED = 'committed'
    ABORTED = 'aborted'
