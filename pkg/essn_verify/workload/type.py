# Python Version: 3.x
from typing import *

from essn_verify.certifiers.models import Protocol
from essn_verify.errors import InfeasibleParams
from essn_verify.history.type import KtoFlavor, RfPolicy

__all__ = [
    'GRID_PROBS',
    'GRID_POLICIES',
    'ROLES',
    'WorkloadParams',
    'CellKey',
    'Cell',
    'ExperimentRow',
    'CellResult',
    'ExperimentReport',
]

GRID_PROBS = (0.0, 0.2, 0.5, 0.8, 1.0)
GRID_POLICIES = (RfPolicy.AS_OF_READ_COMMIT, RfPolicy.SNAPSHOT_AT_BEGIN)
ROLES = ('t1_long_ro', 't2_long_rw', 'shorts')


class WorkloadParams(NamedTuple):
    n_keys: int = 200
    read_size: int = 40
    n_shorts: int = 60
    short_writes: int = 2
    repeats: int = 50
    pivot_prob: float = 0.5
    short_hit_prob: float = 0.5
    seed: int = 0
    rf_policy: RfPolicy = RfPolicy.SNAPSHOT_AT_BEGIN
    kto_flavor: KtoFlavor = KtoFlavor.COMMIT

    def validate(self) -> None:
        """
        :raises InfeasibleParams:
        """

        if self.n_keys < 2:
            raise InfeasibleParams('n_keys must be at least 2, got {}'.format(self.n_keys))
        if not 0 <= self.read_size <= self.n_keys - 1:
            raise InfeasibleParams('read_size must be within [0, n_keys - 1] = [0, {}], got {}'.format(self.n_keys - 1, self.read_size))
        if self.n_shorts < 2:
            raise InfeasibleParams('n_shorts must be at least 2 so that each long can contain a short, got {}'.format(self.n_shorts))
        if not 1 <= self.short_writes <= self.n_keys - 1:
            raise InfeasibleParams('short_writes must be within [1, n_keys - 1], got {}'.format(self.short_writes))
        if self.repeats < 1:
            raise InfeasibleParams('repeats must be positive, got {}'.format(self.repeats))
        for name in ('pivot_prob', 'short_hit_prob'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InfeasibleParams('{} must be a probability, got {}'.format(name, value))


CellKey = Tuple[RfPolicy, float, float]


class Cell(NamedTuple):
    index: int  # also seeds the cell's random streams
    rf_policy: RfPolicy
    pivot_prob: float
    short_hit_prob: float

    def key(self) -> CellKey:
        return (self.rf_policy, self.pivot_prob, self.short_hit_prob)


class ExperimentRow(NamedTuple):
    rf_policy: RfPolicy
    pivot_prob: float
    short_hit_prob: float
    protocol: Protocol
    role: str
    trials: int
    aborts: int

    @property
    def abort_rate(self) -> float:
        return self.aborts / self.trials if self.trials else 0.0


class CellResult(NamedTuple):
    cell: Cell
    rows: List[ExperimentRow]
    r3: int  # runs where ESSN admits t2, SSN rejects it, and ξ(t2) = π(t1)


class ExperimentReport(NamedTuple):
    rows: List[ExperimentRow]
    r3: Dict[CellKey, int]

    def rate(self, key: CellKey, protocol: Protocol, role: str = 't2_long_rw') -> float:
        for row in self.rows:
            if (row.rf_policy, row.pivot_prob, row.short_hit_prob) == key and row.protocol == protocol and row.role == role:
                return row.abort_rate
        raise KeyError((key, protocol, role))

    def cells(self) -> List[CellKey]:
        def order(key: CellKey) -> Tuple[int, float, float]:
            policy = GRID_POLICIES.index(key[0]) if key[0] in GRID_POLICIES else len(GRID_POLICIES)
            return (policy, key[1], key[2])

        return sorted({(row.rf_policy, row.pivot_prob, row.short_hit_prob) for row in self.rows}, key=order)
