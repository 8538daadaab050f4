# Python Version: 3.x
"""This module feeds a trace to the engine one event at a time and records the schedule that actually happened.

The realized schedule has an explicit begin per incarnation, a commit event at the point a commit attempt was decided (including attempts rejected by the exclusion test), and an abort event for restarted or incomplete transactions. Running the offline certifiers on it must reproduce the engine's verdicts.
"""

import collections
from logging import getLogger
from typing import *

from essn_verify.engine.engine import Engine
from essn_verify.engine.objects import Aborted, Committed, EngineConfig, Outcome, Stalled
from essn_verify.errors import InvariantViolation, StallRequired
from essn_verify.history.index import keys_of
from essn_verify.history.type import *
from essn_verify.mvsg import build_mvsg, build_version_order, committed_subgraph, has_cycle
from essn_verify.stamp import Stamp

logger = getLogger(__name__)


class ReplayResult(NamedTuple):
    schedule: MVSchedule
    outcomes: Dict[TxnId, TxnStatus]  # per incarnation id
    sigma: Dict[TxnId, Stamp]
    finalized: Dict[TxnId, int]  # position of the terminal event in the realized schedule
    incarnations: Dict[TxnId, TxnId]  # restarted id -> the id it was re-issued under
    log: List[str]
    engine: Engine

    def committed(self) -> FrozenSet[TxnId]:
        return frozenset(txn for txn, status in self.outcomes.items() if status == TxnStatus.COMMITTED)

    def aborted(self) -> FrozenSet[TxnId]:
        return frozenset(txn for txn, status in self.outcomes.items() if status == TxnStatus.ABORTED)

    def kto(self) -> Kto:
        return Kto(sigma=dict(self.sigma), flavor=self.engine.config.kto_flavor)


def replay(trace: InputTrace, config: EngineConfig = EngineConfig(), *, longs: AbstractSet[TxnId] = frozenset()) -> ReplayResult:
    """replay runs a trace through a fresh engine.

    Events of a transaction that is waiting (a stalled commit, or a read that needs an open writer's outcome) queue up behind it and are retried whenever another event makes progress. A short transaction restarted by a long one is re-issued under a fresh id with the operations it had already executed.

    :param longs: the ids which begin as long transactions
    """

    engine = Engine(config)
    realized: List[Event] = []
    outcomes: Dict[TxnId, TxnStatus] = {}
    finalized: Dict[TxnId, int] = {}
    incarnations: Dict[TxnId, TxnId] = {}
    current: Dict[TxnId, TxnId] = {}  # trace id -> id of its live incarnation
    executed: Dict[TxnId, List[Event]] = collections.defaultdict(list)  # reads and writes of the live incarnation
    backlog: Dict[TxnId, Deque[Event]] = {}
    next_id = max((event.txn for event in trace.events), default=0) + 1

    def finish(txn: TxnId, kind: EventKind, status: TxnStatus) -> None:
        finalized[txn] = len(realized)
        realized.append(Event(kind=kind, txn=txn))
        outcomes[txn] = status

    def record(outcome: Outcome) -> None:
        if isinstance(outcome, Committed):
            finish(outcome.txn, EventKind.COMMIT, TxnStatus.COMMITTED)
        elif isinstance(outcome, Aborted):
            finish(outcome.txn, EventKind.COMMIT, TxnStatus.ABORTED)

    def reissue_restarted() -> None:
        nonlocal next_id
        for origin, txn in list(current.items()):
            t = engine.txns[txn]
            if t.reason != 'restart' or txn in outcomes:
                continue
            finish(txn, EventKind.ABORT, TxnStatus.ABORTED)
            fresh = next_id
            next_id += 1
            incarnations[txn] = fresh
            current[origin] = fresh
            logger.info('t%d is restarted as t%d', txn, fresh)
            engine.begin(fresh, long=origin in longs)
            realized.append(Event(kind=EventKind.BEGIN, txn=fresh))
            backlog[origin] = collections.deque(executed.pop(origin, []) + list(backlog.get(origin, [])))

    def execute(event: Event) -> bool:
        origin = event.txn
        txn = current.get(origin, origin)
        if txn not in engine.txns:
            current[origin] = txn
            engine.begin(txn, long=origin in longs)
            realized.append(Event(kind=EventKind.BEGIN, txn=txn))
            reissue_restarted()
            if event.kind == EventKind.BEGIN:
                return True
        if event.kind == EventKind.BEGIN:
            return True
        if event.kind == EventKind.READ:
            assert event.key is not None
            try:
                version = engine.read(txn, event.key)
            except StallRequired as e:
                logger.debug('%s', e)
                return False
            realized.append(Event(kind=EventKind.READ, txn=txn, key=event.key, version=version.writer))
            executed[origin].append(event)
        elif event.kind == EventKind.WRITE:
            assert event.key is not None
            engine.write(txn, event.key)
            realized.append(Event(kind=EventKind.WRITE, txn=txn, key=event.key, version=txn))
            executed[origin].append(event)
        elif event.kind == EventKind.COMMIT:
            outcome = engine.commit(txn)
            if isinstance(outcome, Stalled):
                return False
            record(outcome)
        elif event.kind == EventKind.ABORT:
            engine.abort(txn)
            finish(txn, EventKind.ABORT, TxnStatus.ABORTED)
        return True

    def order_key(origin: TxnId) -> Tuple[bool, Optional[Stamp], TxnId]:
        t = engine.txns.get(current.get(origin, origin))
        sigma = None if t is None else t.sigma
        return (sigma is None, sigma, origin)

    def retry() -> None:
        progress = True
        while progress:
            progress = False
            for origin in sorted(backlog, key=order_key):
                queue = backlog[origin]
                while queue and execute(queue[0]):
                    queue.popleft()
                    progress = True
                if not queue:
                    del backlog[origin]
                if progress:
                    break

    for event in trace.events:
        if event.txn in backlog:
            backlog[event.txn].append(event)
        elif not execute(event):
            backlog[event.txn] = collections.deque([event])
        retry()
    for outcome in engine.drain():
        record(outcome)
    retry()

    for origin, txn in sorted(current.items()):
        if engine.txns[txn].status == TxnStatus.IN_FLIGHT:
            logger.warning('t%d did not finish; it is aborted', txn)
            engine.abort(txn, reason='incomplete')
            finish(txn, EventKind.ABORT, TxnStatus.ABORTED)
    engine.drain()

    schedule = MVSchedule(events=tuple(realized), keys=keys_of(realized))
    return ReplayResult(schedule=schedule, outcomes=outcomes, sigma=engine.sigma_map(), finalized=finalized, incarnations=incarnations, log=list(engine.log), engine=engine)


def check_committed_acyclic(result: ReplayResult) -> None:
    """
    :raises InvariantViolation: when the committed transactions of a run are not serializable
    """

    kto = result.kto()
    vo = build_version_order(result.schedule, kto)
    g = committed_subgraph(build_mvsg(result.schedule, vo, kto), result.aborted())
    cycle = has_cycle(g)
    if cycle is not None:
        raise InvariantViolation('cycle among committed transactions: {}'.format(' -> '.join('t{}'.format(txn) for txn in cycle)))
