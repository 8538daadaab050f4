# Python Version: 3.x
"""This module analyzes single-version timestamp reordering (TicToc style) on small schedules.

At its commit a transaction t needs a commit timestamp C_t with wts(v) <= C_t <= rts(v) for every version v it read, and rts(v) < C_t for every version it overwrites. A reader may raise rts(v) to C_t, so a read bounds C_t from above only when another transaction overwrote that version and committed first.
"""

import itertools
from logging import getLogger
from typing import *

from essn_verify.certifiers.main import certify
from essn_verify.certifiers.models import CertResult, Protocol
from essn_verify.errors import EqualTimestamps, ProtocolPrecondition, TooManyTxns, UnknownVersion
from essn_verify.history.index import TxnInfo, index_transactions
from essn_verify.history.kto import make_kto
from essn_verify.history.parse import parse_trace
from essn_verify.history.resolve import resolve_reads
from essn_verify.history.type import *
from essn_verify.mvsg import build_mvsg, build_version_order

logger = getLogger(__name__)

VSR_LIMIT = 8

CASES = {
    'war': 'r1(x) w2(x) c2 w1(x) c1',
    'skew': 'r1(x) w2(x) w2(y) c2 r1(y) c1',
    'a': 'r1(x) w2(x) c2 w3(y) c3 r1(y) c1',
    'b': 'r1(y) w2(x) c2 w3(y) c3 r1(x) c1',
}


class TsVersion(NamedTuple):
    key: str
    writer: TxnId
    wts: int
    rts: int


class Interval(NamedTuple):
    lo: int  # inclusive
    hi: Optional[int]  # exclusive; None is unbounded

    @property
    def empty(self) -> bool:
        return self.hi is not None and self.lo >= self.hi

    def __contains__(self, value: object) -> bool:
        return isinstance(value, int) and self.lo <= value and (self.hi is None or value < self.hi)


def format_interval(interval: Interval) -> str:
    return '[{},{})'.format(interval.lo, 'inf' if interval.hi is None else interval.hi)


def _single_version(schedule: Union[InputTrace, MVSchedule]) -> MVSchedule:
    if isinstance(schedule, InputTrace):
        return resolve_reads(schedule, RfPolicy.AS_OF_READ_COMMIT)
    return schedule


class _Timeline:
    def __init__(self, schedule: MVSchedule, committed_cts: Mapping[TxnId, int], initial: Mapping[str, Tuple[int, int]]) -> None:
        self.infos = index_transactions(schedule.events)
        self.cts = committed_cts
        self.initial = initial

    def cts_of(self, key: str, txn: TxnId) -> int:
        if txn not in self.cts:
            raise UnknownVersion(key, txn)
        return self.cts[txn]

    def committed_writers(self, key: str) -> List[TxnInfo]:
        writers = [info for info in self.infos.values() if info.status == TxnStatus.COMMITTED and key in info.write_keys()]
        return sorted(writers, key=lambda info: cast(int, info.terminal))

    def version_at(self, key: str, position: int, exclude: TxnId) -> TsVersion:
        """version_at returns the version of key installed last before position, with its rts as raised by readers committed before position.
        """

        writer = INITIAL_TXN
        for info in self.committed_writers(key):
            if info.txn != exclude and cast(int, info.terminal) < position:
                writer = info.txn
        if writer == INITIAL_TXN:
            wts, rts = self.initial.get(key, (0, 0))
        else:
            wts = rts = self.cts_of(key, writer)
        for info in self.infos.values():
            if info.txn == exclude or info.status != TxnStatus.COMMITTED or cast(int, info.terminal) >= position:
                continue
            if any(k == key and version == writer for _, k, version in info.reads):
                rts = max(rts, self.cts_of(key, info.txn))
        return TsVersion(key=key, writer=writer, wts=wts, rts=rts)


def feasible_interval(schedule: Union[InputTrace, MVSchedule], t: TxnId, committed_cts: Mapping[TxnId, int], *, initial: Mapping[str, Tuple[int, int]] = {}) -> Interval:
    """feasible_interval returns the commit timestamps t may take, given the commit timestamps of the other transactions.

    :param initial: (wts, rts) of the initial version per key; (0, 0) by default
    :raises UnknownVersion: when a commit timestamp the bounds depend on is not given
    :raises ProtocolPrecondition: when a version read by t has more than one overwriter before t commits
    """

    schedule = _single_version(schedule)
    timeline = _Timeline(schedule, committed_cts, initial)
    info = timeline.infos[t]
    end = info.terminal if info.terminal is not None else len(schedule.events)
    lo: int = 0
    hi: Optional[int] = None
    for _, key, version in info.reads:
        assert version is not None
        if version == INITIAL_TXN:
            lo = max(lo, initial.get(key, (0, 0))[0])
            installed = -1
        else:
            lo = max(lo, timeline.cts_of(key, version))
            installed = cast(int, timeline.infos[version].terminal)
        overwriters = [w for w in timeline.committed_writers(key) if w.txn != t and installed < cast(int, w.terminal) < end]
        if len(overwriters) > 1:
            raise ProtocolPrecondition('{}{} read by t{} has {} overwriters'.format(key, version, t, len(overwriters)))
        if overwriters:
            bound = timeline.cts_of(key, overwriters[0].txn)
            hi = bound if hi is None else min(hi, bound)
    for key in sorted(info.write_keys()):
        current = timeline.version_at(key, end, t)
        lo = max(lo, current.rts + 1)
    interval = Interval(lo=lo, hi=hi)
    logger.debug('t%d may commit within %s', t, format_interval(interval))
    return interval


def check_mutual_incompatibility(c2: int, c3: int) -> Tuple[bool, bool]:
    """check_mutual_incompatibility returns whether t1 of case (a) and t1 of case (b) can commit, for the same C2 and C3.

    :raises EqualTimestamps:
    """

    if c2 == c3:
        raise EqualTimestamps('C2 and C3 must differ, both are {}'.format(c2))
    cts = {2: c2, 3: c3}
    a = feasible_interval(parse_trace(CASES['a']), 1, cts)
    b = feasible_interval(parse_trace(CASES['b']), 1, cts)
    return (not a.empty, not b.empty)


def vsr_check(schedule: Union[InputTrace, MVSchedule]) -> Optional[List[TxnId]]:
    """vsr_check returns the first serial order (in lexicographic order of ids) in which every read observes the last preceding write of its key and every key ends with the same final write, or None.

    :raises TooManyTxns:
    """

    schedule = _single_version(schedule)
    infos = index_transactions(schedule.events)
    committed = sorted(info.txn for info in infos.values() if info.status == TxnStatus.COMMITTED)
    if len(committed) > VSR_LIMIT:
        raise TooManyTxns(len(committed), VSR_LIMIT)
    ops: Dict[TxnId, List[Event]] = {txn: [] for txn in committed}
    for event in schedule.events:
        if event.txn in ops and event.kind in (EventKind.READ, EventKind.WRITE):
            ops[event.txn].append(event)
    final: Dict[str, TxnId] = {}
    for txn in sorted(committed, key=lambda txn: cast(int, infos[txn].terminal)):
        for key in infos[txn].write_keys():
            final[key] = txn

    for order in itertools.permutations(committed):
        last: Dict[str, TxnId] = {}
        ok = True
        for txn in order:
            for event in ops[txn]:
                assert event.key is not None
                if event.kind == EventKind.READ:
                    if last.get(event.key, INITIAL_TXN) != event.version:
                        ok = False
                        break
                else:
                    last[event.key] = txn
            if not ok:
                break
        if ok and all(last.get(key) == writer for key, writer in final.items()):
            return list(order)
    return None


class GapReport(NamedTuple):
    vsr_order: Optional[List[TxnId]]
    essn: CertResult
    rf_policy: RfPolicy

    def mvsr_only(self) -> bool:
        return self.vsr_order is None and not self.essn.aborted()


def mvsr_vs_vsr_gap(trace: InputTrace, *, rf_policy: RfPolicy = RfPolicy.SNAPSHOT_AT_BEGIN) -> GapReport:
    """mvsr_vs_vsr_gap judges the same trace twice: as a single-version schedule with committed reads, and as a multiversion schedule certified by ESSN under the begin-ordered KTO.
    """

    schedule = resolve_reads(trace, rf_policy)
    kto = make_kto(schedule, KtoFlavor.BEGIN)
    g = build_mvsg(schedule, build_version_order(schedule, kto), kto)
    return GapReport(vsr_order=vsr_check(trace), essn=certify(g, Protocol.ESSN), rf_policy=rf_policy)


def format_gap(report: GapReport) -> str:
    order = 'none' if report.vsr_order is None else ' < '.join('t{}'.format(txn) for txn in report.vsr_order)
    aborted = sorted(report.essn.aborted())
    verdict = 'all commit' if not aborted else 'aborts ' + ', '.join('t{}'.format(txn) for txn in aborted)
    return 'vsr order: {}\nessn ({}, begin kto): {}'.format(order, report.rf_policy.value, verdict)
