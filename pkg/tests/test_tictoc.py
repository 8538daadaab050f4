"""This module has tests for the single-version timestamp-reordering analyzer.
"""

import itertools
import unittest
from typing import *

import numpy as np

from essn_verify.errors import EqualTimestamps, ProtocolPrecondition, TooManyTxns, UnknownVersion
from essn_verify.history.index import index_transactions
from essn_verify.history.parse import format_trace, parse_trace
from essn_verify.history.resolve import resolve_reads
from essn_verify.history.type import *
from essn_verify.tictoc import CASES, Interval, check_mutual_incompatibility, feasible_interval, format_gap, format_interval, mvsr_vs_vsr_gap, vsr_check
from essn_verify.workload.generator import generate_si_history


def _serial_orders(schedule: MVSchedule) -> List[Tuple[TxnId, ...]]:
    """_serial_orders lists, in lexicographic order, the serial orders where each read's version is the last preceding writer of its key and each key keeps its final writer.
    """

    infos = index_transactions(schedule.events)
    committed = sorted(txn for txn, info in infos.items() if info.status == TxnStatus.COMMITTED)
    writers: Dict[str, List[TxnId]] = {}
    for txn in committed:
        for key in infos[txn].write_keys():
            writers.setdefault(key, []).append(txn)
    final = {key: max(txns, key=lambda txn: cast(int, infos[txn].terminal)) for key, txns in writers.items()}
    orders = []
    for order in itertools.permutations(committed):
        position = {txn: i for i, txn in enumerate(order)}

        def observed(reader: TxnId, key: str) -> TxnId:
            earlier = [txn for txn in writers.get(key, []) if position[txn] < position[reader]]
            return max(earlier, key=position.__getitem__) if earlier else INITIAL_TXN

        reads_ok = all(observed(txn, key) == version for txn in committed for _, key, version in infos[txn].reads)
        if reads_ok and all(max(txns, key=position.__getitem__) == final[key] for key, txns in writers.items()):
            orders.append(order)
    return orders


class TestFeasibleInterval(unittest.TestCase):
    """TestFeasibleInterval checks the commit-timestamp intervals of the canonical schedules.
    """
    def test_write_after_read_is_empty(self) -> None:
        rng = np.random.default_rng(0)
        trace = parse_trace(CASES['war'])
        for _ in range(1000):
            wts = int(rng.integers(0, 50))
            rts = wts + int(rng.integers(0, 50))
            c2 = rts + 1 + int(rng.integers(0, 50))
            interval = feasible_interval(trace, 1, {2: c2}, initial={'x': (wts, rts)})
            self.assertTrue(interval.empty, msg=format_interval(interval))
            self.assertEqual(interval.hi, c2)

    def test_read_skew_is_empty(self) -> None:
        rng = np.random.default_rng(1)
        trace = parse_trace(CASES['skew'])
        for _ in range(1000):
            initial = {}
            for key in ('x', 'y'):
                wts = int(rng.integers(0, 50))
                initial[key] = (wts, wts + int(rng.integers(0, 50)))
            c2 = max(rts for _, rts in initial.values()) + 1 + int(rng.integers(0, 50))
            interval = feasible_interval(trace, 1, {2: c2}, initial=initial)
            self.assertTrue(interval.empty, msg=format_interval(interval))
            self.assertEqual(interval, Interval(lo=c2, hi=c2))

    def test_case_a(self) -> None:
        interval = feasible_interval(parse_trace(CASES['a']), 1, {2: 5, 3: 3})
        self.assertEqual(interval, Interval(lo=3, hi=5))
        self.assertEqual(format_interval(interval), '[3,5)')
        self.assertIn(4, interval)
        self.assertNotIn(5, interval)

    def test_case_b(self) -> None:
        trace = parse_trace(CASES['b'])
        self.assertEqual(feasible_interval(trace, 1, {2: 5, 3: 3}), Interval(lo=5, hi=3))
        self.assertEqual(feasible_interval(trace, 1, {2: 3, 3: 5}), Interval(lo=3, hi=5))

    def test_open_interval(self) -> None:
        interval = feasible_interval(parse_trace('w2(x) c2 r1(x) c1'), 1, {2: 7})
        self.assertEqual(interval, Interval(lo=7, hi=None))
        self.assertEqual(format_interval(interval), '[7,inf)')
        self.assertFalse(interval.empty)

    def test_missing_timestamp(self) -> None:
        self.assertRaises(UnknownVersion, lambda: feasible_interval(parse_trace(CASES['a']), 1, {2: 5}))

    def test_two_overwriters(self) -> None:
        self.assertRaises(ProtocolPrecondition, lambda: feasible_interval(parse_trace('r1(x) w2(x) c2 w3(x) c3 c1'), 1, {2: 2, 3: 3}))


class TestMutualIncompatibility(unittest.TestCase):
    def test_exactly_one(self) -> None:
        for c2 in range(1, 12):
            for c3 in range(1, 12):
                if c2 == c3:
                    continue
                a, b = check_mutual_incompatibility(c2, c3)
                self.assertNotEqual(a, b)
                self.assertEqual(a, c3 < c2)

    def test_equal(self) -> None:
        self.assertRaises(EqualTimestamps, lambda: check_mutual_incompatibility(4, 4))


class TestVsr(unittest.TestCase):
    def test_orders(self) -> None:
        self.assertEqual(vsr_check(parse_trace(CASES['a'])), [3, 1, 2])
        self.assertEqual(vsr_check(parse_trace(CASES['b'])), [2, 1, 3])
        self.assertIsNone(vsr_check(parse_trace(CASES['war'])))
        self.assertIsNone(vsr_check(parse_trace(CASES['skew'])))

    def test_matches_permutation_oracle(self) -> None:
        rng = np.random.default_rng(5)
        serializable = 0
        for _ in range(300):
            schedule = generate_si_history(rng, int(rng.integers(2, 6)), int(rng.integers(1, 4)))
            trace = InputTrace(events=tuple(event._replace(version=None) if event.kind == EventKind.READ and event.version != event.txn else event for event in schedule.events))
            for given, resolved in ((schedule, schedule), (trace, resolve_reads(trace, RfPolicy.AS_OF_READ_COMMIT))):
                valid = _serial_orders(resolved)
                expected = list(valid[0]) if valid else None
                self.assertEqual(vsr_check(given), expected, msg=format_trace(resolved))
                serializable += expected is not None
        self.assertGreater(serializable, 0)

    def test_too_many(self) -> None:
        trace = parse_trace(' '.join('w{0}(x) c{0}'.format(txn) for txn in range(1, 10)))
        with self.assertRaises(TooManyTxns) as cm:
            vsr_check(trace)
        self.assertEqual(cm.exception.count, 9)


class TestGap(unittest.TestCase):
    """TestGap has tests for schedules which are multiversion serializable but not view serializable.
    """
    def test_mvsr_only(self) -> None:
        for case in ('war', 'skew'):
            with self.subTest(case=case):
                report = mvsr_vs_vsr_gap(parse_trace(CASES[case]))
                self.assertTrue(report.mvsr_only())
                self.assertIn('all commit', format_gap(report))

    def test_view_serializable(self) -> None:
        report = mvsr_vs_vsr_gap(parse_trace(CASES['a']))
        self.assertFalse(report.mvsr_only())
        self.assertIn('t3 < t1 < t2', format_gap(report))
