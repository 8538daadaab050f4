"""This module has unit tests for the online commit-time engine.
"""

import unittest

from essn_verify.certifiers.models import Protocol
from essn_verify.engine.engine import Engine
from essn_verify.engine.objects import Aborted, Committed, EngineConfig, Stalled
from essn_verify.errors import InvariantViolation, ProtocolPrecondition, StallRequired
from essn_verify.history.type import *
from essn_verify.stamp import NEG_INF, POS_INF

BEGIN_ORDERED = EngineConfig(kto_flavor=KtoFlavor.BEGIN)


class TestEngineCommit(unittest.TestCase):
    """TestEngineCommit has tests for the exclusion test at commit under the commit-ordered KTO.
    """
    def test_overwritten_read(self) -> None:
        engine = Engine()
        engine.begin(1)
        engine.begin(2)
        self.assertEqual(engine.read(1, 'x').writer, INITIAL_TXN)
        engine.write(2, 'x')
        outcome = engine.commit(2)
        self.assertIsInstance(outcome, Committed)
        outcome = engine.commit(1)
        self.assertIsInstance(outcome, Committed)
        self.assertEqual(outcome.pi, engine.txns[2].sigma)
        self.assertEqual(outcome.bound, NEG_INF)
        self.assertEqual(engine.chains['x'][0].sstamp, engine.txns[2].sigma)

    def test_write_skew(self) -> None:
        for protocol in (Protocol.SSN, Protocol.ESSN):
            with self.subTest(protocol=protocol.value):
                engine = Engine(EngineConfig(protocol=protocol))
                engine.begin(1)
                engine.begin(2)
                for txn in (1, 2):
                    engine.read(txn, 'x')
                    engine.read(txn, 'y')
                engine.write(1, 'x')
                engine.write(2, 'y')
                self.assertIsInstance(engine.commit(1), Committed)
                outcome = engine.commit(2)
                self.assertIsInstance(outcome, Aborted)
                self.assertEqual(engine.txns[2].status, TxnStatus.ABORTED)
                self.assertEqual([v.writer for v in engine.chains['y']], [INITIAL_TXN])

    def test_read_own_write(self) -> None:
        engine = Engine()
        engine.begin(1)
        v = engine.write(1, 'x')
        self.assertIs(engine.read(1, 'x'), v)
        self.assertEqual(engine.txns[1].reads, [])

    def test_access_budget(self) -> None:
        engine = Engine()
        engine.begin(1)
        for key in ('a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j'):
            engine.read(1, key)
        for key in ('p', 'q', 'r', 's', 't'):
            engine.write(1, key)
        engine.commit(1)
        self.assertLessEqual(engine.last_commit_accesses, 3 * (10 + 5) + 2)

    def test_access_budget_does_not_grow_with_history(self) -> None:
        engine = Engine()
        for txn in range(1, 51):
            engine.begin(txn)
            engine.read(txn, 'x')
            engine.write(txn, 'x')
            self.assertIsInstance(engine.commit(txn), Committed)
            self.assertLessEqual(engine.last_commit_accesses, 3 * 2 + 2)
        self.assertEqual(len(engine.chains['x']), 51)
        engine.check_chain_monotonicity()

    def test_preconditions(self) -> None:
        self.assertRaises(ProtocolPrecondition, lambda: Engine(EngineConfig(kto_flavor=KtoFlavor.EXTERNAL)))
        self.assertRaises(ProtocolPrecondition, lambda: Engine(EngineConfig(protocol=Protocol.SSI)))
        engine = Engine()
        self.assertRaises(ProtocolPrecondition, lambda: engine.commit(1))
        engine.begin(1)
        self.assertRaises(ProtocolPrecondition, lambda: engine.begin(1))
        engine.abort(1)
        self.assertRaises(ProtocolPrecondition, lambda: engine.read(1, 'x'))
        self.assertEqual(engine.txns[1].reason, 'user')


class TestEngineShortcut(unittest.TestCase):
    """TestEngineShortcut has tests for reads of versions whose overwriter has already committed.
    """
    def test_shortcut(self) -> None:
        for protocol, kept in ((Protocol.ESSN, 0), (Protocol.SSN, 1)):
            with self.subTest(protocol=protocol.value):
                engine = Engine(EngineConfig(protocol=protocol, shortcut=True, rf_policy=RfPolicy.SNAPSHOT_AT_BEGIN))
                engine.begin(1)
                engine.begin(2)
                engine.write(2, 'x')
                engine.commit(2)
                self.assertEqual(engine.read(1, 'x').writer, INITIAL_TXN)
                self.assertEqual(len(engine.txns[1].reads), kept)
                self.assertEqual(engine.txns[1].sstamp, engine.txns[2].sstamp)
                self.assertTrue(engine.log[-1].endswith('shortcut'))
                self.assertIsInstance(engine.commit(1), Committed)

    def test_no_shortcut_on_the_tail(self) -> None:
        engine = Engine(EngineConfig(shortcut=True))
        engine.begin(1)
        engine.read(1, 'x')
        self.assertEqual(len(engine.txns[1].reads), 1)


class TestEngineStall(unittest.TestCase):
    """TestEngineStall has tests for commit-stall and stall-bypass under the begin-ordered KTO.
    """
    def test_stall_then_drain(self) -> None:
        engine = Engine(BEGIN_ORDERED._replace(stall_bypass=False))
        engine.begin(1)
        engine.begin(2)
        engine.write(2, 'x')
        self.assertEqual(engine.commit(2), Stalled(txn=2, blockers=(1, )))
        self.assertIn(2, engine.stalls)
        self.assertIsInstance(engine.commit(1), Committed)
        outcomes = engine.drain()
        self.assertEqual([type(outcome) for outcome in outcomes], [Committed])
        self.assertEqual(len(engine.stalls), 0)

    def test_bypass(self) -> None:
        engine = Engine(BEGIN_ORDERED)
        engine.begin(1)
        engine.begin(2)
        engine.read(2, 'x')
        outcome = engine.commit(2)
        self.assertIsInstance(outcome, Committed)
        self.assertTrue(outcome.bypassed)
        engine.write(1, 'x')
        self.assertIsInstance(engine.commit(1), Committed)
        engine.drain()
        self.assertEqual(engine.txns[2].sstamp, engine.txns[1].sigma)
        self.assertEqual(engine.chains['x'][0].psstamp, engine.txns[1].sigma)

    def test_no_bypass_for_writers(self) -> None:
        engine = Engine(BEGIN_ORDERED)
        engine.begin(1)
        engine.begin(2)
        engine.read(2, 'x')
        engine.write(2, 'y')
        self.assertIsInstance(engine.commit(2), Stalled)

    def test_abort_releases_stall(self) -> None:
        engine = Engine(BEGIN_ORDERED)
        engine.begin(1)
        engine.begin(2)
        engine.write(2, 'x')
        self.assertIsInstance(engine.commit(2), Stalled)
        engine.abort(1)
        self.assertIsInstance(engine.drain()[0], Committed)

    def test_nearest_begin_read(self) -> None:
        engine = Engine(BEGIN_ORDERED._replace(rf_policy=RfPolicy.NEAREST_BEGIN_KTO))
        engine.begin(1)
        engine.begin(2)
        engine.write(1, 'x')
        with self.assertRaises(StallRequired) as cm:
            engine.read(2, 'x')
        self.assertEqual(cm.exception.blockers, (1, ))
        engine.commit(1)
        self.assertEqual(engine.read(2, 'x').writer, 1)


class TestEngineRestart(unittest.TestCase):
    def test_long_restarts_shorts(self) -> None:
        engine = Engine(BEGIN_ORDERED._replace(priority_restart=True))
        engine.begin(3)
        engine.begin(4, long=True)
        engine.begin(5)
        engine.begin(1, long=True)
        self.assertEqual(engine.txns[3].status, TxnStatus.ABORTED)
        self.assertEqual(engine.txns[3].reason, 'restart')
        self.assertEqual(engine.txns[5].reason, 'restart')
        self.assertEqual(engine.txns[4].status, TxnStatus.IN_FLIGHT)


class TestChainMonotonicity(unittest.TestCase):
    def test_violation(self) -> None:
        engine = Engine()
        for txn in (1, 2):
            engine.begin(txn)
            engine.write(txn, 'x')
            engine.commit(txn)
        engine.check_chain_monotonicity()
        engine.chains['x'][2].crepi = NEG_INF
        self.assertRaises(InvariantViolation, engine.check_chain_monotonicity)

    def test_fresh_versions(self) -> None:
        engine = Engine()
        engine.begin(1)
        v = engine.read(1, 'x')
        self.assertEqual(v.sstamp, POS_INF)
        self.assertEqual(v.crepi, NEG_INF)
