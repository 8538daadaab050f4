"""This module has randomized tests for the inclusion between the abort sets of ESSN, SSN and SSI.
"""

import unittest

import tests.utils
from essn_verify.certifiers.main import abort_targets, certify
from essn_verify.certifiers.models import Protocol
from essn_verify.corpus import get_entry
from essn_verify.history.kto import make_kto
from essn_verify.history.parse import format_trace
from essn_verify.history.resolve import check_snapshot_isolation, resolve_reads
from essn_verify.history.type import *
from essn_verify.mvsg import build_mvsg, build_version_order, committed_subgraph, has_cycle


class TestHierarchy(unittest.TestCase):
    """TestHierarchy checks aborts(ESSN) <= aborts(SSN) <= aborts(SSI) when every transaction is judged on the whole graph.
    """
    def test_random_si_histories(self) -> None:
        for schedule in tests.utils.random_si_histories(seed=20201, count=10000):
            self.assertEqual(check_snapshot_isolation(schedule), [], msg=format_trace(schedule))
            kto = make_kto(schedule, KtoFlavor.COMMIT)
            g = build_mvsg(schedule, build_version_order(schedule, kto), kto)
            essn = abort_targets(g, Protocol.ESSN)
            ssn = abort_targets(g, Protocol.SSN)
            ssi = abort_targets(g, Protocol.SSI)
            self.assertLessEqual(essn, ssn, msg=format_trace(schedule))
            self.assertLessEqual(ssn, ssi, msg=format_trace(schedule))

    def test_strictness(self) -> None:
        def aborts(name: str, protocol: Protocol) -> frozenset:
            entry = get_entry(name)
            schedule = resolve_reads(entry.trace(), entry.rf_policy)
            kto = make_kto(schedule, entry.kto_flavor)
            return abort_targets(build_mvsg(schedule, build_version_order(schedule, kto), kto), protocol)

        self.assertLess(aborts('m1', Protocol.ESSN), aborts('m1', Protocol.SSN))
        self.assertLess(aborts('all_back_chain', Protocol.SSN), aborts('all_back_chain', Protocol.SSI))


class TestSoundness(unittest.TestCase):
    """TestSoundness checks that the transactions a certifier admits never form a cycle.
    """
    def test_random_si_histories(self) -> None:
        for schedule in tests.utils.random_si_histories(seed=7, count=2000):
            for flavor in (KtoFlavor.COMMIT, KtoFlavor.BEGIN):
                kto = make_kto(schedule, flavor)
                g = build_mvsg(schedule, build_version_order(schedule, kto), kto)
                for protocol in (Protocol.SSN, Protocol.ESSN):
                    result = certify(g, protocol)
                    self.assertIsNone(has_cycle(committed_subgraph(g, result.aborted())), msg='{} {} {}'.format(protocol.value, flavor.value, format_trace(schedule)))
