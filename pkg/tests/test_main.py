"""This module has tests for the command-line interface.
"""

import contextlib
import io
import pathlib
import textwrap
import unittest
from typing import *

import essn_verify.config
import essn_verify.main
import tests.utils
from essn_verify.history.parse import format_trace, parse_traces


def _run(args: List[str]) -> str:
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout):
        essn_verify.main.main(args)
    return stdout.getvalue()


class TestCertifySubcommand(unittest.TestCase):
    """TestCertifySubcommand has smoke tests of `certify` subcommand.
    """
    def test_corpus(self) -> None:
        lines = _run(['certify', '--corpus', 'm1']).splitlines()
        self.assertEqual(lines[-1], 't4 2 3 1 ssn=A essn=C ssi=A')

    def test_file(self) -> None:
        files = {
            'traces.txt': textwrap.dedent("""\
                # write skew
                b1 b2 r1(x) r1(y) r2(x) r2(y) w1(x) w2(y) c1 c2
                """).encode(),
        }
        with tests.utils.load_files(files) as tempdir:
            with tests.utils.chdir(tempdir):
                _run(['certify', '--protocol', 'essn', '--dump-graph', '--out', 'report.txt', 'traces.txt'])
                report = pathlib.Path('report.txt').read_text()
        self.assertIn('t2 1 1 1 essn=A', report)
        self.assertIn('cycle: t1 t2', report)

    def test_abort_targets(self) -> None:
        lines = _run(['certify', '--corpus', 'forward_lift', '--protocol', 'ssn', '--abort-targets']).splitlines()
        self.assertEqual([line.split()[0] for line in lines if 'ssn=A' in line], ['t3', 't4'])

    def test_external_order(self) -> None:
        files = {'trace.txt': b'b1 b2 r1(x0) w2(x2) c2 c1\n'}
        with tests.utils.load_files(files) as tempdir:
            with tests.utils.chdir(tempdir):
                output = _run(['certify', '--kto', 'external', '--order', '1,2', '--protocol', 'ssn', '--dump-graph', 'trace.txt'])
        self.assertIn('1 rw(f) 2 x', output)
        self.assertIn('acyclic', output)

    def test_all_protocols_on_file(self) -> None:
        files = {'trace.txt': b'b1 b2 b3 r1(x0) r2(y0) w3(y3) c3 w2(x2) c2 c1\n'}
        with tests.utils.load_files(files) as tempdir:
            with tests.utils.chdir(tempdir):
                lines = _run(['certify', '--kto', 'begin', 'trace.txt']).splitlines()
        verdicts = [line for line in lines if line.startswith('t')]
        self.assertEqual(len(verdicts), 3)
        self.assertTrue(all('ssn=' in line and 'essn=' in line and 'ssi=' in line for line in verdicts))

    def test_protocol_names_are_the_enum(self) -> None:
        import essn_verify.certifiers.dual_kto
        import essn_verify.certifiers.models
        import essn_verify.tictoc
        import essn_verify.workload.checker

        for module in (essn_verify.main, essn_verify.certifiers.dual_kto, essn_verify.tictoc, essn_verify.workload.checker):
            self.assertIs(module.Protocol, essn_verify.certifiers.models.Protocol, module.__name__)  # type: ignore

    def test_external_without_order(self) -> None:
        with self.assertRaises(SystemExit) as cm:
            _run(['certify', '--corpus', 'm1', '--kto', 'external'])
        self.assertEqual(cm.exception.code, 2)

    def test_ssi_on_non_si(self) -> None:
        files = {'trace.txt': b'b1 w1(x1) c1 b2 r2(x0) c2\n'}
        with tests.utils.load_files(files) as tempdir:
            with tests.utils.chdir(tempdir):
                with self.assertRaises(SystemExit) as cm:
                    _run(['certify', '--protocol', 'ssi', 'trace.txt'])
                self.assertEqual(cm.exception.code, 2)
                with self.assertLogs('essn_verify.main', level='WARNING'):
                    output = _run(['certify', 'trace.txt'])
        self.assertNotIn('ssi=', output)


class TestOtherSubcommands(unittest.TestCase):
    """TestOtherSubcommands has smoke tests of the remaining subcommands.
    """
    def test_generate_and_resolve(self) -> None:
        with tests.utils.load_files({}) as tempdir:
            with tests.utils.chdir(tempdir):
                _run(['generate', '--n-keys', '20', '--read-size', '4', '--n-shorts', '4', '--seed', '3', '--out', 'trace.txt'])
                traces = parse_traces(pathlib.Path('trace.txt').read_text())
                self.assertEqual(len(traces), 1)
                resolved = _run(['resolve', '--policy', 'snapshot_at_begin', 'trace.txt'])
        self.assertNotIn('?', resolved)
        self.assertNotIn('?', format_trace(parse_traces(resolved)[0]))

    def test_resolve(self) -> None:
        with tests.utils.load_files({'trace.txt': b'b1 b2 w2(x) c2 r1(x) c1\n'}) as tempdir:
            with tests.utils.chdir(tempdir):
                output = _run(['resolve', '--policy', 'snapshot_at_begin', 'trace.txt'])
        self.assertEqual(output.strip(), 'b1 b2 w2(x2) c2 r1(x0) c1')

    def test_replay(self) -> None:
        output = _run(['replay', '--corpus', 'read_only_anomaly', '--kto', 'begin', '--policy', 'snapshot_at_begin'])
        self.assertIn('realized: b1 b2 b4 r1(x0) w2(x2) r4(x0) r4(y0) c4 w1(y1) c1 c2', output)
        self.assertIn('commit 4 -> bypassed', output)

    def test_replay_external(self) -> None:
        with self.assertRaises(SystemExit) as cm:
            _run(['replay', '--corpus', 'm1', '--kto', 'external', '--order', '1,2,3,4'])
        self.assertEqual(cm.exception.code, 2)

    def test_tictoc(self) -> None:
        output = _run(['tictoc', '--case', 'a'])
        self.assertIn('[3,5)', output)
        self.assertIn('a feasible: True, b feasible: False', output)
        self.assertIn('vsr order: t3 < t1 < t2', output)

    def test_tictoc_equal_timestamps(self) -> None:
        with self.assertRaises(SystemExit) as cm:
            _run(['tictoc', '--case', 'b', '--c2', '3', '--c3', '3'])
        self.assertEqual(cm.exception.code, 2)

    def test_experiment(self) -> None:
        files = {
            'config.toml': textwrap.dedent("""\
                [workload]
                n_keys = 20
                read_size = 4
                n_shorts = 4
                repeats = 2

                [experiment]
                pivot_probs = [0.0]
                short_hit_probs = [1.0]
                """).encode(),
        }
        with tests.utils.load_files(files) as tempdir:
            with tests.utils.chdir(tempdir):
                try:
                    _run(['--config-file', 'config.toml', 'experiment', '--out', 'out.csv'])
                finally:
                    essn_verify.config.set_config_path(pathlib.Path('no-such-config.toml'))
                lines = pathlib.Path('out.csv').read_text().splitlines()
        self.assertEqual(lines[0], 'rf_policy,pivot_prob,short_hit_prob,protocol,role,trials,aborts,abort_rate')
        self.assertEqual(len(lines), 1 + 2 * 2 * 3)
        self.assertTrue(all(line.split(',')[5] in ('2', '8') for line in lines[1:]))

    def test_help(self) -> None:
        self.assertIn('usage', _run([]))
