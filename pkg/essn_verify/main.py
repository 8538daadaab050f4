# Python Version: 3.x
import argparse
import pathlib
import sys
from logging import INFO, basicConfig, getLogger
from typing import *

import colorlog

import essn_verify.config
from essn_verify.certifiers.main import certify
from essn_verify.certifiers.models import CertResult, Protocol
from essn_verify.certifiers.report import format_report, format_witness
from essn_verify.corpus import get_entry
from essn_verify.engine.objects import EngineConfig
from essn_verify.engine.replay import check_committed_acyclic, replay
from essn_verify.errors import EssnVerifyError, InvariantViolation
from essn_verify.history.kto import make_external_kto, make_kto
from essn_verify.history.parse import format_trace, parse_traces
from essn_verify.history.resolve import resolve_reads
from essn_verify.history.type import *
from essn_verify.mvsg import build_mvsg, build_version_order, format_graph, has_cycle
from essn_verify.tictoc import CASES, check_mutual_incompatibility, feasible_interval, format_gap, format_interval, mvsr_vs_vsr_gap
from essn_verify.workload.experiment import check_trends, format_summary, run_experiment, write_csv
from essn_verify.workload.generator import generate_mixed
from essn_verify.workload.type import GRID_POLICIES, GRID_PROBS, WorkloadParams

logger = getLogger(__name__)


def _parse_ids(text: str) -> List[TxnId]:
    return [int(token) for token in text.replace(',', ' ').split()]


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser()
    parser.add_argument('--config-file', default=essn_verify.config.default_config_path, help='default: ".essn-verify/config.toml"')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='default: 0')
    common.add_argument('--policy', choices=[policy.value for policy in RfPolicy], default=RfPolicy.AS_OF_READ_COMMIT.value, help='the version function for unresolved reads')
    common.add_argument('--kto', choices=[flavor.value for flavor in KtoFlavor], default=KtoFlavor.COMMIT.value)
    common.add_argument('--order', type=_parse_ids, help='the transaction order for --kto external, e.g. "3,1,2"')
    common.add_argument('-o', '--out', type=pathlib.Path, help='default: the standard output')

    subparsers = parser.add_subparsers(dest='subcommand')

    subparser = subparsers.add_parser('generate', parents=[common], help='generate a mixed long/short trace')
    subparser.add_argument('--n-keys', type=int)
    subparser.add_argument('--read-size', type=int)
    subparser.add_argument('--n-shorts', type=int)
    subparser.add_argument('--short-writes', type=int)
    subparser.add_argument('--pivot-prob', type=float)
    subparser.add_argument('--short-hit-prob', type=float)

    subparser = subparsers.add_parser('resolve', parents=[common], help='bind unresolved reads with a version function')
    subparser.add_argument('path', nargs='?', type=pathlib.Path, help='default: the standard input')

    subparser = subparsers.add_parser('certify', parents=[common], help='print SSN/ESSN/SSI verdicts')
    subparser.add_argument('path', nargs='?', type=pathlib.Path, help='default: the standard input')
    subparser.add_argument('--corpus', help='use a golden schedule instead of a file')
    subparser.add_argument('--protocol', choices=[protocol.value for protocol in Protocol] + ['all'], default='all')
    subparser.add_argument('--abort-targets', action='store_true', help='judge every transaction on the whole graph')
    subparser.add_argument('--dump-graph', action='store_true')

    subparser = subparsers.add_parser('replay', parents=[common], help='run a trace through the online engine')
    subparser.add_argument('path', nargs='?', type=pathlib.Path, help='default: the standard input')
    subparser.add_argument('--corpus', help='use a golden schedule instead of a file')
    subparser.add_argument('--protocol', choices=[Protocol.ESSN.value, Protocol.SSN.value], default=Protocol.ESSN.value)
    subparser.add_argument('--long', type=_parse_ids, default=[], help='ids of long transactions, e.g. "1,2"')
    subparser.add_argument('--shortcut', action='store_true', default=None)
    subparser.add_argument('--no-stall-bypass', dest='stall_bypass', action='store_false', default=None)
    subparser.add_argument('--priority-restart', action='store_true', default=None)

    subparser = subparsers.add_parser('experiment', parents=[common], help='run the abort-rate grid and write a CSV')
    subparser.add_argument('--grid', choices=['default'], default='default')
    subparser.add_argument('--repeats', type=int)
    subparser.add_argument('-j', '--jobs', type=int)
    subparser.add_argument('--commit-time', action='store_true', help='excise rejected transactions in KTO order instead of judging all of them on the whole graph')

    subparser = subparsers.add_parser('tictoc', parents=[common], help='feasible commit timestamps of single-version timestamp reordering')
    subparser.add_argument('--case', choices=sorted(CASES), default='a')
    subparser.add_argument('--c2', type=int, default=5)
    subparser.add_argument('--c3', type=int, default=3)

    return parser


def _write_output(text: str, out: Optional[pathlib.Path]) -> None:
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w') as fh:
            fh.write(text + '\n')
        logger.info('wrote %s', str(out))


def _read_traces(path: Optional[pathlib.Path], corpus: Optional[str] = None) -> List[InputTrace]:
    if corpus is not None:
        return [get_entry(corpus).trace()]
    if path is None or str(path) == '-':
        return parse_traces(sys.stdin.read())
    with open(path) as fh:
        return parse_traces(fh.read())


def _make_kto(schedule: MVSchedule, flavor: KtoFlavor, order: Optional[List[TxnId]]) -> Kto:
    if flavor == KtoFlavor.EXTERNAL:
        if not order:
            raise EssnVerifyError('--kto external needs --order')
        try:
            return make_external_kto(order)
        except ValueError as e:
            raise EssnVerifyError(str(e)) from e
    return make_kto(schedule, flavor)


def subcommand_generate(params: WorkloadParams) -> str:
    return format_trace(generate_mixed(params))


def subcommand_resolve(traces: List[InputTrace], *, policy: RfPolicy) -> str:
    return '\n'.join(format_trace(resolve_reads(trace, policy)) for trace in traces)


def subcommand_certify(traces: List[InputTrace], *, policy: RfPolicy, kto_flavor: KtoFlavor, order: Optional[List[TxnId]], protocols: List[Protocol], abort_targets: bool, dump_graph: bool) -> str:
    """
    :raises ProtocolPrecondition: if SSI alone is requested on a history which is not snapshot isolation
    """

    blocks = []
    for trace in traces:
        schedule = resolve_reads(trace, policy)
        kto = _make_kto(schedule, kto_flavor, order)
        g = build_mvsg(schedule, build_version_order(schedule, kto), kto)
        results: List[CertResult] = []
        for protocol in protocols:
            if protocol == Protocol.SSI and g.si_reasons and len(protocols) > 1:
                logger.warning('SSI is skipped: %s', '; '.join(g.si_reasons))
                continue
            result = certify(g, protocol, excise=not abort_targets)
            results.append(result)
            witnesses = format_witness(result)
            if witnesses:
                logger.debug('%s', witnesses)
        lines = [format_report(results)]
        if dump_graph:
            lines.append(format_graph(g))
            cycle = has_cycle(g)
            lines.append('acyclic' if cycle is None else 'cycle: ' + ' '.join('t{}'.format(txn) for txn in cycle))
        blocks.append('\n'.join(line for line in lines if line))
    return '\n\n'.join(blocks)


def subcommand_replay(traces: List[InputTrace], *, config: EngineConfig, longs: List[TxnId]) -> str:
    """
    :raises InvariantViolation: if a run breaks π monotonicity or commits a cycle
    """

    blocks = []
    for trace in traces:
        result = replay(trace, config, longs=frozenset(longs))
        result.engine.check_chain_monotonicity()
        check_committed_acyclic(result)
        lines = list(result.log)
        lines.append('realized: ' + format_trace(result.schedule))
        blocks.append('\n'.join(lines))
    return '\n\n'.join(blocks)


def subcommand_experiment(params: WorkloadParams, *, rf_policies: List[RfPolicy], pivot_probs: List[float], short_hit_probs: List[float], jobs: int, abort_targets: bool, out: Optional[pathlib.Path]) -> None:
    report = run_experiment(params, rf_policies=rf_policies, pivot_probs=pivot_probs, short_hit_probs=short_hit_probs, jobs=jobs, excise=not abort_targets)
    if out is None:
        write_csv(report.rows, sys.stdout)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', newline='') as fh:
            write_csv(report.rows, fh)
        logger.info('wrote %d rows to %s', len(report.rows), str(out))
    logger.info('summary:\n%s', format_summary(report))
    for problem in check_trends(report):
        logger.warning('trend does not hold: %s', problem)


def subcommand_tictoc(case: str, *, c2: int, c3: int) -> str:
    """
    :raises EqualTimestamps: for case a or b with --c2 equal to --c3
    """

    trace = parse_traces(CASES[case])[0]
    interval = feasible_interval(trace, 1, {2: c2, 3: c3})
    lines = [
        'case {}: {}'.format(case, CASES[case]),
        't1 may commit within {} ({})'.format(format_interval(interval), 'empty' if interval.empty else 'nonempty'),
    ]
    if case in ('a', 'b'):
        a_feasible, b_feasible = check_mutual_incompatibility(c2, c3)
        lines.append('a feasible: {}, b feasible: {}'.format(a_feasible, b_feasible))
    lines.append(format_gap(mvsr_vs_vsr_gap(trace)))
    return '\n'.join(lines)


def _workload_params(parsed: argparse.Namespace) -> WorkloadParams:
    default = WorkloadParams()
    pick = essn_verify.config.pick
    return WorkloadParams(
        n_keys=pick(getattr(parsed, 'n_keys', None), 'workload', 'n_keys', default.n_keys),
        read_size=pick(getattr(parsed, 'read_size', None), 'workload', 'read_size', default.read_size),
        n_shorts=pick(getattr(parsed, 'n_shorts', None), 'workload', 'n_shorts', default.n_shorts),
        short_writes=pick(getattr(parsed, 'short_writes', None), 'workload', 'short_writes', default.short_writes),
        repeats=pick(getattr(parsed, 'repeats', None), 'experiment', 'repeats', pick(None, 'workload', 'repeats', default.repeats)),
        pivot_prob=pick(getattr(parsed, 'pivot_prob', None), 'workload', 'pivot_prob', default.pivot_prob),
        short_hit_prob=pick(getattr(parsed, 'short_hit_prob', None), 'workload', 'short_hit_prob', default.short_hit_prob),
        seed=parsed.seed if parsed.seed is not None else default.seed,
        rf_policy=RfPolicy(parsed.policy),
        kto_flavor=KtoFlavor.COMMIT,
    )


def _engine_config(parsed: argparse.Namespace) -> EngineConfig:
    pick = essn_verify.config.pick
    return EngineConfig(
        kto_flavor=KtoFlavor(parsed.kto),
        rf_policy=RfPolicy(parsed.policy),
        protocol=Protocol(parsed.protocol),
        shortcut=bool(pick(parsed.shortcut, 'engine', 'shortcut', False)),
        stall_bypass=bool(pick(parsed.stall_bypass, 'engine', 'stall_bypass', True)),
        priority_restart=bool(pick(parsed.priority_restart, 'engine', 'priority_restart', False)),
    )


def run(parsed: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if parsed.subcommand == 'generate':
        _write_output(subcommand_generate(_workload_params(parsed)), parsed.out)

    elif parsed.subcommand == 'resolve':
        _write_output(subcommand_resolve(_read_traces(parsed.path), policy=RfPolicy(parsed.policy)), parsed.out)

    elif parsed.subcommand == 'certify':
        protocols = [Protocol.SSN, Protocol.ESSN, Protocol.SSI] if parsed.protocol == 'all' else [Protocol(parsed.protocol)]
        text = subcommand_certify(_read_traces(parsed.path, parsed.corpus), policy=RfPolicy(parsed.policy), kto_flavor=KtoFlavor(parsed.kto), order=parsed.order, protocols=protocols, abort_targets=parsed.abort_targets, dump_graph=parsed.dump_graph)
        _write_output(text, parsed.out)

    elif parsed.subcommand == 'replay':
        text = subcommand_replay(_read_traces(parsed.path, parsed.corpus), config=_engine_config(parsed), longs=parsed.long)
        _write_output(text, parsed.out)

    elif parsed.subcommand == 'experiment':
        section = essn_verify.config.get_section('experiment')
        params = _workload_params(parsed)
        rf_policies = [RfPolicy(policy) for policy in section.get('rf_policies', [policy.value for policy in GRID_POLICIES])]
        abort_targets = not parsed.commit_time and bool(section.get('abort_targets', True))
        jobs = essn_verify.config.pick(parsed.jobs, 'experiment', 'jobs', 1)
        subcommand_experiment(params, rf_policies=rf_policies, pivot_probs=list(section.get('pivot_probs', GRID_PROBS)), short_hit_probs=list(section.get('short_hit_probs', GRID_PROBS)), jobs=jobs, abort_targets=abort_targets, out=parsed.out)

    elif parsed.subcommand == 'tictoc':
        _write_output(subcommand_tictoc(parsed.case, c2=parsed.c2, c3=parsed.c3), parsed.out)

    else:
        parser.print_help()


def main(args: Optional[List[str]] = None) -> None:
    # configure logging
    log_format = '%(log_color)s%(levelname)s%(reset)s:%(name)s:%(message)s'
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(log_format))
    basicConfig(level=INFO, handlers=[handler])

    # parse command-line arguments
    parser = get_parser()
    parsed = parser.parse_args(args)

    # load the config file as a global variable
    essn_verify.config.set_config_path(pathlib.Path(parsed.config_file))

    try:
        run(parsed, parser)
    except InvariantViolation as e:
        logger.error('invariant violated: %s', e)
        sys.exit(1)
    except EssnVerifyError as e:
        logger.error('%s: %s', type(e).__name__, e)
        sys.exit(2)


if __name__ == "__main__":
    main()
