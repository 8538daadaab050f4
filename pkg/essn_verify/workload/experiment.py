# Python Version: 3.x
"""This module runs the abort-rate experiment over a grid of workload parameters.

Every generated schedule is judged by SSN and by ESSN, so the two rates in a cell always come from the same schedules.
"""

import concurrent.futures
import csv
from logging import getLogger
from typing import *

import numpy as np
from tabulate import tabulate

from essn_verify.certifiers.models import Protocol, Verdict
from essn_verify.errors import InfeasibleParams
from essn_verify.history.kto import make_kto
from essn_verify.history.resolve import resolve_reads
from essn_verify.history.type import KtoFlavor, RfPolicy
from essn_verify.workload.checker import run_checker
from essn_verify.workload.generator import FIRST_SHORT, T1, T2, generate_mixed
from essn_verify.workload.type import *

logger = getLogger(__name__)

CSV_COLUMNS = ('rf_policy', 'pivot_prob', 'short_hit_prob', 'protocol', 'role', 'trials', 'aborts', 'abort_rate')


def make_grid(rf_policies: Sequence[RfPolicy] = GRID_POLICIES, pivot_probs: Sequence[float] = GRID_PROBS, short_hit_probs: Sequence[float] = GRID_PROBS) -> List[Cell]:
    cells = []
    for policy in rf_policies:
        for pivot in pivot_probs:
            for hit in short_hit_probs:
                cells.append(Cell(index=len(cells), rf_policy=policy, pivot_prob=pivot, short_hit_prob=hit))
    return cells


def run_cell(params: WorkloadParams, cell: Cell, *, excise: bool = False) -> CellResult:
    params = params._replace(rf_policy=cell.rf_policy, pivot_prob=cell.pivot_prob, short_hit_prob=cell.short_hit_prob)
    aborts = {(protocol, role): 0 for protocol in (Protocol.SSN, Protocol.ESSN) for role in ROLES}
    r3 = 0
    for repeat in range(params.repeats):
        rng = np.random.default_rng(np.random.SeedSequence([params.seed, cell.index, repeat]))
        schedule = resolve_reads(generate_mixed(params, rng), params.rf_policy)
        kto = make_kto(schedule, KtoFlavor.COMMIT)
        results = {protocol: run_checker(schedule, kto, protocol, excise=excise) for protocol in (Protocol.SSN, Protocol.ESSN)}
        for protocol, result in results.items():
            aborted = result.aborted()
            aborts[(protocol, 't1_long_ro')] += T1 in aborted
            aborts[(protocol, 't2_long_rw')] += T2 in aborted
            aborts[(protocol, 'shorts')] += sum(1 for txn in aborted if txn >= FIRST_SHORT)
        if not results[Protocol.ESSN].aborted() <= results[Protocol.SSN].aborted():
            logger.warning('cell %d repeat %d: ESSN aborts %s which SSN commits', cell.index, repeat, sorted(results[Protocol.ESSN].aborted() - results[Protocol.SSN].aborted()))
        essn = results[Protocol.ESSN].verdicts
        if results[Protocol.SSN].verdict(T2) == Verdict.ABORT and essn[T2].verdict == Verdict.COMMIT and essn[T2].xi == essn[T1].pi:
            r3 += 1
    rows = []
    for protocol in (Protocol.SSN, Protocol.ESSN):
        for role in ROLES:
            trials = params.repeats * (params.n_shorts if role == 'shorts' else 1)
            rows.append(ExperimentRow(rf_policy=cell.rf_policy, pivot_prob=cell.pivot_prob, short_hit_prob=cell.short_hit_prob, protocol=protocol, role=role, trials=trials, aborts=aborts[(protocol, role)]))
    logger.debug('cell %d done: %s', cell.index, cell.key())
    return CellResult(cell=cell, rows=rows, r3=r3)


def run_experiment(params: WorkloadParams, *, rf_policies: Sequence[RfPolicy] = GRID_POLICIES, pivot_probs: Sequence[float] = GRID_PROBS, short_hit_probs: Sequence[float] = GRID_PROBS, jobs: int = 1, excise: bool = False) -> ExperimentReport:
    """run_experiment evaluates params.repeats schedules per grid cell under the commit-ordered KTO.

    :raises InfeasibleParams:
    """

    params.validate()
    if params.kto_flavor != KtoFlavor.COMMIT:
        raise InfeasibleParams('the experiment runs under the commit-ordered KTO only')
    for policy in rf_policies:
        if policy not in GRID_POLICIES:
            raise InfeasibleParams('{} does not yield reads aligned with the commit-ordered KTO'.format(policy.value))
    cells = make_grid(rf_policies, pivot_probs, short_hit_probs)
    logger.info('run %d cells x %d repeats with %d jobs', len(cells), params.repeats, jobs)
    results: List[CellResult] = []
    if jobs <= 1:
        for cell in cells:
            results.append(run_cell(params, cell, excise=excise))
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(run_cell, params, cell, excise=excise) for cell in cells]
            for future in futures:
                results.append(future.result())
    results.sort(key=lambda result: result.cell.index)
    rows = [row for result in results for row in result.rows]
    return ExperimentReport(rows=rows, r3={result.cell.key(): result.r3 for result in results})


def write_csv(rows: Iterable[ExperimentRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([row.rf_policy.value, row.pivot_prob, row.short_hit_prob, row.protocol.value, row.role, row.trials, row.aborts, '{:.4f}'.format(row.abort_rate)])


def _average_gap(report: ExperimentReport, policy: RfPolicy) -> Tuple[float, float]:
    keys = [key for key in report.cells() if key[0] == policy]
    ssn = sum(report.rate(key, Protocol.SSN) for key in keys) / len(keys)
    essn = sum(report.rate(key, Protocol.ESSN) for key in keys) / len(keys)
    return ssn, essn


def format_summary(report: ExperimentReport) -> str:
    table = []
    for key in report.cells():
        ssn = report.rate(key, Protocol.SSN)
        essn = report.rate(key, Protocol.ESSN)
        table.append([key[0].value, key[1], key[2], ssn, essn, ssn - essn, report.r3.get(key, 0)])
    lines = [tabulate(table, headers=['rf_policy', 'pivot', 'hit', 'ssn t2', 'essn t2', 'gain', 'r3'], floatfmt='.2f')]
    for policy in sorted({key[0] for key in report.cells()}, key=lambda policy: policy.value):
        ssn, essn = _average_gap(report, policy)
        lines.append('{}: average t2 abort rate ssn={:.3f} essn={:.3f} gain={:.3f}'.format(policy.value, ssn, essn, ssn - essn))
    return '\n'.join(lines)


def check_trends(report: ExperimentReport, *, tolerance: float = 0.05, min_gap: float = 0.05, min_reduction: float = 0.25, min_max_gap: float = 0.15) -> List[str]:
    """check_trends returns the expected trends which do not hold on this report.

    They are only expected on the default grid with the default workload. The CLI logs them as warnings.
    """

    problems = []
    keys = report.cells()
    for key in keys:
        ssn, essn = report.rate(key, Protocol.SSN), report.rate(key, Protocol.ESSN)
        if essn > ssn:
            problems.append('{} pivot={} hit={}: essn t2 rate {:.2f} exceeds ssn {:.2f}'.format(key[0].value, key[1], key[2], essn, ssn))
    policies = {key[0] for key in keys}
    if RfPolicy.AS_OF_READ_COMMIT in policies:
        for pivot in sorted({key[1] for key in keys}):
            series = [report.rate(key, Protocol.SSN) for key in keys if key[0] == RfPolicy.AS_OF_READ_COMMIT and key[1] == pivot]
            for lower, higher in zip(series, series[1:]):
                if higher + tolerance < lower:
                    problems.append('as_of_read_commit pivot={}: ssn t2 rate drops from {:.2f} to {:.2f} as hit grows'.format(pivot, lower, higher))
                    break
    if RfPolicy.SNAPSHOT_AT_BEGIN in policies:
        pivots = sorted({key[1] for key in keys if key[0] == RfPolicy.SNAPSHOT_AT_BEGIN})

        def gain_at(pivot: float) -> float:
            cell_keys = [key for key in keys if key[0] == RfPolicy.SNAPSHOT_AT_BEGIN and key[1] == pivot]
            return sum(report.rate(key, Protocol.SSN) - report.rate(key, Protocol.ESSN) for key in cell_keys) / len(cell_keys)

        if len(pivots) >= 2 and gain_at(pivots[-1]) + tolerance < gain_at(pivots[0]):
            problems.append('snapshot_at_begin: gain at pivot={} is below gain at pivot={}'.format(pivots[-1], pivots[0]))
        ssn, essn = _average_gap(report, RfPolicy.SNAPSHOT_AT_BEGIN)
        if ssn - essn < min_gap:
            problems.append('snapshot_at_begin: average gain {:.3f} is below {:.2f}'.format(ssn - essn, min_gap))
        elif (ssn - essn) / ssn < min_reduction:
            problems.append('snapshot_at_begin: average reduction {:.0%} is below {:.0%}'.format((ssn - essn) / ssn, min_reduction))
    if keys:
        max_gap = max(report.rate(key, Protocol.SSN) - report.rate(key, Protocol.ESSN) for key in keys)
        if max_gap < min_max_gap:
            problems.append('largest gain over the grid {:.2f} is below {:.2f}'.format(max_gap, min_max_gap))
    if policies >= set(GRID_POLICIES):
        as_of, _ = _average_gap(report, RfPolicy.AS_OF_READ_COMMIT)
        snapshot, _ = _average_gap(report, RfPolicy.SNAPSHOT_AT_BEGIN)
        if as_of <= snapshot:
            problems.append('as_of_read_commit average t2 rate {:.3f} does not exceed snapshot_at_begin {:.3f}'.format(as_of, snapshot))
    return problems
