# Python Version: 3.x
"""This module has the offline checker that replays a schedule in KTO order with per-key high-water marks.

It never builds the graph. For each key it remembers the committed writers (with their σ and π) and the largest σ and π of any committed reader, which is all that η and ξ need once versions and reads are aligned with the KTO.
"""

from logging import getLogger
from typing import *

from essn_verify.certifiers.models import CertResult, Protocol, TxnVerdict, Verdict
from essn_verify.errors import AlignmentViolation
from essn_verify.history.index import index_transactions
from essn_verify.history.type import *
from essn_verify.mvsg import build_version_order, check_alignment
from essn_verify.stamp import NEG_INF, Stamp

logger = getLogger(__name__)


class _KeyMarks:
    def __init__(self) -> None:
        self.writers: Set[TxnId] = set()
        self.writer_sigma = NEG_INF
        self.writer_pi = NEG_INF
        self.reader_sigma = NEG_INF
        self.reader_pi = NEG_INF


def run_checker(schedule: MVSchedule, kto: Kto, protocol: Union[Protocol, str], *, excise: bool = True) -> CertResult:
    """run_checker evaluates the SSN or ESSN exclusion test for every transaction of the schedule.

    :param excise: a rejected transaction leaves no marks, as at commit time. Otherwise every transaction is judged as if all the others committed.
    :raises AlignmentViolation: when a read or the version order goes against the KTO
    """

    protocol = Protocol(protocol) if isinstance(protocol, str) else protocol
    if protocol == Protocol.SSI:
        raise ValueError('the high-water-mark checker implements SSN and ESSN only')
    vo = build_version_order(schedule, kto)
    alignment = check_alignment(schedule, vo, kto)
    if not (alignment.vf_aligned and alignment.vo_aligned):
        raise AlignmentViolation(alignment.violations)

    infos = index_transactions(schedule.events)
    marks: Dict[str, _KeyMarks] = {key: _KeyMarks() for key in vo.chains}
    pi_of: Dict[TxnId, Stamp] = {INITIAL_TXN: NEG_INF}
    rejected: Set[TxnId] = set()
    verdicts: Dict[TxnId, TxnVerdict] = {}

    for txn in kto.order():
        sigma = kto.sigma[txn]
        info = infos.get(txn)
        if info is None or info.status == TxnStatus.ABORTED:
            continue  # the implicit initial transaction, or a transaction aborted in the schedule itself
        pi, eta, xi = sigma, NEG_INF, NEG_INF
        for _, key, version in info.reads:
            assert version is not None, 'reads must be resolved'
            for writer in vo.successors(key, version):
                if writer in marks[key].writers:
                    pi = min(pi, pi_of[writer])
            if version in rejected:
                continue
            eta = max(eta, kto.sigma[version])
            xi = max(xi, pi_of.get(version, NEG_INF))
        write_keys = set(info.write_keys())
        if txn == INITIAL_TXN:
            write_keys |= {key for key, chain in vo.chains.items() if chain[0] == INITIAL_TXN}
        for key in write_keys:
            eta = max(eta, marks[key].writer_sigma, marks[key].reader_sigma)
            xi = max(xi, marks[key].writer_pi, marks[key].reader_pi)

        bound = xi if protocol == Protocol.ESSN else eta
        verdict = Verdict.ABORT if pi <= bound else Verdict.COMMIT
        verdicts[txn] = TxnVerdict(txn=txn, sigma=sigma, pi=pi, eta=eta, xi=xi, verdict=verdict)
        pi_of[txn] = pi
        if verdict == Verdict.ABORT:
            logger.debug('checker: %s aborts t%d (pi=%s, bound=%s)', protocol.value, txn, pi, bound)
            if excise:
                rejected.add(txn)
                continue
        for key in write_keys:
            marks[key].writers.add(txn)
            marks[key].writer_sigma = max(marks[key].writer_sigma, sigma)
            marks[key].writer_pi = max(marks[key].writer_pi, pi)
        for _, key, _ in info.reads:
            marks[key].reader_sigma = max(marks[key].reader_sigma, sigma)
            marks[key].reader_pi = max(marks[key].reader_pi, pi)
    return CertResult(protocol=protocol, verdicts=verdicts)
