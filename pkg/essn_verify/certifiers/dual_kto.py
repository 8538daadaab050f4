# Python Version: 3.x
"""This module runs ESSN against both the begin-ordered and the commit-ordered KTO of a snapshot-isolation history.

A transaction commits if either order admits it.
"""

from logging import getLogger
from typing import *

from essn_verify.certifiers.main import certify
from essn_verify.certifiers.models import Protocol, Verdict
from essn_verify.errors import NotSiHistory
from essn_verify.history.kto import make_kto
from essn_verify.history.resolve import check_snapshot_isolation
from essn_verify.history.type import *
from essn_verify.mvsg import build_mvsg, build_version_order

logger = getLogger(__name__)


def dual_kto_certify(schedule: MVSchedule, *, excise: bool = False) -> Dict[TxnId, Verdict]:
    """
    :raises NotSiHistory:
    """

    reasons = check_snapshot_isolation(schedule)
    if reasons:
        raise NotSiHistory(reasons)
    results = {}
    for flavor in (KtoFlavor.BEGIN, KtoFlavor.COMMIT):
        kto = make_kto(schedule, flavor)
        vo = build_version_order(schedule, kto)
        g = build_mvsg(schedule, vo, kto)
        results[flavor] = certify(g, Protocol.ESSN, excise=excise)
    verdicts: Dict[TxnId, Verdict] = {}
    for txn in results[KtoFlavor.COMMIT].verdicts:
        by_begin = results[KtoFlavor.BEGIN].verdict(txn)
        by_commit = results[KtoFlavor.COMMIT].verdict(txn)
        if by_begin != by_commit:
            logger.debug('t%d: begin-ordered %s, commit-ordered %s', txn, by_begin.value, by_commit.value)
        verdicts[txn] = Verdict.COMMIT if Verdict.COMMIT in (by_begin, by_commit) else Verdict.ABORT
    return verdicts
