# Python Version: 3.x
from typing import *

from essn_verify.errors import MissingTerminal
from essn_verify.history.index import index_transactions
from essn_verify.history.type import *
from essn_verify.stamp import NEG_INF, Stamp, finite


def make_kto(schedule: MVSchedule, flavor: KtoFlavor) -> Kto:
    """make_kto orders transactions by the positions of their begin or commit events.

    Ranks are dense (1, 2, ...). The implicit initial transaction gets -inf. Aborted transactions are excluded.

    :raises MissingTerminal: for the commit flavor when a transaction is still in flight
    """

    infos = index_transactions(schedule.events)
    positions: List[Tuple[int, TxnId]] = []
    for info in infos.values():
        if info.status == TxnStatus.ABORTED:
            continue
        if flavor == KtoFlavor.COMMIT:
            if info.terminal is None:
                raise MissingTerminal(info.txn)
            positions.append((info.terminal, info.txn))
        elif flavor == KtoFlavor.BEGIN:
            positions.append((info.begin, info.txn))
        else:
            raise ValueError('use make_external_kto() for an external order')
    sigma: Dict[TxnId, Stamp] = {}
    if INITIAL_TXN not in infos:
        sigma[INITIAL_TXN] = NEG_INF
    for rank, (_, txn) in enumerate(sorted(positions), start=1):
        sigma[txn] = finite(rank, txn)
    return Kto(sigma=sigma, flavor=flavor)


def make_external_kto(order: Sequence[TxnId], *, initial_first: bool = True) -> Kto:
    if len(set(order)) != len(order):
        raise ValueError('duplicated transaction in the order: {}'.format(list(order)))
    sigma: Dict[TxnId, Stamp] = {}
    if initial_first and INITIAL_TXN not in order:
        sigma[INITIAL_TXN] = NEG_INF
    for rank, txn in enumerate(order, start=1):
        sigma[txn] = finite(rank, txn)
    return Kto(sigma=sigma, flavor=KtoFlavor.EXTERNAL)
