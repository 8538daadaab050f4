# Python Version: 3.x
"""This module has the Serializable Snapshot Isolation certifier.

SSI aborts on a dangerous structure t_in -rw-> t_pivot -rw-> t_out where both pairs are concurrent and t_out commits first. The victim is the pivot unless the pivot has already committed when t_in commits, then it is t_in. t_in may be t_out itself, which is the write skew. It needs begin and commit positions, so it is only defined for snapshot-isolation histories.
"""

from logging import getLogger
from typing import *

from essn_verify.certifiers.models import Certifier, CertResult, Protocol, TxnVerdict, Verdict
from essn_verify.certifiers.stamps import compute_all
from essn_verify.errors import ProtocolPrecondition
from essn_verify.history.type import TxnId
from essn_verify.mvsg import Edge, EdgeKind, Mvsg

logger = getLogger(__name__)


class SsiCertifier(Certifier):
    protocol = Protocol.SSI

    def certify(self, g: Mvsg, *, excise: bool = True) -> CertResult:
        if g.si_reasons:
            raise ProtocolPrecondition('SSI requires a snapshot-isolation history: {}'.format('; '.join(g.si_reasons)))

        def begin(txn: TxnId) -> float:
            return g.intervals[txn][0]

        def end(txn: TxnId) -> float:
            terminal = g.intervals[txn][1]
            return float('inf') if terminal is None else terminal

        def concurrent(a: TxnId, b: TxnId) -> bool:
            return begin(a) < end(b) and begin(b) < end(a)

        rw_in: Dict[TxnId, List[Edge]] = {txn: [] for txn in g.nodes}
        rw_out: Dict[TxnId, List[Edge]] = {txn: [] for txn in g.nodes}
        for edge in g.sorted_edges():
            if edge.kind == EdgeKind.RW:
                rw_out[edge.src].append(edge)
                rw_in[edge.dst].append(edge)

        aborted: Set[TxnId] = set()

        def dangerous(incoming: Edge, outgoing: Edge) -> bool:
            t_in, pivot, t_out = incoming.src, incoming.dst, outgoing.dst
            if excise and {t_in, pivot, t_out} & aborted:
                return False
            if not (concurrent(t_in, pivot) and concurrent(pivot, t_out)):
                return False
            return end(t_out) < end(pivot) and (t_in == t_out or end(t_out) < end(t_in))

        def find_structure(txn: TxnId) -> Optional[Tuple[Edge, Edge]]:
            # txn as the pivot, committing after t_in
            for incoming in rw_in[txn]:
                if end(incoming.src) < end(txn):
                    for outgoing in rw_out[txn]:
                        if dangerous(incoming, outgoing):
                            return (incoming, outgoing)
            # txn as t_in, committing after the pivot
            for incoming in rw_out[txn]:
                if end(incoming.dst) < end(txn):
                    for outgoing in rw_out[incoming.dst]:
                        if dangerous(incoming, outgoing):
                            return (incoming, outgoing)
            return None

        stamps = compute_all(g)
        verdicts: Dict[TxnId, TxnVerdict] = {}
        for txn in sorted(g.nodes, key=lambda txn: (end(txn), txn)):
            s = stamps[txn]
            if not s.sigma.is_finite():
                continue
            witness = find_structure(txn)
            if witness is not None:
                aborted.add(txn)
                logger.debug('ssi aborts t%d: %s; %s', txn, witness[0], witness[1])
            verdict = Verdict.COMMIT if witness is None else Verdict.ABORT
            verdicts[txn] = TxnVerdict(txn=txn, sigma=s.sigma, pi=s.pi, eta=s.eta, xi=s.xi, verdict=verdict, witness=witness)
        return CertResult(protocol=self.protocol, verdicts=verdicts)
