# Python Version: 3.x
"""This module computes the per-transaction stamps π, η and ξ over a labeled MVSG.

π(t) is the minimum σ over the transactions reachable from t through back edges (including t itself); η(t) is the maximum σ over single-hop forward predecessors; ξ(t) is the maximum π over the same predecessors. All three are computed in one pass in σ order, since a back edge always points to a σ-smaller transaction and a forward predecessor is always σ-smaller.
"""

import abc
from logging import getLogger
from typing import *

from essn_verify.certifiers.models import Certifier, CertResult, Protocol, TxnVerdict, Verdict
from essn_verify.history.type import TxnId
from essn_verify.mvsg import Edge, Mvsg
from essn_verify.stamp import NEG_INF, Stamp

logger = getLogger(__name__)


class TxnStamps(NamedTuple):
    txn: TxnId
    sigma: Stamp
    pi: Stamp
    eta: Stamp
    xi: Stamp
    back_edge: Optional[Edge]  # first hop towards the transaction that determines π
    eta_edge: Optional[Edge]
    xi_edge: Optional[Edge]


def _edge_order(edge: Edge) -> Tuple[int, int, str, str]:
    return (edge.src, edge.dst, edge.kind.value, edge.key)


class StampEvaluator:
    """StampEvaluator evaluates transactions one by one in σ order.

    The set of excluded transactions may grow between calls; their edges are ignored from then on.
    """
    def __init__(self, g: Mvsg) -> None:
        self.g = g
        self.order: List[TxnId] = sorted(g.nodes, key=g.sigma)
        self.back_out: Dict[TxnId, List[Edge]] = {txn: [] for txn in g.nodes}
        self.forward_in: Dict[TxnId, List[Edge]] = {txn: [] for txn in g.nodes}
        for edge in sorted(g.edges, key=_edge_order):
            if edge.is_back():
                self.back_out[edge.src].append(edge)
            else:
                self.forward_in[edge.dst].append(edge)
        self.stamps: Dict[TxnId, TxnStamps] = {}

    def evaluate(self, txn: TxnId, excluded: AbstractSet[TxnId] = frozenset()) -> TxnStamps:
        sigma = self.g.sigma(txn)
        pi = sigma
        back_edge: Optional[Edge] = None
        for edge in self.back_out[txn]:
            if edge.dst in excluded:
                continue
            candidate = self.stamps[edge.dst].pi
            if candidate < pi:
                pi = candidate
                back_edge = edge
        eta, xi = NEG_INF, NEG_INF
        eta_edge: Optional[Edge] = None
        xi_edge: Optional[Edge] = None
        for edge in self.forward_in[txn]:
            if edge.src in excluded:
                continue
            pred = self.stamps[edge.src]
            if eta_edge is None or pred.sigma > eta:
                eta, eta_edge = pred.sigma, edge
            if xi_edge is None or pred.pi > xi:
                xi, xi_edge = pred.pi, edge
        stamps = TxnStamps(txn=txn, sigma=sigma, pi=pi, eta=eta, xi=xi, back_edge=back_edge, eta_edge=eta_edge, xi_edge=xi_edge)
        self.stamps[txn] = stamps
        return stamps

    def evaluate_all(self) -> Dict[TxnId, TxnStamps]:
        for txn in self.order:
            self.evaluate(txn)
        return self.stamps


def compute_all(g: Mvsg) -> Dict[TxnId, TxnStamps]:
    return StampEvaluator(g).evaluate_all()


def compute_pi(g: Mvsg, t: TxnId) -> Stamp:
    return compute_all(g)[t].pi


def compute_eta(g: Mvsg, t: TxnId) -> Stamp:
    return compute_all(g)[t].eta


def compute_xi(g: Mvsg, t: TxnId) -> Stamp:
    return compute_all(g)[t].xi


class ExclusionCertifier(Certifier):
    """ExclusionCertifier aborts t iff π(t) <= bound(t), where the bound is chosen by the subclass.
    """

    protocol: Protocol

    @abc.abstractmethod
    def bound(self, stamps: TxnStamps) -> Tuple[Stamp, Optional[Edge]]:
        raise NotImplementedError

    def certify(self, g: Mvsg, *, excise: bool = True) -> CertResult:
        evaluator = StampEvaluator(g)
        aborted: Set[TxnId] = set()
        verdicts: Dict[TxnId, TxnVerdict] = {}
        for txn in evaluator.order:
            stamps = evaluator.evaluate(txn, aborted if excise else frozenset())
            if not stamps.sigma.is_finite():
                continue  # the implicit initial transaction
            bound, forward_edge = self.bound(stamps)
            if stamps.pi <= bound:
                assert stamps.back_edge is not None and forward_edge is not None
                verdict = Verdict.ABORT
                witness: Optional[Tuple[Edge, Edge]] = (stamps.back_edge, forward_edge)
                aborted.add(txn)
                logger.debug('%s aborts t%d: pi=%s <= %s', self.protocol.value, txn, stamps.pi, bound)
            else:
                verdict = Verdict.COMMIT
                witness = None
            verdicts[txn] = TxnVerdict(txn=txn, sigma=stamps.sigma, pi=stamps.pi, eta=stamps.eta, xi=stamps.xi, verdict=verdict, witness=witness)
        return CertResult(protocol=self.protocol, verdicts=verdicts)
