# Python Version: 3.x
"""This module builds the multiversion serialization graph (MVSG) of a schedule.

Given a schedule (which fixes the read-from relation) and a version order, the graph has one node per transaction and wr, ww and rw edges. Each edge is labeled forward or back against a known total order (KTO).
"""

import enum
from logging import getLogger
from typing import *

import networkx as nx

from essn_verify.errors import TraceInvariantError, UnknownVersion
from essn_verify.history.index import index_transactions
from essn_verify.history.kto import make_kto
from essn_verify.history.resolve import check_snapshot_isolation
from essn_verify.history.type import *
from essn_verify.stamp import Stamp

__all__ = [
    'EdgeKind',
    'EdgeLabel',
    'Edge',
    'VersionOrder',
    'Mvsg',
    'AlignmentReport',
    'AntiPivot',
    'build_version_order',
    'build_mvsg',
    'adjacent_reduce',
    'to_networkx',
    'has_cycle',
    'check_alignment',
    'format_graph',
    'anti_pivots',
    'committed_subgraph',
]

logger = getLogger(__name__)


class EdgeKind(enum.Enum):
    WR = 'wr'
    WW = 'ww'
    RW = 'rw'


class EdgeLabel(enum.Enum):
    FORWARD = 'f'
    BACK = 'b'


class Edge(NamedTuple):
    src: TxnId
    dst: TxnId
    kind: EdgeKind
    key: str
    label: EdgeLabel

    def is_forward(self) -> bool:
        return self.label == EdgeLabel.FORWARD

    def is_back(self) -> bool:
        return self.label == EdgeLabel.BACK

    def __str__(self) -> str:
        return '{} {}({}) {} {}'.format(self.src, self.kind.value, self.label.value, self.dst, self.key)


class VersionOrder(NamedTuple):
    chains: Dict[str, Tuple[TxnId, ...]]  # writers per key, oldest first

    def successors(self, key: str, writer: TxnId) -> Tuple[TxnId, ...]:
        chain = self.chains.get(key, (INITIAL_TXN, ))
        if writer not in chain:
            raise UnknownVersion(key, writer)
        return chain[chain.index(writer) + 1:]


class Mvsg(NamedTuple):
    nodes: FrozenSet[TxnId]
    edges: FrozenSet[Edge]
    kto: Kto
    intervals: Dict[TxnId, Tuple[int, Optional[int]]]  # (begin, terminal) positions in the schedule
    si_reasons: Tuple[str, ...]  # empty iff the schedule is a snapshot-isolation history

    def sigma(self, txn: TxnId) -> Stamp:
        return self.kto.sigma[txn]

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value, e.key))


class AlignmentReport(NamedTuple):
    vf_aligned: bool
    vo_aligned: bool
    violations: Tuple[str, ...]


class AntiPivot(NamedTuple):
    reader: TxnId
    key: str
    back_target: TxnId  # the KTO-minimal overwriter preceding the reader
    forward_target: TxnId  # the KTO-minimal overwriter following the reader


def build_version_order(schedule: MVSchedule, alignment: Union[KtoFlavor, Kto]) -> VersionOrder:
    """build_version_order orders the versions of each key by the σ of their writers.

    The base version (writer t0) comes first unless t0 is an explicit transaction that writes the key.
    """

    kto = alignment if isinstance(alignment, Kto) else make_kto(schedule, alignment)
    infos = index_transactions(schedule.events)
    writers: Dict[str, List[TxnId]] = {key: [] for key in schedule.keys}
    for info in infos.values():
        if info.status == TxnStatus.ABORTED:
            continue
        for key in info.write_keys():
            writers[key].append(info.txn)
    chains: Dict[str, Tuple[TxnId, ...]] = {}
    for key, txns in sorted(writers.items()):
        for txn in txns:
            if txn not in kto.sigma:
                raise TraceInvariantError(txn, 'MissingFromKto')
        ordered = sorted(txns, key=lambda txn: kto.sigma[txn])
        if INITIAL_TXN not in ordered:
            ordered.insert(0, INITIAL_TXN)
        chains[key] = tuple(ordered)
    return VersionOrder(chains=chains)


def _label(kto: Kto, src: TxnId, dst: TxnId) -> EdgeLabel:
    return EdgeLabel.FORWARD if kto.sigma[src] < kto.sigma[dst] else EdgeLabel.BACK


def build_mvsg(schedule: MVSchedule, vo: VersionOrder, kto: Kto) -> Mvsg:
    """build_mvsg returns the full (not reduced) graph. Aborted transactions are not nodes.

    :raises UnknownVersion: when a read names a version which is not in the version order
    """

    infos = index_transactions(schedule.events)
    nodes = {info.txn for info in infos.values() if info.status != TxnStatus.ABORTED}
    nodes.add(INITIAL_TXN)
    for txn in nodes:
        if txn not in kto.sigma:
            raise TraceInvariantError(txn, 'MissingFromKto')

    edges: Set[Edge] = set()

    def add(src: TxnId, dst: TxnId, kind: EdgeKind, key: str) -> None:
        if src != dst:
            edges.add(Edge(src=src, dst=dst, kind=kind, key=key, label=_label(kto, src, dst)))

    for txn in sorted(nodes):
        info = infos.get(txn)
        if info is None:
            continue
        for _, key, version in info.reads:
            assert version is not None, 'reads must be resolved'
            if version not in nodes:
                raise UnknownVersion(key, version)
            later = vo.successors(key, version)
            add(version, txn, EdgeKind.WR, key)
            for writer in later:
                add(txn, writer, EdgeKind.RW, key)
    for key, chain in vo.chains.items():
        for i, earlier in enumerate(chain):
            for later in chain[i + 1:]:
                add(earlier, later, EdgeKind.WW, key)

    intervals: Dict[TxnId, Tuple[int, Optional[int]]] = {INITIAL_TXN: (-1, -1)}
    for info in infos.values():
        intervals[info.txn] = (info.begin, info.terminal)
    return Mvsg(nodes=frozenset(nodes), edges=frozenset(edges), kto=kto, intervals=intervals, si_reasons=tuple(check_snapshot_isolation(schedule)))


def adjacent_reduce(g: Mvsg, vo: VersionOrder) -> Mvsg:
    """adjacent_reduce keeps only direct dependencies: every wr edge, ww between VO-adjacent writers, and rw from a reader to the next writer of the version it read.

    The result has a cycle iff the input has one.
    """

    kept: Set[Edge] = set()
    for edge in g.edges:
        if edge.kind == EdgeKind.WR:
            kept.add(edge)
            later = [writer for writer in vo.successors(edge.key, edge.src) if writer in g.nodes]
            if later and later[0] != edge.dst:
                kept.add(Edge(src=edge.dst, dst=later[0], kind=EdgeKind.RW, key=edge.key, label=_label(g.kto, edge.dst, later[0])))
        elif edge.kind == EdgeKind.WW:
            chain = [writer for writer in vo.chains[edge.key] if writer in g.nodes]
            if chain.index(edge.dst) == chain.index(edge.src) + 1:
                kept.add(edge)
    return g._replace(edges=frozenset(kept))


def to_networkx(g: Mvsg) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(g.nodes))
    for edge in g.sorted_edges():
        graph.add_edge(edge.src, edge.dst)
    return graph


def has_cycle(g: Mvsg) -> Optional[List[TxnId]]:
    """has_cycle returns None for an acyclic graph, otherwise a minimal-length cycle.

    The witness starts from its smallest id. Ties between cycles of equal length are broken by the smallest id sequence.
    """

    graph = to_networkx(g)
    if nx.is_directed_acyclic_graph(graph):
        return None
    best: Optional[List[TxnId]] = None
    for start in sorted(graph.nodes):
        paths = nx.single_source_shortest_path(graph, start)
        for last in sorted(graph.predecessors(start)):
            if last not in paths:
                continue
            cycle = list(paths[last])
            if min(cycle) != start:
                continue
            if best is None or (len(cycle), cycle) < (len(best), best):
                best = cycle
    assert best is not None
    return best


def check_alignment(schedule: MVSchedule, vo: VersionOrder, kto: Kto) -> AlignmentReport:
    infos = index_transactions(schedule.events)
    violations: List[str] = []
    vf_aligned = True
    for info in infos.values():
        if info.status == TxnStatus.ABORTED:
            continue
        for _, key, version in info.reads:
            if version is None or version == info.txn:
                continue
            if version not in kto.sigma or not kto.sigma[version] < kto.sigma[info.txn]:
                vf_aligned = False
                violations.append('wr t{}->t{} on {}'.format(version, info.txn, key))
    vo_aligned = True
    for key, chain in sorted(vo.chains.items()):
        for earlier, later in zip(chain, chain[1:]):
            if not kto.sigma[earlier] < kto.sigma[later]:
                vo_aligned = False
                violations.append('vo {}: t{} before t{}'.format(key, earlier, later))
    return AlignmentReport(vf_aligned=vf_aligned, vo_aligned=vo_aligned, violations=tuple(violations))


def format_graph(g: Mvsg) -> str:
    return '\n'.join(map(str, g.sorted_edges()))


def anti_pivots(g: Mvsg) -> List[AntiPivot]:
    """anti_pivots lists, per reader and key, the rw fan-out that lands both before and after the reader in the KTO.
    """

    fan_out: Dict[Tuple[TxnId, str], List[TxnId]] = {}
    for edge in g.edges:
        if edge.kind == EdgeKind.RW:
            fan_out.setdefault((edge.src, edge.key), []).append(edge.dst)
    result = []
    for (reader, key), writers in sorted(fan_out.items()):
        before = [w for w in writers if g.sigma(w) < g.sigma(reader)]
        after = [w for w in writers if g.sigma(reader) < g.sigma(w)]
        if before and after:
            result.append(AntiPivot(reader=reader, key=key, back_target=min(before, key=g.sigma), forward_target=min(after, key=g.sigma)))
    return result


def committed_subgraph(g: Mvsg, aborted: AbstractSet[TxnId]) -> Mvsg:
    nodes = frozenset(txn for txn in g.nodes if txn not in aborted)
    edges = frozenset(edge for edge in g.edges if edge.src in nodes and edge.dst in nodes)
    return g._replace(nodes=nodes, edges=edges)
