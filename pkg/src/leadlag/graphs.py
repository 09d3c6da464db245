"""Filtered dependency graphs over the complex correlation matrix.

Edges are ranked by correlation magnitude; the spanning tree keeps the
strongest backbone and the planar filter keeps three times more edges
while staying drawable without crossings.  Orientation comes from the
correlation phases: the leader points at the follower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import networkx as nx
import numpy as np

from .errors import InputError, NumericalError
from .estimator import ComplexCorrelationMatrix, magnitude_phase

THETA_SYM_DEFAULT = 0.01
BIN_SMALL_EDGE = math.pi / 4
BIN_OPPOSITE_EDGE = 3 * math.pi / 4
BIN_COLORS = {"small": "black", "quarter": "red", "opposite": "orange"}


@dataclass(frozen=True)
class Edge:
    """One graph edge; theta is the phase from ``a`` to ``b``."""

    a: str
    b: str
    s: float
    theta: float
    bin: str
    bidirectional: bool = False


@dataclass(frozen=True)
class FilteredGraph:
    kind: str
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    oriented: bool = False
    theta_sym: float = THETA_SYM_DEFAULT

    @property
    def n(self) -> int:
        return len(self.nodes)

    def edge_pairs(self) -> set[frozenset]:
        return {frozenset((e.a, e.b)) for e in self.edges}


def classify_phase_bins(theta: float, small_edge: float = BIN_SMALL_EDGE,
                        opposite_edge: float = BIN_OPPOSITE_EDGE) -> str:
    """Bin a phase by |theta|: small, quarter, or opposite."""
    mag = abs(theta)
    if mag < small_edge:
        return "small"
    if mag < opposite_edge:
        return "quarter"
    return "opposite"


def _candidate_edges(rho: ComplexCorrelationMatrix) -> list[tuple]:
    """Upper-triangle pairs sorted by magnitude descending.

    Ties break on the lexicographic ticker pair, which makes every graph
    built from the same matrix identical across runs and platforms.
    """
    s, theta = magnitude_phase(rho.values)
    out = []
    for i in range(rho.n):
        for j in range(i + 1, rho.n):
            a, b = rho.assets[i], rho.assets[j]
            lo, hi = (a, b) if a <= b else (b, a)
            # theta is stored for the (lo, hi) direction
            th = theta[rho.index_of(lo), rho.index_of(hi)]
            out.append((float(s[i, j]), lo, hi, float(th)))
    out.sort(key=lambda r: (-r[0], r[1], r[2]))
    return out


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


def max_spanning_tree(rho: ComplexCorrelationMatrix) -> FilteredGraph:
    """Kruskal over magnitudes, descending; n-1 edges."""
    if rho.n < 2:
        raise InputError(f"spanning tree needs at least 2 assets, have {rho.n}")
    uf = _UnionFind(rho.assets)
    edges = []
    for s, a, b, theta in _candidate_edges(rho):
        if uf.union(a, b):
            edges.append(Edge(a, b, s, theta, classify_phase_bins(theta)))
            if len(edges) == rho.n - 1:
                break
    return FilteredGraph("mst", rho.assets, tuple(edges))


def pmfg(rho: ComplexCorrelationMatrix) -> FilteredGraph:
    """Greedy planar filter: add edges by descending magnitude while the
    graph stays planar, stopping at 3(n-2) edges.

    Every component-joining edge keeps planarity, so the spanning tree
    edge set always survives the filter.
    """
    if rho.n < 3:
        raise InputError(f"planar filter needs at least 3 assets, have {rho.n}")
    limit = 3 * (rho.n - 2)
    g = nx.Graph()
    g.add_nodes_from(rho.assets)
    edges = []
    for s, a, b, theta in _candidate_edges(rho):
        g.add_edge(a, b)
        ok, _ = nx.check_planarity(g, counterexample=False)
        if not ok:
            g.remove_edge(a, b)
            continue
        edges.append(Edge(a, b, s, theta, classify_phase_bins(theta)))
        if len(edges) == limit:
            break
    graph = FilteredGraph("pmfg", rho.assets, tuple(edges))
    if not planar_certificate(graph):
        raise NumericalError("planar filter produced a non-planar edge set")
    return graph


def planar_certificate(graph: FilteredGraph) -> bool:
    """Independent planarity verification through Euler's formula.

    Builds a combinatorial embedding, counts its faces by walking every
    half-edge exactly once, and checks V - E + F = 1 + C (C connected
    components).  A rotation system satisfying this has genus zero, so
    the check certifies planarity without trusting the filter's own
    accept/reject decisions.
    """
    g = nx.Graph()
    g.add_nodes_from(graph.nodes)
    g.add_edges_from((e.a, e.b) for e in graph.edges)
    ok, embedding = nx.check_planarity(g, counterexample=False)
    if not ok:
        return False
    visited = set()
    faces = 0
    for u, v in embedding.edges():
        if (u, v) in visited:
            continue
        embedding.traverse_face(u, v, mark_half_edges=visited)
        faces += 1
    v_count = g.number_of_nodes()
    e_count = g.number_of_edges()
    components = nx.number_connected_components(g)
    if e_count == 0:
        return True
    return v_count - e_count + faces == 1 + components


def orient_edges(graph: FilteredGraph, rho: ComplexCorrelationMatrix,
                 theta_sym: float = THETA_SYM_DEFAULT) -> FilteredGraph:
    """Point every edge from the leader to the follower.

    theta_ab < 0 means a's moves show up in b later, so the edge runs
    a -> b.  Phases within theta_sym of zero are marked bidirectional
    and kept in lexicographic order.
    """
    if theta_sym < 0:
        raise InputError(f"theta_sym must be >= 0, got {theta_sym}")
    _, theta_all = magnitude_phase(rho.values)
    out = []
    for e in graph.edges:
        ia, ib = rho.index_of(e.a), rho.index_of(e.b)
        theta = float(theta_all[ia, ib])
        if abs(theta) < theta_sym:
            a, b = (e.a, e.b) if e.a <= e.b else (e.b, e.a)
            th = float(theta_all[rho.index_of(a), rho.index_of(b)])
            out.append(replace(e, a=a, b=b, theta=th, bidirectional=True))
        elif theta < 0:
            out.append(replace(e, a=e.a, b=e.b, theta=theta, bidirectional=False))
        else:
            out.append(replace(e, a=e.b, b=e.a, theta=-theta, bidirectional=False))
    return FilteredGraph(graph.kind, graph.nodes, tuple(out), oriented=True,
                         theta_sym=theta_sym)


@dataclass(frozen=True)
class DegreeRow:
    node: str
    in_degree: int
    out_degree: int
    total: int
    sector: str


def degree_report(graph: FilteredGraph, sectors=None) -> list[DegreeRow]:
    """Per-node degree counts; bidirectional edges count toward both.

    ``total`` is the plain incident-edge count, so for a node with
    bidirectional edges in + out exceeds total.
    """
    if not graph.oriented:
        raise InputError("degree report needs an oriented graph")
    ins = {n: 0 for n in graph.nodes}
    outs = {n: 0 for n in graph.nodes}
    tot = {n: 0 for n in graph.nodes}
    for e in graph.edges:
        tot[e.a] += 1
        tot[e.b] += 1
        if e.bidirectional:
            for x in (e.a, e.b):
                ins[x] += 1
                outs[x] += 1
        else:
            outs[e.a] += 1
            ins[e.b] += 1
    lookup = _sector_of(sectors)
    return [DegreeRow(n, ins[n], outs[n], tot[n], lookup(n)) for n in graph.nodes]


@dataclass(frozen=True)
class ScatterRow:
    a: str
    b: str
    s: float
    theta: float
    same_sector: bool | None


def magnitude_phase_scatter(rho: ComplexCorrelationMatrix,
                            sectors=None) -> list[ScatterRow]:
    """All upper-triangle pairs as (s, theta) rows with a same-sector flag."""
    s, theta = magnitude_phase(rho.values)
    lookup = _sector_of(sectors) if sectors is not None else None
    rows = []
    for i in range(rho.n):
        for j in range(i + 1, rho.n):
            a, b = rho.assets[i], rho.assets[j]
            same = None
            if lookup is not None:
                same = lookup(a) == lookup(b)
            rows.append(ScatterRow(a, b, float(s[i, j]), float(theta[i, j]), same))
    return rows


def _sector_of(sectors):
    if sectors is None:
        return lambda asset: ""
    if hasattr(sectors, "sector"):
        return sectors.sector
    if hasattr(sectors, "get"):
        def lookup(asset):
            entry = sectors.get(asset)
            if entry is None:
                return "UNKNOWN"
            if isinstance(entry, str):
                return entry
            return entry[-1]
        return lookup
    raise InputError(f"unsupported sector table type {type(sectors)!r}")
