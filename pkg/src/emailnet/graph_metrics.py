"""Components, structural metrics, centralities and communities.

Path-based measures (diameter, average path length, betweenness, closeness)
count hops and ignore weights.  Eigenvector centrality and modularity use the
co-occurrence weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

from . import kernels
from .graph_builder import CoRefGraph

EIGEN_TOL = 1e-10
EIGEN_MAX_ITER = 10_000
# rounding applied before tie-breaking so float noise cannot reorder equals
_RANK_DIGITS = 12


class EigenvectorConvergenceError(RuntimeError):
    def __init__(self, iterations: int):
        super().__init__(f"eigenvector power iteration did not converge after {iterations} iterations")
        self.iterations = iterations


@dataclass
class Component:
    id: str
    subgraph: CoRefGraph
    rank: int

    @property
    def order(self) -> int:
        return len(self.subgraph.nodes)

    @property
    def size(self) -> int:
        return len(self.subgraph.edges)


class ComponentList(list):
    """Ranked non-singleton components; ``singletons`` counts isolated nodes."""

    def __init__(self, items=(), singletons: int = 0):
        super().__init__(items)
        self.singletons = singletons


@dataclass(frozen=True)
class ComponentMetrics:
    nodes: int
    edges: int
    avg_degree: float
    avg_weighted_degree: float
    diameter: int
    density: float
    modularity: float
    avg_clustering: float
    avg_path_length: float


@dataclass
class CentralityReport:
    eigenvector: list[tuple[str, float]]
    betweenness: list[tuple[str, float]]
    closeness: list[tuple[str, float]]

    def top(self, k: int = 20) -> "CentralityReport":
        return CentralityReport(self.eigenvector[:k], self.betweenness[:k], self.closeness[:k])


@dataclass
class Communities:
    partition: list[list[str]]
    modularity: float
    membership: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.membership:
            self.membership = {n: i for i, part in enumerate(self.partition) for n in part}


@dataclass
class TopK:
    components: list[Component]
    node_coverage: float
    edge_coverage: float


# -- components --------------------------------------------------------------

class UnionFind:
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

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def component_sets(graph: CoRefGraph) -> list[set[str]]:
    """All maximal connected node sets, singletons included, unordered."""
    uf = UnionFind(graph.nodes)
    for a, b in graph.edges:
        uf.union(a, b)
    groups: dict[str, set[str]] = {}
    for n in graph.nodes:
        groups.setdefault(uf.find(n), set()).add(n)
    return list(groups.values())


def connected_components(graph: CoRefGraph, drive_id: str = "d1") -> ComponentList:
    sets = component_sets(graph)
    singletons = sum(1 for s in sets if len(s) == 1)
    multi = sorted((s for s in sets if len(s) > 1), key=lambda s: (-len(s), min(s)))
    # one pass over the edges instead of a subgraph() scan per component
    owner = {n: i for i, s in enumerate(multi) for n in s}
    edge_sets: list[dict] = [{} for _ in multi]
    for key, w in graph.edges.items():
        edge_sets[owner[key[0]]][key] = w
    comps = [
        Component(f"{drive_id}c{i + 1}", CoRefGraph(set(s), edge_sets[i]), i + 1)
        for i, s in enumerate(multi)
    ]
    return ComponentList(comps, singletons)


def top_k(components: Sequence[Component], k: int = 20) -> TopK:
    if k < 1:
        raise ValueError("k must be >= 1")
    chosen = list(components[:k])
    all_nodes = sum(c.order for c in components)
    all_edges = sum(c.size for c in components)
    sel_nodes = sum(c.order for c in chosen)
    sel_edges = sum(c.size for c in chosen)
    node_cov = 100.0 * sel_nodes / all_nodes if all_nodes else 0.0
    edge_cov = 100.0 * sel_edges / all_edges if all_edges else 0.0
    return TopK(chosen, node_cov, edge_cov)


# -- helpers -----------------------------------------------------------------

def _csr(graph: CoRefGraph):
    names = sorted(graph.nodes)
    index = {n: i for i, n in enumerate(names)}
    nbrs: list[list[int]] = [[] for _ in names]
    for a, b in graph.edges:
        ia, ib = index[a], index[b]
        nbrs[ia].append(ib)
        nbrs[ib].append(ia)
    indptr = np.zeros(len(names) + 1, dtype=np.int64)
    for i, lst in enumerate(nbrs):
        lst.sort()
        indptr[i + 1] = indptr[i] + len(lst)
    indices = np.fromiter((j for lst in nbrs for j in lst), dtype=np.int64, count=int(indptr[-1]))
    return names, indptr, indices


def _ranked(names, scores) -> list[tuple[str, float]]:
    pairs = [(n, float(s)) for n, s in zip(names, scores)]
    pairs.sort(key=lambda p: (-round(p[1], _RANK_DIGITS), p[0]))
    return pairs


def path_stats(graph: CoRefGraph) -> tuple[int, float]:
    """(diameter, average shortest-path length) in hops for a connected graph."""
    names, indptr, indices = _csr(graph)
    n = len(names)
    if n < 2:
        return 0, 0.0
    ecc, total, reach = kernels.bfs_stats(indptr, indices)
    if int(reach.min()) != n - 1:
        raise ValueError("graph is not connected")
    return int(ecc.max()), float(total.sum()) / (n * (n - 1))


def average_clustering(graph: CoRefGraph) -> float:
    adj = {n: set() for n in graph.nodes}
    for a, b in graph.edges:
        adj[a].add(b)
        adj[b].add(a)
    if not adj:
        return 0.0
    total = 0.0
    # fixed order: float sums must not depend on set iteration
    for v in sorted(adj):
        nb = adj[v]
        d = len(nb)
        if d < 2:
            continue
        links = sum(len(nb & adj[u]) for u in nb) / 2
        total += 2.0 * links / (d * (d - 1))
    return total / len(adj)


# -- communities -------------------------------------------------------------

def modularity(graph: CoRefGraph, partition: Sequence[Sequence[str]]) -> float:
    m = graph.total_weight()
    if m == 0:
        return 0.0
    member = {n: i for i, part in enumerate(partition) for n in part}
    inside = [0.0] * len(partition)
    degree = [0.0] * len(partition)
    for (a, b), w in graph.edges.items():
        ca, cb = member[a], member[b]
        degree[ca] += w
        degree[cb] += w
        if ca == cb:
            inside[ca] += w
    return sum(inside[c] / m - (degree[c] / (2.0 * m)) ** 2 for c in range(len(partition)))


def _louvain_level(n, adj, self_w, order):
    """One round of local moves; returns the community id of each node."""
    deg = [2.0 * self_w[i] + sum(adj[i].values()) for i in range(n)]
    m2 = sum(deg)
    comm = list(range(n))
    tot = deg[:]
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= deg[i]
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * deg[i] / m2
            for c in sorted(links):
                gain = links[c] - tot[c] * deg[i] / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += deg[i]
            if best != ci:
                comm[i] = best
                improved = True
                moved_any = True
    return comm, moved_any


def detect_communities(component: Component | CoRefGraph) -> Communities:
    """Deterministic Louvain-style greedy modularity maximisation.

    Nodes are visited in lexicographic address order; aggregated nodes in the
    order of their smallest member.  No randomness is involved.
    """
    graph = component.subgraph if isinstance(component, Component) else component
    names = sorted(graph.nodes)
    if not names:
        return Communities([], 0.0)
    if not graph.edges:
        parts = [[n] for n in names]
        return Communities(parts, 0.0)

    index = {n: i for i, n in enumerate(names)}
    groups: list[list[str]] = [[n] for n in names]
    adj: list[dict[int, float]] = [dict() for _ in names]
    for (a, b), w in graph.edges.items():
        ia, ib = index[a], index[b]
        adj[ia][ib] = adj[ia].get(ib, 0.0) + w
        adj[ib][ia] = adj[ib].get(ia, 0.0) + w
    self_w = [0.0] * len(names)

    while True:
        n = len(groups)
        order = sorted(range(n), key=lambda i: min(groups[i]))
        comm, moved = _louvain_level(n, adj, self_w, order)
        if not moved:
            break
        # relabel communities by first appearance in visit order
        relabel: dict[int, int] = {}
        for i in order:
            relabel.setdefault(comm[i], len(relabel))
        k = len(relabel)
        new_groups: list[list[str]] = [[] for _ in range(k)]
        new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
        new_self = [0.0] * k
        for i in range(n):
            c = relabel[comm[i]]
            new_groups[c].extend(groups[i])
            new_self[c] += self_w[i]
            for j, w in adj[i].items():
                d = relabel[comm[j]]
                if c == d:
                    if i < j:
                        new_self[c] += w
                else:
                    new_adj[c][d] = new_adj[c].get(d, 0.0) + w
        groups, adj, self_w = new_groups, new_adj, new_self

    partition = sorted((sorted(g) for g in groups), key=lambda g: g[0])
    q = modularity(graph, partition)
    if q < 0.0:
        # never worse than leaving the component whole
        partition, q = [names], 0.0
    return Communities(partition, q)


# -- metrics -----------------------------------------------------------------

def compute_metrics(component: Component | CoRefGraph, communities: Communities | None = None) -> ComponentMetrics:
    graph = component.subgraph if isinstance(component, Component) else component
    n = len(graph.nodes)
    e = len(graph.edges)
    wsum = graph.total_weight()
    diameter, apl = path_stats(graph)
    if communities is None:
        communities = detect_communities(graph)
    return ComponentMetrics(
        nodes=n,
        edges=e,
        avg_degree=2.0 * e / n if n else 0.0,
        avg_weighted_degree=2.0 * wsum / n if n else 0.0,
        diameter=diameter,
        density=e / (n * (n - 1) / 2.0) if n > 1 else 0.0,
        modularity=communities.modularity,
        avg_clustering=average_clustering(graph),
        avg_path_length=apl,
    )


# -- centralities --------------------------------------------------------------

def eigenvector_scores(graph: CoRefGraph, names=None) -> np.ndarray:
    """Weighted eigenvector centrality, max-normalised.

    Iterates on A + I: same leading eigenvector as A, but no oscillation on
    bipartite graphs.
    """
    names = names or sorted(graph.nodes)
    n = len(names)
    if n == 0:
        return np.zeros(0)
    index = {v: i for i, v in enumerate(names)}
    rows, cols, vals = [], [], []
    for (a, b), w in sorted(graph.edges.items()):
        ia, ib = index[a], index[b]
        rows += [ia, ib]
        cols += [ib, ia]
        vals += [float(w), float(w)]
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)) + sparse.identity(n, format="csr")
    x = np.ones(n)
    for it in range(1, EIGEN_MAX_ITER + 1):
        y = mat @ x
        y /= y.max()
        if np.max(np.abs(y - x)) < EIGEN_TOL:
            return y
        x = y
    # slow spectral gap (long chains): restart from a Lanczos estimate
    x = _lanczos_start(mat, n)
    for it in range(1, EIGEN_MAX_ITER + 1):
        y = mat @ x
        y /= y.max()
        if np.max(np.abs(y - x)) < EIGEN_TOL:
            return y
        x = y
    raise EigenvectorConvergenceError(2 * EIGEN_MAX_ITER)


def _lanczos_start(mat, n):
    if n <= 2:
        vals, vecs = np.linalg.eigh(mat.toarray())
        v = vecs[:, -1]
    else:
        from scipy.sparse.linalg import eigsh

        try:
            _, vecs = eigsh(mat.astype(float), k=1, which="LA", tol=1e-14)
            v = vecs[:, 0]
        except Exception:  # ARPACK hiccup; dense is fine at these sizes
            _, vecs = np.linalg.eigh(mat.toarray())
            v = vecs[:, -1]
    v = np.abs(v)
    return v / v.max()


def centralities(component: Component | CoRefGraph) -> CentralityReport:
    graph = component.subgraph if isinstance(component, Component) else component
    names, indptr, indices = _csr(graph)
    n = len(names)
    if n == 0:
        return CentralityReport([], [], [])
    eig = np.clip(eigenvector_scores(graph, names), 0.0, None)
    raw_bc = kernels.brandes(indptr, indices)
    if n > 2:
        bc = raw_bc / ((n - 1) * (n - 2) / 2.0)
    else:
        bc = np.zeros(n)
    if n > 1:
        _, total, _ = kernels.bfs_stats(indptr, indices)
        clo = np.where(total > 0, (n - 1) / np.maximum(total, 1), 0.0)
    else:
        clo = np.zeros(n)
    return CentralityReport(_ranked(names, eig), _ranked(names, bc), _ranked(names, clo))


def weight_stats(graph: CoRefGraph) -> tuple[float, float]:
    """Mean and population standard deviation of edge weights."""
    if not graph.edges:
        return 0.0, 0.0
    w = np.array([graph.edges[k] for k in sorted(graph.edges)], dtype=np.float64)
    return float(w.mean()), float(w.std())


def degree_skewness(graph: CoRefGraph) -> float:
    """Fisher-Pearson skewness of the unweighted degree sequence."""
    deg = {n: 0 for n in sorted(graph.nodes)}
    for a, b in graph.edges:
        deg[a] += 1
        deg[b] += 1
    d = np.fromiter(deg.values(), dtype=np.float64)
    if d.size < 3:
        return 0.0
    sd = d.std()
    if sd == 0 or math.isclose(sd, 0.0):
        return 0.0
    return float(np.mean((d - d.mean()) ** 3) / sd**3)
