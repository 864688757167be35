"""Windowed co-reference graph construction.

Each distinct address becomes a node.  Two occurrences of different addresses
under the same forensic-path base whose offsets differ by less than the
window add one to the weight of the edge between their addresses.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels

DEFAULT_WINDOW = 4096


class UnsortedInputError(ValueError):
    """Records were not sorted by (base, offset)."""


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass
class CoRefGraph:
    nodes: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)

    def add_edge(self, a: str, b: str, weight: int = 1) -> None:
        if a == b:
            raise ValueError(f"self-loop on {a!r}")
        if weight < 1:
            raise ValueError("edge weight must be >= 1")
        self.nodes.add(a)
        self.nodes.add(b)
        key = edge_key(a, b)
        self.edges[key] = self.edges.get(key, 0) + weight

    def weight(self, a: str, b: str) -> int:
        return self.edges.get(edge_key(a, b), 0)

    def adjacency(self) -> dict[str, dict[str, int]]:
        adj: dict[str, dict[str, int]] = {n: {} for n in self.nodes}
        for (a, b), w in self.edges.items():
            adj[a][b] = w
            adj[b][a] = w
        return adj

    def subgraph(self, members: Iterable[str]) -> "CoRefGraph":
        keep = set(members)
        return CoRefGraph(
            set(keep),
            {k: w for k, w in self.edges.items() if k[0] in keep and k[1] in keep},
        )

    def total_weight(self) -> int:
        return sum(self.edges.values())

    def __eq__(self, other):
        if not isinstance(other, CoRefGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges


@dataclass(frozen=True)
class WindowParams:
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if int(self.window) < 1:
            raise ValueError("window must be >= 1")


def check_sorted(records: Sequence) -> None:
    prev = None
    for i, rec in enumerate(records):
        key = (rec.path.base, rec.path.offset)
        if prev is not None and key < prev:
            raise UnsortedInputError(
                f"record {i} at {rec.path.raw} precedes record {i - 1}"
            )
        prev = key


def build_graph(records: Sequence, params: WindowParams | int = DEFAULT_WINDOW) -> CoRefGraph:
    window = params.window if isinstance(params, WindowParams) else int(params)
    if window < 1:
        raise ValueError("window must be >= 1")
    check_sorted(records)
    n = len(records)
    graph = CoRefGraph()
    if n == 0:
        return graph

    addr_ids: dict[str, int] = {}
    base_ids: dict[str, int] = {}
    addrs = []
    groups = []
    offsets = []
    prev_base = None
    pos = prev_off = 0
    for rec in records:
        addrs.append(addr_ids.setdefault(rec.address, len(addr_ids)))
        groups.append(base_ids.setdefault(rec.path.base, len(base_ids)))
        # gaps of W or more never pair, so shrinking them to W keeps the
        # pair set and bounds the coordinates handed to the kernel
        if rec.path.base != prev_base:
            pos = 0
        else:
            pos += min(rec.path.offset - prev_off, window)
        prev_base, prev_off = rec.path.base, rec.path.offset
        offsets.append(pos)
    names = list(addr_ids)
    graph.nodes.update(names)

    if offsets and max(offsets) >= 2**62:
        counts = _pairs_exact(offsets, groups, addrs, window)
        for (a, b), c in sorted(counts.items()):
            graph.edges[edge_key(names[a], names[b])] = c
        return graph
    lo, hi, w = kernels.window_pairs(
        np.asarray(offsets, dtype=np.int64),
        np.asarray(groups, dtype=np.int64),
        np.asarray(addrs, dtype=np.int64),
        min(window, 2**62),
    )
    for a, b, c in zip(lo.tolist(), hi.tolist(), w.tolist()):
        graph.edges[edge_key(names[a], names[b])] = c
    return graph


def _pairs_exact(offsets, groups, addrs, window):
    # arbitrary-precision path for windows too large for int64 coordinates
    counts: dict[tuple[int, int], int] = {}
    n = len(offsets)
    for i in range(n):
        j = i + 1
        while j < n and groups[j] == groups[i] and offsets[j] - offsets[i] < window:
            if addrs[i] != addrs[j]:
                key = (min(addrs[i], addrs[j]), max(addrs[i], addrs[j]))
                counts[key] = counts.get(key, 0) + 1
            j += 1
    return counts


def merge_graphs(g1: CoRefGraph, g2: CoRefGraph) -> CoRefGraph:
    out = CoRefGraph(set(g1.nodes) | g2.nodes, dict(g1.edges))
    for key, w in g2.edges.items():
        out.edges[key] = out.edges.get(key, 0) + w
    return out


def split_points(records: Sequence, window: int) -> list[int]:
    """Indices where the sorted record list can be cut without losing pairs."""
    cuts = []
    for i in range(1, len(records)):
        a, b = records[i - 1].path, records[i].path
        if a.base != b.base or b.offset - a.offset >= window:
            cuts.append(i)
    return cuts
