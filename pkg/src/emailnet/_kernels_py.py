"""Pure-Python implementations of the hot loops.

Semantics must stay identical to ``_kernels.pyx``; the test-suite runs every
oracle against both backends.
"""
from __future__ import annotations

from collections import deque

import numpy as np

MAX_ADDRESS_LEN = 254
# local part can never exceed this: "@" plus the shortest domain "x.yz"
_MAX_LOCAL_LEN = MAX_ADDRESS_LEN - 5
# bytes needed past an "@" before its match can be decided (cap + context)
DECISION_MARGIN = 320

_LOCAL = bytes(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._%+-")
_DOMAIN = bytes(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-")

IS_LOCAL = [False] * 256
IS_DOMAIN = [False] * 256
IS_DOMDOT = [False] * 256
for _c in _LOCAL:
    IS_LOCAL[_c] = True
for _c in _DOMAIN:
    IS_DOMAIN[_c] = True
    IS_DOMDOT[_c] = True
IS_DOMDOT[ord(".")] = True
_DOT = ord(".")


def _valid_domain(dom: bytes) -> bool:
    labels = dom.split(b".")
    if len(labels) < 2:
        return False
    for label in labels:
        if not label:
            return False
    last = labels[-1]
    return 2 <= len(last) <= 63 and last.isalpha()


def scan_lane(buf, start: int, last_end: int, bof: bool, eof: bool):
    """Find email matches in ``buf`` at or after index ``start``.

    Returns ``(matches, stop, last_end)``: matches are ``(start, end)`` index
    pairs; ``stop`` is the index of the first "@" that could not be decided
    because the buffer ends too soon (``len(buf)`` when everything was
    decided).  ``last_end`` is the end of the latest match, carried between
    calls so matches never overlap.
    """
    buf = bytes(buf)
    n = len(buf)
    out = []
    a = buf.find(b"@", start)
    while a != -1:
        if not eof and a + DECISION_MARGIN > n:
            return out, a, last_end
        s = a
        floor = a - _MAX_LOCAL_LEN - 1
        while s > 0 and s > floor and IS_LOCAL[buf[s - 1]]:
            s -= 1
        local_len = a - s
        if (
            local_len == 0
            or local_len > _MAX_LOCAL_LEN
            or (s == 0 and not bof)
            or s < last_end
        ):
            a = buf.find(b"@", a + 1)
            continue
        cap = s + MAX_ADDRESS_LEN
        j = a + 1
        while j < n and j <= cap and IS_DOMDOT[buf[j]]:
            j += 1
        # candidate ends: the run end (if within the cap) and every '.'
        cands = []
        if j <= cap:
            cands.append(j)
        k = min(j, cap + 1) - 1
        while k > a:
            if buf[k] == _DOT:
                cands.append(k)
            k -= 1
        for e in cands:
            if _valid_domain(buf[a + 1:e]):
                out.append((s, e))
                last_end = e
                break
        a = buf.find(b"@", a + 1)
    return out, n, last_end


def window_pairs(offsets, groups, addrs, window: int):
    """Count cross-address occurrence pairs closer than ``window``.

    Inputs are parallel int64 arrays sorted by (group, offset).  Returns
    ``(lo, hi, weight)`` arrays, sorted by (lo, hi), with lo < hi.
    """
    offsets = np.asarray(offsets, dtype=np.int64).tolist()
    groups = np.asarray(groups, dtype=np.int64).tolist()
    addrs = np.asarray(addrs, dtype=np.int64).tolist()
    n = len(offsets)
    counts: dict[tuple[int, int], int] = {}
    for i in range(n):
        gi = groups[i]
        oi = offsets[i]
        ai = addrs[i]
        j = i + 1
        while j < n and groups[j] == gi and offsets[j] - oi < window:
            aj = addrs[j]
            if aj != ai:
                key = (ai, aj) if ai < aj else (aj, ai)
                counts[key] = counts.get(key, 0) + 1
            j += 1
    keys = sorted(counts)
    lo = np.array([k[0] for k in keys], dtype=np.int64)
    hi = np.array([k[1] for k in keys], dtype=np.int64)
    w = np.array([counts[k] for k in keys], dtype=np.int64)
    return lo, hi, w


def bfs_stats(indptr, indices):
    """Per-source eccentricity, distance sum and reach count (hop metric)."""
    indptr = np.asarray(indptr, dtype=np.int64).tolist()
    indices = np.asarray(indices, dtype=np.int64).tolist()
    n = len(indptr) - 1
    ecc = np.zeros(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    reach = np.zeros(n, dtype=np.int64)
    for src in range(n):
        dist = [-1] * n
        dist[src] = 0
        q = deque([src])
        far = 0
        acc = 0
        cnt = 0
        while q:
            v = q.popleft()
            dv = dist[v]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    far = dv + 1
                    acc += dv + 1
                    cnt += 1
                    q.append(w)
        ecc[src] = far
        total[src] = acc
        reach[src] = cnt
    return ecc, total, reach


def brandes(indptr, indices):
    """Unnormalized betweenness over unordered pairs, unweighted hops."""
    indptr = np.asarray(indptr, dtype=np.int64).tolist()
    indices = np.asarray(indices, dtype=np.int64).tolist()
    n = len(indptr) - 1
    bc = [0.0] * n
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was counted from both endpoints
    return np.array(bc, dtype=np.float64) / 2.0
