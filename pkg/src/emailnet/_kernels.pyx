# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot loops.  Mirrors ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.string cimport memchr
from libc.stdint cimport int64_t, uint8_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref, preincrement as inc

cnp.import_array()

cdef enum:
    MAX_ADDRESS_LEN = 254
    MAX_LOCAL_LEN = 249
    DECISION_MARGIN = 320

cdef uint8_t IS_LOCAL[256]
cdef uint8_t IS_DOMAIN[256]
cdef uint8_t IS_ALPHA[256]


cdef void _init_tables():
    cdef int c
    for c in range(256):
        IS_LOCAL[c] = 0
        IS_DOMAIN[c] = 0
        IS_ALPHA[c] = 0
    for c in range(ord('A'), ord('Z') + 1):
        IS_LOCAL[c] = 1
        IS_DOMAIN[c] = 1
        IS_ALPHA[c] = 1
    for c in range(ord('a'), ord('z') + 1):
        IS_LOCAL[c] = 1
        IS_DOMAIN[c] = 1
        IS_ALPHA[c] = 1
    for c in range(ord('0'), ord('9') + 1):
        IS_LOCAL[c] = 1
        IS_DOMAIN[c] = 1
    IS_DOMAIN[ord('-')] = 1
    for c in b"._%+-":
        IS_LOCAL[c] = 1


_init_tables()


cdef bint _valid_domain(const uint8_t* p, Py_ssize_t lo, Py_ssize_t hi) nogil:
    # p[lo:hi] consists of domain chars and dots only
    cdef Py_ssize_t i, label_start = lo, labels = 0
    if hi <= lo:
        return False
    for i in range(lo, hi + 1):
        if i == hi or p[i] == 46:
            if i == label_start:
                return False
            labels += 1
            if i == hi:
                break
            label_start = i + 1
    if labels < 2:
        return False
    if hi - label_start < 2 or hi - label_start > 63:
        return False
    for i in range(label_start, hi):
        if not IS_ALPHA[p[i]]:
            return False
    return True


def scan_lane(buf, Py_ssize_t start, Py_ssize_t last_end, bint bof, bint eof):
    cdef const uint8_t[::1] view = memoryview(buf).cast("B")
    cdef Py_ssize_t n = view.shape[0]
    cdef const uint8_t* p
    cdef const uint8_t* hit
    cdef Py_ssize_t a, s, floor, local_len, cap, j, k, e
    cdef bint found
    out = []
    if n == 0 or start >= n:
        return out, n, last_end
    p = &view[0]
    a = start
    while a < n:
        hit = <const uint8_t*> memchr(p + a, 64, n - a)
        if hit == NULL:
            break
        a = hit - p
        if not eof and a + DECISION_MARGIN > n:
            return out, a, last_end
        s = a
        floor = a - MAX_LOCAL_LEN - 1
        while s > 0 and s > floor and IS_LOCAL[p[s - 1]]:
            s -= 1
        local_len = a - s
        if local_len == 0 or local_len > MAX_LOCAL_LEN or (s == 0 and not bof) or s < last_end:
            a += 1
            continue
        cap = s + MAX_ADDRESS_LEN
        j = a + 1
        while j < n and j <= cap and (IS_DOMAIN[p[j]] or p[j] == 46):
            j += 1
        found = False
        if j <= cap and _valid_domain(p, a + 1, j):
            found = True
            e = j
        else:
            k = (j if j < cap + 1 else cap + 1) - 1
            while k > a:
                if p[k] == 46 and _valid_domain(p, a + 1, k):
                    found = True
                    e = k
                    break
                k -= 1
        if found:
            out.append((s, e))
            last_end = e
        a += 1
    return out, n, last_end


def window_pairs(offsets, groups, addrs, int64_t window):
    cdef const int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int64_t[::1] grp = np.ascontiguousarray(groups, dtype=np.int64)
    cdef const int64_t[::1] adr = np.ascontiguousarray(addrs, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0], i, j
    cdef int64_t ai, aj, gi, oi, stride = 0
    cdef unordered_map[int64_t, int64_t] counts
    cdef unordered_map[int64_t, int64_t].iterator it
    for i in range(n):
        if adr[i] + 1 > stride:
            stride = adr[i] + 1
    with nogil:
        for i in range(n):
            gi = grp[i]
            oi = off[i]
            ai = adr[i]
            j = i + 1
            while j < n and grp[j] == gi and off[j] - oi < window:
                aj = adr[j]
                if aj != ai:
                    if ai < aj:
                        counts[ai * stride + aj] += 1
                    else:
                        counts[aj * stride + ai] += 1
                j += 1
    m = counts.size()
    keys = np.empty(m, dtype=np.int64)
    vals = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] kv = keys
    cdef int64_t[::1] vv = vals
    it = counts.begin()
    i = 0
    while it != counts.end():
        kv[i] = deref(it).first
        vv[i] = deref(it).second
        i += 1
        inc(it)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    if stride == 0:
        return keys, keys.copy(), vals
    return keys // stride, keys % stride, vals


def bfs_stats(indptr, indices):
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    ecc_a = np.zeros(n, dtype=np.int64)
    tot_a = np.zeros(n, dtype=np.int64)
    rch_a = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] ecc = ecc_a
    cdef int64_t[::1] tot = tot_a
    cdef int64_t[::1] rch = rch_a
    cdef vector[int64_t] dist
    cdef vector[int64_t] queue
    cdef Py_ssize_t src, head, q, v, w
    cdef int64_t dv, far, acc, cnt
    if n <= 0:
        return ecc_a, tot_a, rch_a
    dist.resize(n)
    queue.resize(n)
    with nogil:
        for src in range(n):
            for v in range(n):
                dist[v] = -1
            dist[src] = 0
            head = 0
            q = 1
            queue[0] = src
            far = 0
            acc = 0
            cnt = 0
            while head < q:
                v = queue[head]
                head += 1
                dv = dist[v]
                for w in range(ip[v], ip[v + 1]):
                    if dist[ix[w]] < 0:
                        dist[ix[w]] = dv + 1
                        far = dv + 1
                        acc += dv + 1
                        cnt += 1
                        queue[q] = ix[w]
                        q += 1
            ecc[src] = far
            tot[src] = acc
            rch[src] = cnt
    return ecc_a, tot_a, rch_a


def brandes(indptr, indices):
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    bc_a = np.zeros(max(n, 0), dtype=np.float64)
    cdef double[::1] bc = bc_a
    cdef vector[int64_t] dist
    cdef vector[double] sigma
    cdef vector[double] delta
    cdef vector[int64_t] order
    cdef Py_ssize_t s, head, q, v, w, p, idx
    if n <= 0:
        return bc_a
    dist.resize(n)
    sigma.resize(n)
    delta.resize(n)
    order.resize(n)
    with nogil:
        for s in range(n):
            for v in range(n):
                dist[v] = -1
                sigma[v] = 0.0
                delta[v] = 0.0
            dist[s] = 0
            sigma[s] = 1.0
            order[0] = s
            head = 0
            q = 1
            while head < q:
                v = order[head]
                head += 1
                for p in range(ip[v], ip[v + 1]):
                    w = ix[p]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        order[q] = w
                        q += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
            # predecessors are recovered from distances instead of stored lists
            idx = q - 1
            while idx >= 0:
                w = order[idx]
                for p in range(ip[w], ip[w + 1]):
                    v = ix[p]
                    if dist[v] == dist[w] - 1:
                        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
                if w != s:
                    bc[w] += delta[w]
                idx -= 1
    for v in range(n):
        bc[v] = bc[v] / 2.0
    return bc_a
