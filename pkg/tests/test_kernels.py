import os
import random

import numpy as np
import pytest

from emailnet import kernels
from emailnet.graph_metrics import _csr

from test_graph_metrics import connected_graph

pytestmark = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")
PY, CY = kernels.BACKENDS["python"], kernels.BACKENDS.get("cython")


def test_backend_selection():
    assert kernels.BACKEND == ("python" if os.environ.get("EMAILNET_PURE") else "cython")


def test_use_backend_round_trip():
    prev = kernels.use_backend("python")
    try:
        assert kernels.scan_lane is PY.scan_lane
    finally:
        kernels.use_backend(prev)
    assert kernels.BACKEND == prev


def test_scan_lane_equivalence():
    rng = random.Random(1)
    alphabet = b"ab.-@_Z9 \x00<>"
    for _ in range(2000):
        buf = bytes(rng.choice(alphabet) for _ in range(rng.randint(0, 400)))
        start = rng.randint(0, len(buf))
        last_end = rng.randint(0, start)
        bof, eof = rng.random() < 0.5, rng.random() < 0.5
        assert PY.scan_lane(buf, start, last_end, bof, eof) == CY.scan_lane(buf, start, last_end, bof, eof)


def test_scan_lane_accepts_numpy_units():
    units = np.frombuffer(b"  me@you.org  ", dtype=np.uint8)
    assert PY.scan_lane(units, 0, 0, True, True) == CY.scan_lane(units, 0, 0, True, True) == ([(2, 12)], 14, 12)


def test_window_pairs_equivalence():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(0, 500))
        groups = np.sort(rng.integers(0, 3, n)).astype(np.int64)
        offsets = np.zeros(n, dtype=np.int64)
        for g in range(3):
            sel = groups == g
            offsets[sel] = np.sort(rng.integers(0, 5000, int(sel.sum())))
        addrs = rng.integers(0, 40, n).astype(np.int64)
        w = int(rng.choice([1, 16, 256, 4096]))
        a, b = PY.window_pairs(offsets, groups, addrs, w), CY.window_pairs(offsets, groups, addrs, w)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)


def test_graph_kernels_equivalence():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 40)
        g = connected_graph(rng, n, rng.randint(n - 1, n * (n - 1) // 2))
        _, indptr, indices = _csr(g)
        for x, y in zip(PY.bfs_stats(indptr, indices), CY.bfs_stats(indptr, indices)):
            assert np.array_equal(x, y)
        assert np.allclose(PY.brandes(indptr, indices), CY.brandes(indptr, indices), atol=1e-12, rtol=0)
