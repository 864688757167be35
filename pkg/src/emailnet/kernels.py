"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
module.  Set ``EMAILNET_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None
else:
    BACKENDS["cython"] = _kernels_c

if _kernels_c is not None and not os.environ.get("EMAILNET_PURE"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]

scan_lane = _impl.scan_lane
window_pairs = _impl.window_pairs
bfs_stats = _impl.bfs_stats
brandes = _impl.brandes

DECISION_MARGIN = _kernels_py.DECISION_MARGIN
MAX_ADDRESS_LEN = _kernels_py.MAX_ADDRESS_LEN


def use_backend(name: str) -> str:
    """Switch every kernel to backend ``name``; returns the previous one."""
    global BACKEND, scan_lane, window_pairs, bfs_stats, brandes
    impl = BACKENDS[name]
    previous = BACKEND
    BACKEND = name
    scan_lane, window_pairs = impl.scan_lane, impl.window_pairs
    bfs_stats, brandes = impl.bfs_stats, impl.brandes
    return previous
