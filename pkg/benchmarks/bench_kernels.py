"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--size-mib 8] [--repeat 3]
"""
import argparse
import random
import time

import numpy as np

from emailnet import kernels
from emailnet.graph_builder import CoRefGraph
from emailnet.graph_metrics import _csr


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def scan_input(size):
    rng = np.random.default_rng(0)
    buf = bytearray(rng.integers(0, 256, size, dtype=np.uint8).tobytes())
    for pos in range(0, size - 64, 4096):
        buf[pos:pos + 20] = b" someone@example.org"
    return bytes(buf)


def pairs_input(n):
    rng = np.random.default_rng(1)
    offsets = np.sort(rng.integers(0, n * 200, n)).astype(np.int64)
    groups = np.zeros(n, dtype=np.int64)
    addrs = rng.integers(0, 5000, n).astype(np.int64)
    return offsets, groups, addrs


def graph_input(n, m):
    rng = random.Random(2)
    g = CoRefGraph({f"n{i}" for i in range(n)})
    for i in range(1, n):
        g.add_edge(f"n{rng.randrange(i)}", f"n{i}")
    while len(g.edges) < m:
        a, b = rng.sample(range(n), 2)
        g.add_edge(f"n{a}", f"n{b}")
    _, indptr, indices = _csr(g)
    return indptr, indices


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size-mib", type=int, default=8)
    ap.add_argument("--records", type=int, default=200_000)
    ap.add_argument("--nodes", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    buf = scan_input(args.size_mib << 20)
    offsets, groups, addrs = pairs_input(args.records)
    indptr, indices = graph_input(args.nodes, args.nodes * 4)
    cases = [
        (f"scan_lane {args.size_mib} MiB", lambda k: k.scan_lane(buf, 0, 0, True, True)),
        (f"window_pairs {args.records} recs", lambda k: k.window_pairs(offsets, groups, addrs, 4096)),
        (f"bfs_stats {args.nodes} nodes", lambda k: k.bfs_stats(indptr, indices)),
        (f"brandes {args.nodes} nodes", lambda k: k.brandes(indptr, indices)),
    ]
    names = sorted(kernels.BACKENDS)
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases:
        t = {n: best_of(args.repeat, lambda: fn(kernels.BACKENDS[n])) for n in names}
        speed = f"{t['python'] / t['cython']:.1f}x" if "cython" in t else "-"
        print(f"{label:<28}" + "".join(f"{t[n]:>11.3f}s" for n in names) + f"{speed:>10}")


if __name__ == "__main__":
    main()
