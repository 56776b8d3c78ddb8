"""Compare the compiled kernels against the pure-Python fallback.

Run as a script; builds a midsize expansion with both kernel
implementations and times tuple enumeration and maximum matching.
"""

import argparse
import time

import numpy as np

from treelab._kernels import _fallback
from treelab.expansion import ExpansionParams, _delta_arrays, _digit_table
from treelab.graphs import make_complete_bipartite

try:
    from treelab._kernels import _core
except ImportError:
    _core = None


def bench(kernels, params, repeats):
    p = params
    nv = p.base.vertex_count
    indptr, indices, deltas, shifts = _delta_arrays(p)
    digits = _digit_table(p)

    best_tables = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        tuple_k, e_tail, e_head = kernels.expansion_tuple_tables(
            nv, p.d, p.N, p.K, p.NK, indptr, indices, deltas, shifts, digits
        )
        best_tables = min(best_tables, time.perf_counter() - t0)

    # matching benchmark on the product edges alone (bipartite by slot parity
    # is not guaranteed, so run on the full expansion instead)
    from treelab.expansion import materialize

    mat = materialize(p, 1 << 24)
    g = mat.graph
    indptr2, indices2 = g._csr
    best_match = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        match = kernels.hopcroft_karp(g.vertex_count, indptr2, indices2, g.sides)
        best_match = min(best_match, time.perf_counter() - t0)
    matched = int((match >= 0).sum()) // 2
    return best_tables, best_match, len(e_tail), matched


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--N", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    base = make_complete_bipartite(args.d)
    params = ExpansionParams(base, N=args.N)
    print(f"base K_{{{args.d},{args.d}}}, N={args.N}, K={params.K}, "
          f"NK={params.NK}")

    rows = [("python", _fallback)]
    if _core is not None:
        rows.append(("compiled", _core))
    else:
        print("compiled kernels unavailable; benchmarking fallback only")

    results = {}
    for name, mod in rows:
        t_tables, t_match, edges, matched = bench(mod, params, args.repeats)
        results[name] = (t_tables, t_match)
        print(f"{name:>9}: tuple tables {t_tables * 1e3:9.2f} ms "
              f"({edges} product edges), matching {t_match * 1e3:9.2f} ms "
              f"({matched} pairs)")

    if "compiled" in results:
        for i, label in enumerate(("tuple tables", "matching")):
            speedup = results["python"][i] / results["compiled"][i]
            print(f"speedup ({label}): {speedup:.1f}x")


if __name__ == "__main__":
    main()
