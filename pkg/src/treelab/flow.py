"""Exact maximum circulation on a directed graph with unit capacities.

Maximizes the total edge flow over circulations f with 0 <= f_e <= 1 on
the given arcs (equivalently: the largest number of arcs coverable by
edge-disjoint directed cycles).  Solved as a min-cost circulation: start
from f = 1 everywhere and repair the vertex imbalances with successive
shortest paths in the residual graph, using integer vertex potentials so
every Dijkstra runs on nonnegative reduced costs.  All arithmetic is on
integers, so the optimum is exact.
"""

from __future__ import annotations

import heapq
from typing import Sequence, Tuple

import numpy as np


class FlowError(RuntimeError):
    pass


def _csr(keys: np.ndarray, n: int):
    order = np.argsort(keys, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, keys + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, order


def max_circulation(n: int, tails: Sequence[int], heads: Sequence[int]) -> int:
    """Max sum of arc flows over unit-capacity circulations; exact integer."""
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    m = len(tails)
    if m == 0:
        return 0
    if len(heads) != m:
        raise FlowError("tails and heads must align")

    f = np.ones(m, dtype=np.int8)
    balance = np.bincount(heads, minlength=n).astype(np.int64) - np.bincount(
        tails, minlength=n
    )
    # residual traversal indices: arcs grouped by head (reduce moves) and
    # by tail (re-increase moves)
    in_ptr, in_arcs = _csr(heads, n)
    out_ptr, out_arcs = _csr(tails, n)
    potential: dict = {}

    def dijkstra(source: int):
        dist = {source: 0}
        prev: dict = {}
        heap = [(0, source)]
        popped = {}
        target = -1
        while heap:
            du, u = heapq.heappop(heap)
            if u in popped:
                continue
            popped[u] = du
            if balance[u] < 0 and u != source:
                target = u
                break
            pu = potential.get(u, 0)
            for a in in_arcs[in_ptr[u] : in_ptr[u + 1]]:
                if f[a] == 1:
                    v = int(tails[a])
                    nd = du + 1 + pu - potential.get(v, 0)
                    if v not in popped and nd < dist.get(v, nd + 1):
                        dist[v] = nd
                        prev[v] = (int(a), -1)
                        heapq.heappush(heap, (nd, v))
            for a in out_arcs[out_ptr[u] : out_ptr[u + 1]]:
                if f[a] == 0:
                    v = int(heads[a])
                    nd = du - 1 + pu - potential.get(v, 0)
                    if v not in popped and nd < dist.get(v, nd + 1):
                        dist[v] = nd
                        prev[v] = (int(a), 1)
                        heapq.heappush(heap, (nd, v))
        return target, popped, prev

    for source in np.flatnonzero(balance > 0):
        source = int(source)
        while balance[source] > 0:
            target, popped, prev = dijkstra(source)
            if target < 0:
                raise FlowError("imbalance cannot be repaired; inputs corrupt")
            d_target = popped[target]
            for u, du in popped.items():
                potential[u] = potential.get(u, 0) + du - d_target
            v = target
            while v != source:
                a, step = prev[v]
                f[a] += step
                # step -1 reached tails[a] coming from heads[a], and vice versa
                v = int(heads[a]) if step == -1 else int(tails[a])
            balance[source] -= 1
            balance[target] += 1

    return int(f.sum())


def is_acyclic(n: int, tails: Sequence[int], heads: Sequence[int]) -> bool:
    """Kahn's algorithm on the arc list."""
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    indeg = np.bincount(heads, minlength=n).astype(np.int64)
    out_ptr, out_arcs = _csr(tails, n)
    stack = [int(v) for v in np.flatnonzero(indeg == 0)]
    removed = 0
    while stack:
        u = stack.pop()
        removed += 1
        for a in out_arcs[out_ptr[u] : out_ptr[u + 1]]:
            w = int(heads[a])
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return removed == n


def orientation_arcs(graph, orientation) -> Tuple[np.ndarray, np.ndarray]:
    """Arc arrays (tails, heads) of an oriented FiniteGraph."""
    edges = graph.edges
    bits = orientation.bits
    tails = np.where(bits == 0, edges[:, 0], edges[:, 1])
    heads = np.where(bits == 0, edges[:, 1], edges[:, 0])
    return tails.astype(np.int64), heads.astype(np.int64)
