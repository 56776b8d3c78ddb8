"""Pure-Python / numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or disabled via
``TREELAB_PURE=1``.  The compiled module in ``_core.pyx`` implements the
same two entry points with identical outputs.
"""

from collections import deque

import numpy as np

IMPLEMENTATION = "python"


def expansion_tuple_tables(nv, d, N, K, NK, indptr, indices, deltas, shifts, digits):
    """Per-tuple degree table and slot-0 product edges of an expansion.

    A "tuple" is a (base vertex, profile) pair, identified by
    ``v * NK + rank(profile)``.  ``deltas[t]`` is the per-position profile
    shift of base arc ``t``; ``shifts[t]`` is the same shift applied to the
    profile rank.  ``digits`` is the (NK, K) table of profile coordinates.

    Returns ``(tuple_k, e_tail, e_head)`` where ``tuple_k[tid]`` is the
    number of in-range product neighbors of the tuple, and the edge arrays
    hold one endpoint pair per product edge of slot 0, tail base < head base.
    """
    tuple_k = np.zeros(nv * NK, dtype=np.int64)
    tails = []
    heads = []
    for v in range(nv):
        lo = int(indptr[v])
        hi = int(indptr[v + 1])
        for t in range(lo, hi):
            b = int(indices[t])
            shifted = digits + deltas[t]
            valid = np.all((shifted >= 1) & (shifted <= N), axis=1)
            tuple_k[v * NK : (v + 1) * NK] += valid
            if v < b:
                pranks = np.nonzero(valid)[0].astype(np.int64)
                tails.append(v * NK + pranks)
                heads.append(b * NK + pranks + int(shifts[t]))
    if tails:
        e_tail = np.concatenate(tails)
        e_head = np.concatenate(heads)
    else:
        e_tail = np.zeros(0, dtype=np.int64)
        e_head = np.zeros(0, dtype=np.int64)
    return tuple_k, e_tail, e_head


def hopcroft_karp(n, indptr, indices, side):
    """Maximum matching of a bipartite graph given in CSR form.

    ``side[v]`` is 0 or 1; every edge must join side 0 to side 1.  Returns
    an int64 array ``match`` with ``match[v] = -1`` for unmatched vertices.
    """
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    left = [v for v in range(n) if side[v] == 0]
    match = [-1] * n
    INF = n + 1
    dist = [INF] * n

    def bfs():
        queue = deque()
        for u in left:
            if match[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for i in range(indptr[u], indptr[u + 1]):
                w = match[indices[i]]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root):
        # Iterative alternating-path search from a free left vertex.
        stack = [(root, indptr[root])]
        path = []
        while stack:
            u, i = stack.pop()
            advanced = False
            while i < indptr[u + 1]:
                v = indices[i]
                i += 1
                w = match[v]
                if w == -1:
                    path.append((u, v))
                    for pu, pv in path:
                        match[pu] = pv
                        match[pv] = pu
                    return True
                if dist[w] == dist[u] + 1:
                    stack.append((u, i))
                    path.append((u, v))
                    stack.append((w, indptr[w]))
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                if path:
                    path.pop()
        return False

    while bfs():
        for u in left:
            if match[u] == -1:
                dfs(u)
    return np.asarray(match, dtype=np.int64)
