# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirrors ``_fallback`` exactly; see that module for the contracts.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "compiled"


def expansion_tuple_tables(long long nv, long long d, long long N, long long K,
                           long long NK,
                           const cnp.int64_t[::1] indptr,
                           const cnp.int64_t[::1] indices,
                           const cnp.int32_t[:, ::1] deltas,
                           const cnp.int64_t[::1] shifts,
                           const cnp.int32_t[:, ::1] digits):
    cdef cnp.int64_t[::1] tuple_k = np.zeros(nv * NK, dtype=np.int64)
    cdef long long v, b, t, p, s, m, pos, q
    cdef int ok

    # First pass: per-tuple degrees and the edge count for arcs with v < b.
    m = 0
    for v in range(nv):
        for t in range(indptr[v], indptr[v + 1]):
            b = indices[t]
            for p in range(NK):
                ok = 1
                for s in range(K):
                    q = digits[p, s] + deltas[t, s]
                    if q < 1 or q > N:
                        ok = 0
                        break
                if ok:
                    tuple_k[v * NK + p] += 1
                    if v < b:
                        m += 1

    e_tail_arr = np.empty(m, dtype=np.int64)
    e_head_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] e_tail = e_tail_arr
    cdef cnp.int64_t[::1] e_head = e_head_arr

    pos = 0
    for v in range(nv):
        for t in range(indptr[v], indptr[v + 1]):
            b = indices[t]
            if v >= b:
                continue
            for p in range(NK):
                ok = 1
                for s in range(K):
                    q = digits[p, s] + deltas[t, s]
                    if q < 1 or q > N:
                        ok = 0
                        break
                if ok:
                    e_tail[pos] = v * NK + p
                    e_head[pos] = b * NK + p + shifts[t]
                    pos += 1

    return np.asarray(tuple_k), e_tail_arr, e_head_arr


def hopcroft_karp(long long n,
                  const cnp.int64_t[::1] indptr,
                  const cnp.int64_t[::1] indices,
                  const cnp.uint8_t[::1] side):
    match_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] match = match_arr
    cdef cnp.int64_t[::1] dist = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = np.empty(n, dtype=np.int64)
    # DFS stack frames: vertex and its next CSR cursor; path of (u, v) pairs.
    cdef cnp.int64_t[::1] stack_u = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] stack_i = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] path_u = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] path_v = np.empty(n + 1, dtype=np.int64)

    cdef long long INF = n + 1
    cdef long long u, v, w, i, head, tail, top, plen, root, j
    cdef int found, advanced, augmented

    while True:
        # BFS phase: layer the left side from its free vertices.
        head = 0
        tail = 0
        for u in range(n):
            if side[u] == 0:
                if match[u] == -1:
                    dist[u] = 0
                    queue[tail] = u
                    tail += 1
                else:
                    dist[u] = INF
        found = 0
        while head < tail:
            u = queue[head]
            head += 1
            for i in range(indptr[u], indptr[u + 1]):
                w = match[indices[i]]
                if w == -1:
                    found = 1
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        if not found:
            break

        # DFS phase: vertex-disjoint shortest augmenting paths.
        for root in range(n):
            if side[root] != 0 or match[root] != -1:
                continue
            top = 0
            plen = 0
            stack_u[0] = root
            stack_i[0] = indptr[root]
            top = 1
            augmented = 0
            while top > 0 and not augmented:
                top -= 1
                u = stack_u[top]
                i = stack_i[top]
                advanced = 0
                while i < indptr[u + 1]:
                    v = indices[i]
                    i += 1
                    w = match[v]
                    if w == -1:
                        path_u[plen] = u
                        path_v[plen] = v
                        plen += 1
                        for j in range(plen):
                            match[path_u[j]] = path_v[j]
                            match[path_v[j]] = path_u[j]
                        augmented = 1
                        break
                    if dist[w] == dist[u] + 1:
                        stack_u[top] = u
                        stack_i[top] = i
                        top += 1
                        path_u[plen] = u
                        path_v[plen] = v
                        plen += 1
                        stack_u[top] = w
                        stack_i[top] = indptr[w]
                        top += 1
                        advanced = 1
                        break
                if not advanced and not augmented:
                    dist[u] = INF
                    if plen > 0:
                        plen -= 1

    return match_arr
