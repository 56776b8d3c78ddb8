"""The orientation-product expansion of a regular base graph.

Given a d-regular base graph G, a range size N and a list of orientations
S of G, the expanded graph lives on coded vertices:

* V1 vertices are (slot, base vertex, profile) triples, with the profile a
  vector over S of coordinates in [1, N];
* V0 padding vertices restore d-regularity wherever profile shifts leave
  the [1, N] window.

The graph is represented implicitly (a pure neighbor oracle over coded
vertices) and can be materialized explicitly when its exact vertex count
fits under a caller-supplied limit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .graphs import FiniteGraph, GraphError, Orientation


class ExpansionError(ValueError):
    pass


class MaterializationLimitError(ExpansionError):
    pass


class SamplingDiagnosticError(RuntimeError):
    pass


@dataclass(frozen=True)
class V1:
    """Product vertex: slot in [1, d], base vertex, profile over the subset."""

    slot: int
    base: int
    profile: Tuple[int, ...]


@dataclass(frozen=True)
class V0:
    """Padding vertex attached to all d slots of a deficient tuple."""

    base: int
    profile: Tuple[int, ...]
    pad_index: int


ExpandedVertex = Union[V1, V0]


class ExpansionParams:
    """Immutable parameters of one expansion step.

    ``subset`` lists orientation indices of the base graph (ascending, no
    duplicates); omitting it selects all 2^|E| orientations, which requires
    |E| <= 20.
    """

    MAX_FULL_SUBSET_EDGES = 20

    def __init__(
        self,
        base: FiniteGraph,
        d: Optional[int] = None,
        N: int = 1,
        subset: Optional[Sequence[int]] = None,
    ):
        reg = base.regularity()
        if reg is None:
            raise ExpansionError("base graph must be regular")
        if d is None:
            d = reg
        elif d != reg:
            raise ExpansionError(f"base graph is {reg}-regular, not {d}-regular")
        if d < 1:
            raise ExpansionError("d must be positive")
        if N < 1:
            raise ExpansionError("N must be positive")

        e = base.edge_count
        if subset is None:
            if e > self.MAX_FULL_SUBSET_EDGES:
                raise ExpansionError(
                    f"full orientation subset needs 2^{e} orientations; "
                    f"pass an explicit subset for graphs with more than "
                    f"{self.MAX_FULL_SUBSET_EDGES} edges"
                )
            subset = range(1 << e)
        subset = tuple(int(m) for m in subset)
        if not subset:
            raise ExpansionError("orientation subset must be nonempty")
        if len(set(subset)) != len(subset):
            raise ExpansionError("orientation subset has duplicates")
        for m in subset:
            if m < 0 or m >= (1 << e):
                raise ExpansionError(f"orientation index {m} out of range")

        self.base = base
        self.d = d
        self.N = N
        self.subset = subset
        self.K = len(subset)
        self.NK = N**self.K
        self._delta_cache: dict = {}

    @cached_property
    def weights(self) -> list:
        """Rank weights: profile rank = sum (p_s - 1) * N^(K-1-s)."""
        out = [1] * self.K
        for s in range(self.K - 2, -1, -1):
            out[s] = out[s + 1] * self.N
        return out

    @cached_property
    def _bits(self) -> list:
        # per-position, per-canonical-edge direction bit
        e = self.base.edge_count
        return [[(m >> i) & 1 for i in range(e)] for m in self.subset]

    @property
    def is_full_subset(self) -> bool:
        return self.K == (1 << self.base.edge_count)

    def delta(self, v: int, b: int) -> Tuple[int, ...]:
        """Per-position profile shift along the base arc v -> b.

        +1 where the subset orientation directs the edge toward b, -1 where
        it directs it toward v.
        """
        key = (v, b)
        cached = self._delta_cache.get(key)
        if cached is not None:
            return cached
        pos = self.base.edge_position(v, b)
        toward_high = b > v
        out = tuple(
            1 if (bits[pos] == 0) == toward_high else -1 for bits in self._bits
        )
        self._delta_cache[key] = out
        return out

    def rank_shift(self, v: int, b: int) -> int:
        return sum(dl * w for dl, w in zip(self.delta(v, b), self.weights))

    def profile_rank(self, profile: Sequence[int]) -> int:
        return sum((p - 1) * w for p, w in zip(profile, self.weights))

    def profile_unrank(self, rank: int) -> Tuple[int, ...]:
        out = []
        for w in self.weights:
            out.append(rank // w + 1)
            rank %= w
        return tuple(out)

    def validate_vertex(self, x: ExpandedVertex) -> None:
        if isinstance(x, V1):
            if not 1 <= x.slot <= self.d:
                raise ExpansionError(f"slot {x.slot} out of range")
        elif isinstance(x, V0):
            k = self.tuple_v1_degree(x.base, x.profile)
            if k >= self.d:
                raise ExpansionError("padding vertex of a non-deficient tuple")
            if not 1 <= x.pad_index <= self.d - k:
                raise ExpansionError(f"pad_index {x.pad_index} out of range")
        else:
            raise ExpansionError(f"not an expanded vertex: {x!r}")
        if not 0 <= x.base < self.base.vertex_count:
            raise ExpansionError(f"base vertex {x.base} out of range")
        if len(x.profile) != self.K:
            raise ExpansionError("profile length must match the subset size")
        if any(not 1 <= p <= self.N for p in x.profile):
            raise ExpansionError("profile entry out of [1, N]")

    def shifted_profile(self, profile: Tuple[int, ...], v: int, b: int):
        """The unique candidate profile across the arc v -> b, or None."""
        q = tuple(p + dl for p, dl in zip(profile, self.delta(v, b)))
        if all(1 <= c <= self.N for c in q):
            return q
        return None

    def tuple_v1_degree(self, v: int, profile: Tuple[int, ...]) -> int:
        """Number of in-range product neighbors of the (v, profile) tuple."""
        return sum(
            1 for b in self.base.neighbors(v)
            if self.shifted_profile(profile, v, b) is not None
        )

    def __repr__(self) -> str:
        return (
            f"ExpansionParams(base={self.base!r}, d={self.d}, N={self.N}, "
            f"K={self.K})"
        )


@dataclass(frozen=True)
class ExpansionCounts:
    """Exact vertex counts of an expansion (arbitrary precision)."""

    v1_count: int
    v0_count: int
    total_count: int
    fiber_size: int
    v0_bound_ok: bool  # v0_count < (2K/N) * v1_count


def counts(params: ExpansionParams) -> ExpansionCounts:
    d, N, K = params.d, params.N, params.K
    nv = params.base.vertex_count
    nk = params.NK
    nk1 = (N - 1) ** K
    v1 = d * nv * nk
    fiber = 2 * d * nk - d * nk1
    total = nv * fiber
    v0 = total - v1
    bound_ok = v0 * N < 2 * K * v1
    return ExpansionCounts(v1, v0, total, fiber, bound_ok)


def neighbors(params: ExpansionParams, x: ExpandedVertex) -> List[ExpandedVertex]:
    """The d neighbors of a coded vertex, product neighbors first."""
    params.validate_vertex(x)
    if isinstance(x, V0):
        return [V1(j, x.base, x.profile) for j in range(1, params.d + 1)]
    out: List[ExpandedVertex] = []
    for b in params.base.neighbors(x.base):
        q = params.shifted_profile(x.profile, x.base, b)
        if q is not None:
            out.append(V1(x.slot, b, q))
    k = len(out)
    out.extend(V0(x.base, x.profile, i) for i in range(1, params.d - k + 1))
    return out


def project(params: ExpansionParams, x: ExpandedVertex) -> int:
    params.validate_vertex(x)
    return x.base


def potential_value(params: ExpansionParams, position: int, x: ExpandedVertex) -> int:
    """Profile coordinate at a subset position (shared by V1 and V0)."""
    if not 0 <= position < params.K:
        raise ExpansionError(f"orientation position {position} out of range")
    params.validate_vertex(x)
    return x.profile[position]


def lift_orientation_direction(
    params: ExpansionParams, orientation: Orientation, x: ExpandedVertex, y: ExpandedVertex
) -> ExpandedVertex:
    """The endpoint a lifted V1-V1 edge points to under a base orientation."""
    if orientation.graph is not params.base:
        raise ExpansionError("orientation must live on the base graph")
    if not isinstance(x, V1) or not isinstance(y, V1):
        raise ExpansionError("lift is undefined on V0-incident edges")
    params.validate_vertex(x)
    params.validate_vertex(y)
    try:
        adjacent = (
            x.slot == y.slot
            and params.shifted_profile(x.profile, x.base, y.base) == y.profile
        )
    except GraphError:
        adjacent = False
    if not adjacent:
        raise ExpansionError("not a V1-V1 edge of the expansion")
    pos = params.base.edge_position(x.base, y.base)
    return y if orientation.head(pos) == y.base else x


def _delta_arrays(params: ExpansionParams):
    """CSR-aligned delta matrix and rank shifts for the kernel call."""
    indptr, indices = params.base._csr
    narcs = len(indices)
    deltas = np.empty((narcs, params.K), dtype=np.int32)
    shifts = np.empty(narcs, dtype=np.int64)
    for v in range(params.base.vertex_count):
        for t in range(int(indptr[v]), int(indptr[v + 1])):
            b = int(indices[t])
            deltas[t] = params.delta(v, b)
            shifts[t] = params.rank_shift(v, b)
    return indptr, indices, deltas, shifts


def _digit_table(params: ExpansionParams) -> np.ndarray:
    """(NK, K) table of profile coordinates in [1, N], by profile rank."""
    ranks = np.arange(params.NK, dtype=np.int64)
    table = np.empty((params.NK, params.K), dtype=np.int32)
    for s, w in enumerate(params.weights):
        table[:, s] = (ranks // w) % params.N + 1
    return table


class MaterializedExpansion:
    """An explicit expansion: graph, deterministic codes, projection.

    Vertex numbering is lexicographic over codes with V1 before V0:
    V1 sorted by (slot, base, profile), then V0 by (base, profile, pad).
    """

    def __init__(self, params: ExpansionParams, graph: FiniteGraph,
                 projection: np.ndarray, tuple_k: np.ndarray,
                 v0_tuple: np.ndarray, v0_pad: np.ndarray,
                 digits: np.ndarray):
        self.params = params
        self.graph = graph
        self.projection = projection
        self.tuple_k = tuple_k
        self._v0_tuple = v0_tuple
        self._v0_pad = v0_pad
        self._digits = digits
        nv = params.base.vertex_count
        self.v1_count = params.d * nv * params.NK
        self.v0_count = len(v0_tuple)
        self.total_count = self.v1_count + self.v0_count
        # exclusive prefix of pad counts per deficient tuple, for index_of
        self._def_tuples = np.flatnonzero(tuple_k < params.d)
        pads = params.d - tuple_k[self._def_tuples]
        self._def_starts = np.concatenate(([0], np.cumsum(pads)))

    def is_v0(self, vid: int) -> bool:
        return vid >= self.v1_count

    def decode(self, vid: int) -> ExpandedVertex:
        p = self.params
        nv = p.base.vertex_count
        if vid < 0 or vid >= self.total_count:
            raise ExpansionError(f"vertex id {vid} out of range")
        if vid < self.v1_count:
            slot, rem = divmod(vid, nv * p.NK)
            base, prank = divmod(rem, p.NK)
            return V1(slot + 1, base, p.profile_unrank(prank))
        i = vid - self.v1_count
        tid = int(self._v0_tuple[i])
        base, prank = divmod(tid, p.NK)
        return V0(base, p.profile_unrank(prank), int(self._v0_pad[i]))

    def index_of(self, x: ExpandedVertex) -> int:
        p = self.params
        p.validate_vertex(x)
        nv = p.base.vertex_count
        prank = p.profile_rank(x.profile)
        if isinstance(x, V1):
            return ((x.slot - 1) * nv + x.base) * p.NK + prank
        tid = x.base * p.NK + prank
        j = int(np.searchsorted(self._def_tuples, tid))
        if j >= len(self._def_tuples) or self._def_tuples[j] != tid:
            raise ExpansionError("padding vertex of a non-deficient tuple")
        return self.v1_count + int(self._def_starts[j]) + x.pad_index - 1

    def fiber_sizes(self) -> np.ndarray:
        return np.bincount(self.projection, minlength=self.params.base.vertex_count)

    def potential_array(self, position: int) -> np.ndarray:
        """Per-vertex profile coordinate at a subset position."""
        p = self.params
        if not 0 <= position < p.K:
            raise ExpansionError(f"orientation position {position} out of range")
        col = self._digits[:, position].astype(np.int64)
        v1_part = np.tile(col, p.d * p.base.vertex_count)
        v0_part = col[self._v0_tuple % p.NK]
        return np.concatenate((v1_part, v0_part))

    def slot_array(self) -> np.ndarray:
        """Per-vertex slot for V1 ids, 0 for V0 ids."""
        p = self.params
        nv = p.base.vertex_count
        v1 = np.repeat(np.arange(1, p.d + 1, dtype=np.int64), nv * p.NK)
        return np.concatenate((v1, np.zeros(self.v0_count, dtype=np.int64)))

    def pad_array(self) -> np.ndarray:
        """Per-vertex pad index for V0 ids, 0 for V1 ids."""
        return np.concatenate(
            (np.zeros(self.v1_count, dtype=np.int64), self._v0_pad.astype(np.int64))
        )

    def codes(self):
        for vid in range(self.total_count):
            yield self.decode(vid)


def materialize(params: ExpansionParams, limit: int) -> MaterializedExpansion:
    """Explicit construction; refuses when total_count exceeds the limit."""
    c = counts(params)
    if c.total_count > limit:
        raise MaterializationLimitError(
            f"expansion has exactly {c.total_count} vertices, "
            f"over the materialization limit {limit}"
        )
    p = params
    nv = p.base.vertex_count
    nk = p.NK
    indptr, indices, deltas, shifts = _delta_arrays(p)
    digits = _digit_table(p)
    tuple_k, e_tail, e_head = _kernels.expansion_tuple_tables(
        nv, p.d, p.N, p.K, nk, indptr, indices, deltas, shifts, digits
    )

    v1_count = p.d * nv * nk
    block = nv * nk
    tails = [e_tail + j * block for j in range(p.d)]
    heads = [e_head + j * block for j in range(p.d)]

    def_tuples = np.flatnonzero(tuple_k < p.d)
    pads = (p.d - tuple_k[def_tuples]).astype(np.int64)
    v0_count = int(pads.sum())
    v0_tuple = np.repeat(def_tuples, pads)
    starts = np.concatenate(([0], np.cumsum(pads)[:-1]))
    v0_pad = (np.arange(v0_count, dtype=np.int64) - np.repeat(starts, pads)) + 1
    v0_ids = v1_count + np.arange(v0_count, dtype=np.int64)
    for j in range(p.d):
        tails.append(j * block + v0_tuple)
        heads.append(v0_ids)

    tail = np.concatenate(tails)
    head = np.concatenate(heads)
    edges = np.column_stack((tail, head))

    sides = None
    if p.base.sides is not None:
        base_sides = p.base.sides.astype(np.uint8)
        v1_sides = np.tile(np.repeat(base_sides, nk), p.d)
        v0_sides = 1 - base_sides[v0_tuple // nk]
        sides = np.concatenate((v1_sides, v0_sides))

    graph = FiniteGraph(v1_count + v0_count, edges, sides)
    v1_proj = np.tile(np.repeat(np.arange(nv, dtype=np.int64), nk), p.d)
    projection = np.concatenate((v1_proj, v0_tuple // nk))
    projection.flags.writeable = False
    return MaterializedExpansion(p, graph, projection, tuple_k, v0_tuple, v0_pad, digits)


def _draw_profile(params: ExpansionParams, rng: random.Random) -> Tuple[int, ...]:
    return tuple(rng.randint(1, params.N) for _ in range(params.K))


REJECTION_CAP_FACTOR = 64


def _sample_v0(params: ExpansionParams, base: Optional[int], rng: random.Random) -> V0:
    d = params.d
    for _ in range(REJECTION_CAP_FACTOR * d):
        v = base if base is not None else rng.randrange(params.base.vertex_count)
        profile = _draw_profile(params, rng)
        k = params.tuple_v1_degree(v, profile)
        if rng.randrange(d) < d - k:
            return V0(v, profile, 1 + rng.randrange(d - k))
    raise SamplingDiagnosticError(
        f"V0 rejection sampler exceeded {REJECTION_CAP_FACTOR * d} iterations; "
        "the V0 fraction of these parameters is vanishingly small"
    )


def sample_uniform_vertex(params: ExpansionParams, rng: random.Random) -> ExpandedVertex:
    """Exactly uniform over all coded vertices of the expansion."""
    c = counts(params)
    if rng.randrange(c.total_count) < c.v1_count:
        return V1(
            rng.randint(1, params.d),
            rng.randrange(params.base.vertex_count),
            _draw_profile(params, rng),
        )
    return _sample_v0(params, None, rng)


def sample_uniform_in_fiber(
    params: ExpansionParams, a: int, rng: random.Random
) -> ExpandedVertex:
    """Exactly uniform over the projection fiber of base vertex a."""
    if not 0 <= a < params.base.vertex_count:
        raise ExpansionError(f"base vertex {a} out of range")
    c = counts(params)
    v1_fiber = params.d * params.NK
    if rng.randrange(c.fiber_size) < v1_fiber:
        return V1(rng.randint(1, params.d), a, _draw_profile(params, rng))
    return _sample_v0(params, a, rng)
