"""Finite graph substrate: graphs, orientations, circulations and potentials.

Conventions used throughout the package:

* edges are stored in canonical order, sorted by ``(min, max)``;
* an orientation is one bit per canonical edge, bit 0 meaning "directed
  from the smaller to the larger endpoint id";
* circulations keep one exact rational value per undirected edge,
  interpreted in the low-to-high direction (the reverse direction is its
  negation, so antisymmetry holds by representation).
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import _kernels

Rational = Union[int, Fraction]

SIDE_A = 0
SIDE_B = 1

_SIDE_NAMES = {SIDE_A: "A", SIDE_B: "B"}
_SIDE_CODES = {"A": SIDE_A, "B": SIDE_B, SIDE_A: SIDE_A, SIDE_B: SIDE_B}


class GraphError(ValueError):
    pass


class FiniteGraph:
    """A simple undirected graph with canonical edge order.

    ``bipartition`` is an optional per-vertex side label ("A"/"B" or 0/1);
    when present every edge must cross it.
    """

    def __init__(
        self,
        vertex_count: int,
        edges: Union[Iterable[Sequence[int]], np.ndarray],
        bipartition: Optional[Sequence] = None,
    ):
        if vertex_count < 0:
            raise GraphError("vertex_count must be nonnegative")
        self.vertex_count = int(vertex_count)

        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphError("edges must be pairs of vertex ids")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        if arr.size and (lo.min() < 0 or hi.max() >= self.vertex_count):
            raise GraphError("edge endpoint out of range")
        if np.any(lo == hi):
            raise GraphError("loops are not allowed")
        order = np.lexsort((hi, lo))
        canon = np.column_stack((lo[order], hi[order]))
        if len(canon) > 1:
            dup = np.all(canon[1:] == canon[:-1], axis=1)
            if np.any(dup):
                raise GraphError("parallel edges are not allowed")
        canon.flags.writeable = False
        self._edges = canon

        if bipartition is not None:
            sides = np.asarray([_SIDE_CODES[s] for s in bipartition], dtype=np.uint8)
            if len(sides) != self.vertex_count:
                raise GraphError("bipartition must label every vertex")
            if len(canon) and np.any(sides[canon[:, 0]] == sides[canon[:, 1]]):
                raise GraphError("bipartition violated by an edge")
            sides.flags.writeable = False
            self.sides: Optional[np.ndarray] = sides
        else:
            self.sides = None

    @property
    def edges(self) -> np.ndarray:
        """Canonical (E, 2) edge array, read-only, sorted by (min, max)."""
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def bipartition(self) -> Optional[tuple]:
        if self.sides is None:
            return None
        return tuple(_SIDE_NAMES[int(s)] for s in self.sides)

    def side(self, v: int) -> str:
        if self.sides is None:
            raise GraphError("graph has no bipartition")
        return _SIDE_NAMES[int(self.sides[v])]

    def edge_list(self) -> list:
        return [(int(u), int(v)) for u, v in self._edges]

    @cached_property
    def _csr(self):
        # Undirected CSR: both directions of every edge.
        tails = np.concatenate((self._edges[:, 0], self._edges[:, 1]))
        heads = np.concatenate((self._edges[:, 1], self._edges[:, 0]))
        order = np.argsort(tails, kind="stable")
        indices = heads[order]
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.add.at(indptr, tails + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, indices

    def neighbors(self, v: int) -> list:
        indptr, indices = self._csr
        return [int(x) for x in indices[indptr[v] : indptr[v + 1]]]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        np.add.at(deg, self._edges.ravel(), 1)
        deg.flags.writeable = False
        return deg

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def regularity(self) -> Optional[int]:
        """The common degree d, or None if the graph is not regular."""
        if self.vertex_count == 0:
            return 0
        d = int(self.degrees[0])
        return d if np.all(self.degrees == d) else None

    @cached_property
    def edge_index(self) -> dict:
        """Canonical edge -> position map (intended for small graphs)."""
        return {(int(u), int(v)): i for i, (u, v) in enumerate(self._edges)}

    def edge_position(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.edge_index[key]
        except KeyError:
            raise GraphError(f"({u}, {v}) is not an edge") from None

    def subset_degree_sum(self, a: Iterable[int], b: Iterable[int]) -> int:
        """Sum over x in a of the number of neighbors of x inside b."""
        bset = set(b)
        return sum(1 for x in a for y in self.neighbors(x) if y in bset)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGraph):
            return NotImplemented
        if self.vertex_count != other.vertex_count:
            return False
        if not np.array_equal(self._edges, other._edges):
            return False
        if (self.sides is None) != (other.sides is None):
            return False
        return self.sides is None or np.array_equal(self.sides, other.sides)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        bip = "" if self.sides is None else ", bipartite"
        return f"FiniteGraph({self.vertex_count} vertices, {self.edge_count} edges{bip})"


def make_complete_bipartite(d: int) -> FiniteGraph:
    """K_{d,d} with side A on ids 0..d-1 and side B on ids d..2d-1."""
    if d < 1:
        raise GraphError("d must be a positive integer")
    edges = [(a, d + b) for a in range(d) for b in range(d)]
    sides = [SIDE_A] * d + [SIDE_B] * d
    return FiniteGraph(2 * d, edges, sides)


class Orientation:
    """A direction for every edge, indexable as an integer bitmask.

    Bit i = 0 directs canonical edge i from its smaller to its larger
    endpoint; bit i = 1 reverses it.
    """

    def __init__(self, graph: FiniteGraph, bits: Union[Sequence[int], np.ndarray]):
        self.graph = graph
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.shape != (graph.edge_count,):
            raise GraphError("orientation needs exactly one bit per edge")
        if arr.size and arr.max() > 1:
            raise GraphError("orientation bits must be 0 or 1")
        arr.flags.writeable = False
        self.bits = arr

    @classmethod
    def from_index(cls, graph: FiniteGraph, m: int) -> "Orientation":
        e = graph.edge_count
        if m < 0 or m >= (1 << e):
            raise GraphError(f"orientation index {m} out of range for {e} edges")
        return cls(graph, [(m >> i) & 1 for i in range(e)])

    @property
    def index(self) -> int:
        return sum(int(b) << i for i, b in enumerate(self.bits))

    def head(self, edge_pos: int) -> int:
        """The endpoint the edge at this canonical position points to."""
        u, v = self.graph.edges[edge_pos]
        return int(v) if self.bits[edge_pos] == 0 else int(u)

    def tail(self, edge_pos: int) -> int:
        u, v = self.graph.edges[edge_pos]
        return int(u) if self.bits[edge_pos] == 0 else int(v)

    def reversed(self) -> "Orientation":
        return Orientation(self.graph, 1 - self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Orientation):
            return NotImplemented
        return self.graph is other.graph and np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]


def orientation_by_index(graph: FiniteGraph, m: int) -> Orientation:
    return Orientation.from_index(graph, m)


class Circulation:
    """Antisymmetric edge values, one exact rational per canonical edge.

    The stored value is the flow in the low-to-high direction; constructing
    the object does not enforce zero divergence (see ``is_circulation``).
    """

    def __init__(self, graph: FiniteGraph, values: Sequence[Rational]):
        if len(values) != graph.edge_count:
            raise GraphError("need one value per canonical edge")
        self.graph = graph
        self.values = [v if isinstance(v, (int, Fraction)) else Fraction(v) for v in values]

    @classmethod
    def zero(cls, graph: FiniteGraph) -> "Circulation":
        return cls(graph, [0] * graph.edge_count)

    def value(self, u: int, v: int) -> Rational:
        """The antisymmetric value in the u -> v direction."""
        pos = self.graph.edge_position(u, v)
        return self.values[pos] if u < v else -self.values[pos]

    def l1(self) -> Fraction:
        return Fraction(sum(abs(v) for v in self.values))

    def divergences(self) -> list:
        out = [0] * self.graph.vertex_count
        for (u, v), f in zip(self.graph.edges.tolist(), self.values):
            out[u] += f
            out[v] -= f
        return out

    def __add__(self, other: "Circulation") -> "Circulation":
        if self.graph is not other.graph:
            raise GraphError("mismatched graph reference")
        return Circulation(self.graph, [a + b for a, b in zip(self.values, other.values)])

    def scaled(self, c: Rational) -> "Circulation":
        return Circulation(self.graph, [c * v for v in self.values])


class Potential:
    """An integer labeling of the vertices."""

    def __init__(self, graph: FiniteGraph, values: Union[Sequence[int], np.ndarray]):
        arr = np.asarray(values, dtype=np.int64)
        if arr.shape != (graph.vertex_count,):
            raise GraphError("need one value per vertex")
        arr.flags.writeable = False
        self.graph = graph
        self.values = arr

    def max_edge_step(self) -> int:
        """max |g(x) - g(y)| over edges (0 on edgeless graphs)."""
        e = self.graph.edges
        if not len(e):
            return 0
        return int(np.abs(self.values[e[:, 0]] - self.values[e[:, 1]]).max())


def is_circulation(graph: FiniteGraph, f: Circulation) -> bool:
    """True iff every vertex has exactly zero signed incident sum."""
    if f.graph is not graph:
        raise GraphError("mismatched graph reference")
    return all(d == 0 for d in f.divergences())


def potential_pairing(graph: FiniteGraph, f: Circulation, g: Potential) -> Fraction:
    """Edge-measure pairing of a circulation against a vertex labeling.

    Sums f(x,y) * (g(x) - g(y)) over ordered adjacent pairs, each unordered
    edge weighted once per direction and the total halved.  Exactly zero for
    every circulation.
    """
    if g.graph is not graph:
        raise GraphError("mismatched graph reference")
    if not is_circulation(graph, f):
        raise GraphError("pairing is only defined for circulations")
    gv = g.values.tolist()
    total = sum(
        fe * (gv[u] - gv[v]) for (u, v), fe in zip(graph.edges.tolist(), f.values)
    )
    return Fraction(total)


def _spanning_forest(graph: FiniteGraph):
    """BFS forest: (parent vertex, parent edge position) per vertex, -1 at roots."""
    parent = [-1] * graph.vertex_count
    parent_edge = [-1] * graph.vertex_count
    seen = [False] * graph.vertex_count
    tree_edges = set()
    for root in range(graph.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        while queue:
            x = queue.pop(0)
            for y in graph.neighbors(x):
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    pos = graph.edge_position(x, y)
                    parent_edge[y] = pos
                    tree_edges.add(pos)
                    queue.append(y)
    return parent, parent_edge, tree_edges


def fundamental_cycles(graph: FiniteGraph) -> list:
    """One indicator circulation per non-tree edge of a BFS spanning forest.

    Each entry is a Circulation carrying +-1 around the cycle; together they
    form a basis of the cycle space.
    """
    parent, parent_edge, tree_edges = _spanning_forest(graph)

    def root_path(x):
        path = []
        while parent[x] != -1:
            path.append(x)
            x = parent[x]
        path.append(x)
        return path

    basis = []
    for pos, (u, v) in enumerate(graph.edges):
        if pos in tree_edges:
            continue
        u, v = int(u), int(v)
        pu, pv = root_path(u), root_path(v)
        common = set(pu) & set(pv)
        values = [0] * graph.edge_count
        # Unit flow u -> v across the non-tree edge, returned through the tree.
        values[pos] = 1
        for path, sign in ((pv, 1), (pu, -1)):
            for x in path:
                if x in common:
                    break
                p = parent[x]
                ep = parent_edge[x]
                # flow x -> p with the given sign, stored low-to-high
                step = sign if x < p else -sign
                values[ep] += step
        basis.append(Circulation(graph, values))
    return basis


def random_circulation(graph: FiniteGraph, seed: int, cycle_count: int) -> Circulation:
    """Seeded rational combination of fundamental-cycle indicators.

    Coefficients are rationals in [-1, 1]; the result is a circulation by
    construction and the zero circulation when the cycle space is trivial.
    """
    if cycle_count < 1:
        raise GraphError("cycle_count must be positive")
    basis = fundamental_cycles(graph)
    result = Circulation.zero(graph)
    if not basis:
        return result
    rng = random.Random(seed)
    den = 64
    for _ in range(cycle_count):
        cyc = basis[rng.randrange(len(basis))]
        coeff = Fraction(rng.randint(-den, den), den)
        result = result + cyc.scaled(coeff)
    return result


def max_matching(graph: FiniteGraph) -> frozenset:
    """A maximum matching of a bipartite graph, as a set of (u, v) pairs.

    Perfect (|V|/2 edges) whenever the graph is d-regular bipartite.
    """
    if graph.sides is None:
        raise GraphError("max_matching requires a bipartition")
    indptr, indices = graph._csr
    match = _kernels.hopcroft_karp(graph.vertex_count, indptr, indices, graph.sides)
    return frozenset(
        (v, int(match[v])) for v in range(graph.vertex_count) if 0 <= v < match[v]
    )


def matching_to_circulation(graph: FiniteGraph, matching: frozenset) -> Circulation:
    """The integer circulation carried by a perfect matching.

    In the A -> B direction, matched edges carry d - 1 and unmatched edges
    carry -1; divergence vanishes at every vertex of a d-regular graph.
    """
    if graph.sides is None:
        raise GraphError("matching_to_circulation requires a bipartition")
    d = graph.regularity()
    if d is None:
        raise GraphError("matching_to_circulation requires a regular graph")
    n = graph.vertex_count
    edges = graph.edges
    if matching:
        m = np.asarray([tuple(sorted(e)) for e in matching], dtype=np.int64)
    else:
        m = np.zeros((0, 2), dtype=np.int64)
    covered = np.zeros(n, dtype=np.int64)
    np.add.at(covered, m.ravel(), 1)
    if np.any(covered > 1):
        raise GraphError("matching is not vertex-disjoint")
    if not np.all(covered == 1):
        raise GraphError("matching is not perfect")

    # locate matched pairs among canonical edges (lex order = key order)
    edge_keys = edges[:, 0] * n + edges[:, 1]
    match_keys = np.sort(m[:, 0] * n + m[:, 1])
    pos = np.searchsorted(edge_keys, match_keys)
    if np.any(pos >= len(edge_keys)) or np.any(edge_keys[np.minimum(pos, len(edge_keys) - 1)] != match_keys):
        raise GraphError("matching contains a non-edge")
    is_matched = np.zeros(len(edge_keys), dtype=bool)
    is_matched[pos] = True

    a_to_b = np.where(is_matched, d - 1, -1)
    # stored low-to-high; negate when the low endpoint sits on side B
    values = np.where(graph.sides[edges[:, 0]] == SIDE_A, a_to_b, -a_to_b)
    return Circulation(graph, values.tolist())
