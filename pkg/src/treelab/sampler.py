"""Lazy exploration of the tower's inverse-limit object.

A vertex of the limit object is a level-compatible sequence of finite
vertices; this module samples such sequences under the cylinder measure
(uniform at every level, thanks to fiber equality), explores radius-r
balls at a level, and tracks which level-n edges persist upward along a
sampled sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .expansion import (
    ExpandedVertex,
    V0,
    V1,
    neighbors as expansion_neighbors,
    sample_uniform_in_fiber,
)
from .tower import Tower

LevelVertex = Union[int, ExpandedVertex]


class SamplerError(ValueError):
    pass


def _as_code(tower: Tower, n: int, x: LevelVertex) -> ExpandedVertex:
    if isinstance(x, (V1, V0)):
        return x
    return tower.materialized(n).decode(x)


def level_neighbors(tower: Tower, n: int, x: LevelVertex) -> List[LevelVertex]:
    """Neighbor oracle at level n (ids on explicit levels, codes otherwise)."""
    if tower.level(n).kind == "explicit":
        return tower.graph(n).neighbors(x)
    return expansion_neighbors(tower.params(n), x)


def is_v0_vertex(tower: Tower, n: int, x: LevelVertex) -> bool:
    if n == 1:
        return False
    if isinstance(x, (V1, V0)):
        return isinstance(x, V0)
    return tower.materialized(n).is_v0(x)


@dataclass(frozen=True)
class VertexPath:
    """A level-compatible vertex sequence x_1, ..., x_m."""

    tower: Tower
    vertices: Tuple[LevelVertex, ...]

    def __post_init__(self):
        for n in range(2, len(self.vertices) + 1):
            code = _as_code(self.tower, n, self.vertices[n - 1])
            if code.base != self.vertices[n - 2] and not isinstance(
                self.vertices[n - 2], (V1, V0)
            ):
                raise SamplerError(
                    f"path is incompatible between levels {n - 1} and {n}"
                )

    @property
    def depth(self) -> int:
        return len(self.vertices)

    def vertex(self, n: int) -> LevelVertex:
        if not 1 <= n <= self.depth:
            raise SamplerError(f"path has no level {n}")
        return self.vertices[n - 1]


def sample_path(tower: Tower, depth: int, rng: random.Random) -> VertexPath:
    """One draw from the cylinder measure down to the given depth.

    The first coordinate is uniform on level 1; each next coordinate is
    uniform on the projection fiber of the previous one, which by fiber
    equality realizes the product-uniform measure.
    """
    if depth < 1 or depth > tower.depth:
        raise SamplerError(f"depth {depth} outside the tower's 1..{tower.depth}")
    verts: List[LevelVertex] = [rng.randrange(tower.graph(1).vertex_count)]
    for n in range(1, depth):
        params = tower.params(n + 1)
        base = verts[-1]
        if isinstance(base, (V1, V0)):
            raise SamplerError(
                f"level {n} is implicit; paths cannot extend past it"
            )
        code = sample_uniform_in_fiber(params, base, rng)
        if tower.level(n + 1).kind == "explicit":
            verts.append(tower.materialized(n + 1).index_of(code))
        else:
            verts.append(code)
    return VertexPath(tower, tuple(verts))


@dataclass(frozen=True)
class BallReport:
    """The exact induced r-ball of a level graph around a path coordinate."""

    level: int
    radius: int
    root: LevelVertex
    vertices: tuple
    edges: tuple
    v0_flags: tuple
    is_tree: bool
    v0_hit: bool


def ball(tower: Tower, path: VertexPath, n: int, r: int) -> BallReport:
    if r < 0:
        raise SamplerError("radius must be nonnegative")
    root = path.vertex(n)
    dist = {root: 0}
    order = [root]
    frontier = [root]
    depth = 0
    while frontier and depth < r:
        depth += 1
        nxt = []
        for u in frontier:
            for w in level_neighbors(tower, n, u):
                if w not in dist:
                    dist[w] = depth
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    seen = set()
    edges = []
    for u in order:
        for w in level_neighbors(tower, n, u):
            if w in dist:
                key = frozenset((u, w))
                if key not in seen:
                    seen.add(key)
                    edges.append((u, w))
    flags = tuple(is_v0_vertex(tower, n, u) for u in order)
    return BallReport(
        level=n,
        radius=r,
        root=root,
        vertices=tuple(order),
        edges=tuple(edges),
        v0_flags=flags,
        is_tree=len(edges) == len(order) - 1,
        v0_hit=any(flags),
    )


def persistent_neighbors(
    tower: Tower, path: VertexPath, n: int
) -> List[LevelVertex]:
    """Level-n neighbors of the path surviving the lift to the path's depth.

    A neighbor y_n survives to level k + 1 when the path coordinate there
    is a product vertex and the profile shift along the projected edge
    stays inside [1, N]; padding coordinates kill every neighbor.
    """
    x = path.vertex(n)
    survivors = []
    for y in level_neighbors(tower, n, x):
        yk: LevelVertex = y
        alive = True
        for k in range(n, path.depth):
            x_next = _as_code(tower, k + 1, path.vertex(k + 1))
            if isinstance(x_next, V0):
                alive = False
                break
            params = tower.params(k + 1)
            q = params.shifted_profile(x_next.profile, x_next.base, yk)
            if q is None:
                alive = False
                break
            y_next = V1(x_next.slot, yk, q)
            if tower.level(k + 1).kind == "explicit":
                yk = tower.materialized(k + 1).index_of(y_next)
            else:
                yk = y_next
        if alive:
            survivors.append(y)
    return survivors


@dataclass(frozen=True)
class TreeStatsRow:
    """Aggregate ball statistics over seeded samples at one level."""

    level: int
    radius: int
    samples: int
    tree_fraction: Fraction
    v0_hit_fraction: Fraction
    mean_persistent_degree: Fraction
    mean_ball_size: Fraction
    seed: int

    CSV_COLUMNS = (
        "level",
        "radius",
        "samples",
        "tree_fraction",
        "v0_hit_fraction",
        "mean_persistent_degree",
        "seed",
    )

    def csv_values(self) -> tuple:
        return (
            str(self.level),
            str(self.radius),
            str(self.samples),
            f"{float(self.tree_fraction):.6f}",
            f"{float(self.v0_hit_fraction):.6f}",
            f"{float(self.mean_persistent_degree):.6f}",
            str(self.seed),
        )


def tree_stats(
    tower: Tower, n: int, r: int, samples: int, seed: int
) -> TreeStatsRow:
    """Tree-ness, V0 hits and persistent degree over seeded sampled roots."""
    if samples < 1:
        raise SamplerError("samples must be positive")
    trees = 0
    v0_hits = 0
    persistent_total = 0
    ball_total = 0
    for i in range(samples):
        rng = random.Random(f"{seed}:{n}:{r}:{i}")
        path = sample_path(tower, tower.depth, rng)
        b = ball(tower, path, n, r)
        trees += b.is_tree
        v0_hits += b.v0_hit
        ball_total += len(b.vertices)
        persistent_total += len(persistent_neighbors(tower, path, n))
    return TreeStatsRow(
        level=n,
        radius=r,
        samples=samples,
        tree_fraction=Fraction(trees, samples),
        v0_hit_fraction=Fraction(v0_hits, samples),
        mean_persistent_degree=Fraction(persistent_total, samples),
        mean_ball_size=Fraction(ball_total, samples),
        seed=seed,
    )
