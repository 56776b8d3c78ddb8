"""Recursive expansion towers with exact and symbolic size accounting.

Level 1 is the complete bipartite graph K_{d,d}; each later level is the
expansion of the previous one.  Two schedules exist:

* ``paper``: N_n = 2^(n+1) * 2^(edge count of level n), full orientation
  subset — the sizes explode doubly exponentially, so only counts (exact
  when representable, symbolic otherwise) are produced past small depths;
* ``desk``: explicit per-level N and orientation-subset choices, small
  enough to materialize and verify exhaustively.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .expansion import (
    ExpansionCounts,
    ExpansionError,
    ExpansionParams,
    MaterializedExpansion,
    counts as expansion_counts,
    materialize,
)
from .graphs import FiniteGraph, make_complete_bipartite

DEFAULT_LIMIT = 1 << 22

# Largest bit length at which "exact" integers are still kept.
MAX_EXACT_BITS = 2_000_000


class TowerError(ValueError):
    pass


def _log2_int(n: int) -> float:
    if n <= 0:
        raise ValueError("log2 of a nonpositive integer")
    bits = n.bit_length()
    if bits <= 900:
        return math.log2(n)
    top = n >> (bits - 64)
    return (bits - 64) + math.log2(top)


class SymbolicSize:
    """An exact arbitrary-precision integer, or a log2 approximation.

    ``exact`` is None once a value outgrows MAX_EXACT_BITS; ``log2`` is a
    float approximation when finite; ``log2_log2`` takes over when even the
    log2 value overflows a float (doubly exponential sizes).
    """

    __slots__ = ("exact", "log2", "log2_log2")

    def __init__(self, exact: Optional[int], log2: Optional[float],
                 log2_log2: Optional[float] = None):
        self.exact = exact
        self.log2 = log2
        self.log2_log2 = log2_log2

    @classmethod
    def of(cls, n: Union[int, "SymbolicSize"]) -> "SymbolicSize":
        if isinstance(n, SymbolicSize):
            return n
        if n < 0:
            raise ValueError("sizes are nonnegative")
        if n == 0:
            return cls(0, None)
        exact = n if n.bit_length() <= MAX_EXACT_BITS else None
        return cls(exact, _log2_int(n))

    def __add__(self, other) -> "SymbolicSize":
        other = SymbolicSize.of(other)
        if self.exact is not None and other.exact is not None:
            return SymbolicSize.of(self.exact + other.exact)
        if self.log2 is not None and other.log2 is not None:
            hi, lo = max(self.log2, other.log2), min(self.log2, other.log2)
            bump = math.log2(1 + 2 ** (lo - hi)) if lo - hi > -60 else 0.0
            return SymbolicSize(None, hi + bump)
        return SymbolicSize(None, None, max(
            x for x in (self.log2_log2, other.log2_log2,
                        _flog2(self.log2), _flog2(other.log2))
            if x is not None
        ))

    def subtract(self, other) -> "SymbolicSize":
        """Difference; degrades to the minuend when only logs are known."""
        other = SymbolicSize.of(other)
        if self.exact is not None and other.exact is not None:
            return SymbolicSize.of(self.exact - other.exact)
        if self.log2 is not None and other.log2 is not None:
            gap = other.log2 - self.log2
            if gap >= 0:
                raise ValueError("symbolic subtraction went nonpositive")
            drop = math.log2(1 - 2**gap) if gap > -60 else 0.0
            return SymbolicSize(None, self.log2 + drop)
        # astronomical regime: the difference is within a factor 2 of self
        return SymbolicSize(None, self.log2, self.log2_log2)

    def __mul__(self, other) -> "SymbolicSize":
        other = SymbolicSize.of(other)
        if (
            self.exact is not None
            and other.exact is not None
            and self.exact.bit_length() + other.exact.bit_length() <= MAX_EXACT_BITS
        ):
            return SymbolicSize.of(self.exact * other.exact)
        if self.log2 is not None and other.log2 is not None:
            return SymbolicSize(None, self.log2 + other.log2)
        ll = [x for x in (self.log2_log2, _flog2(self.log2),
                          other.log2_log2, _flog2(other.log2)) if x is not None]
        hi, lo = max(ll), min(ll)
        bump = math.log2(1 + 2 ** (lo - hi)) if lo - hi > -60 else 0.0
        return SymbolicSize(None, None, hi + bump)

    def power(self, exponent: "SymbolicSize") -> "SymbolicSize":
        exponent = SymbolicSize.of(exponent)
        base_log2 = self.log2
        if base_log2 is None:
            raise ValueError("power of an astronomical base is not supported")
        if (
            self.exact is not None
            and exponent.exact is not None
            and exponent.exact * self.exact.bit_length() <= MAX_EXACT_BITS
        ):
            return SymbolicSize.of(self.exact**exponent.exact)
        if exponent.log2 is not None and exponent.log2 < 1000:
            e_float = (
                float(exponent.exact)
                if exponent.exact is not None and exponent.exact.bit_length() < 1000
                else 2.0**exponent.log2
            )
            result_log2 = e_float * base_log2
            if result_log2 < 1e308:
                return SymbolicSize(None, result_log2)
        # log2(result) = exponent * log2(base), itself astronomical
        e_ll = exponent.log2 if exponent.log2 is not None else exponent.log2_log2
        return SymbolicSize(None, None, e_ll + _flog2(base_log2))

    def describe(self) -> str:
        if self.exact is not None and self.exact.bit_length() <= 128:
            return str(self.exact)
        if self.log2 is not None:
            return f"~2^{self.log2:.6g}"
        return f"~2^2^{self.log2_log2:.6g}"

    def as_json(self) -> dict:
        return {
            "exact": str(self.exact) if self.exact is not None else None,
            "log2": self.log2,
            "log2_log2": self.log2_log2,
        }

    def __repr__(self) -> str:
        return f"SymbolicSize({self.describe()})"


def _flog2(x: Optional[float]) -> Optional[float]:
    if x is None or x <= 0:
        return None
    return math.log2(x)


@dataclass(frozen=True)
class SubsetRule:
    """Orientation-subset choice for one expansion step."""

    kind: str  # "all" | "random"
    size: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("all", "random"):
            raise TowerError(f"unknown subset rule {self.kind!r}")
        if self.kind == "random" and (self.size is None or self.size < 1):
            raise TowerError("random subset rule needs a positive size")

    def resolve(self, edge_count: int) -> Optional[Tuple[int, ...]]:
        """Concrete orientation indices, or None meaning "all"."""
        if self.kind == "all":
            return None
        total = 1 << edge_count
        if self.size > total:
            raise TowerError(
                f"subset size {self.size} exceeds {total} orientations"
            )
        rng = random.Random(self.seed)
        return tuple(sorted(rng.sample(range(total), self.size)))


ALL = SubsetRule("all")


@dataclass(frozen=True)
class LevelSpec:
    N: int
    subset: SubsetRule = ALL

    def __post_init__(self):
        if self.N < 1:
            raise TowerError("desk N must be at least 1")


@dataclass(frozen=True)
class Schedule:
    mode: str  # "paper" | "desk"
    levels: Tuple[LevelSpec, ...] = ()

    def __post_init__(self):
        if self.mode not in ("paper", "desk"):
            raise TowerError(f"unknown schedule mode {self.mode!r}")

    @staticmethod
    def paper() -> "Schedule":
        return Schedule("paper")

    @staticmethod
    def desk(specs: Sequence[LevelSpec]) -> "Schedule":
        return Schedule("desk", tuple(specs))

    def spec_for_step(self, n: int, edge_count_exact: Optional[int]) -> LevelSpec:
        """Expansion parameters for the step from level n to level n + 1."""
        if self.mode == "desk":
            if n > len(self.levels):
                raise TowerError(f"desk schedule has no step {n}")
            return self.levels[n - 1]
        if edge_count_exact is None:
            raise TowerError("paper N is symbolic at this level")
        if edge_count_exact > MAX_EXACT_BITS:
            raise TowerError("paper N is too large to represent exactly")
        return LevelSpec(2 ** (n + 1) * 2**edge_count_exact, ALL)


@dataclass
class TowerLevel:
    """One tower level; graphs and materializations are attached lazily."""

    n: int
    kind: str  # "explicit" | "implicit" | "symbolic"
    size: SymbolicSize
    edge_count: SymbolicSize
    params: Optional[ExpansionParams] = None  # step from level n-1, for n >= 2
    counts: Optional[ExpansionCounts] = None  # exact, when representable
    N: Optional[SymbolicSize] = None
    K: Optional[SymbolicSize] = None
    graph: Optional[FiniteGraph] = None
    materialized: Optional[MaterializedExpansion] = None


class Tower:
    """A lazily evaluated sequence of expansion levels."""

    def __init__(self, d: int, schedule: Schedule, depth: int,
                 limit: int = DEFAULT_LIMIT):
        if depth < 1:
            raise TowerError("depth must be at least 1")
        if d < 1:
            raise TowerError("d must be positive")
        self.d = d
        self.schedule = schedule
        self.depth = depth
        self.limit = limit
        self.levels: List[TowerLevel] = []
        self._build()

    def _build(self):
        d = self.d
        base = make_complete_bipartite(d)
        first = TowerLevel(
            1,
            "explicit",
            SymbolicSize.of(2 * d),
            SymbolicSize.of(d * d),
            graph=base,
        )
        self.levels.append(first)
        for n in range(2, self.depth + 1):
            self.levels.append(self._next_level(self.levels[-1]))

    def _next_level(self, prev: TowerLevel) -> TowerLevel:
        n = prev.n
        d = self.d
        edge_exact = prev.edge_count.exact
        if prev.kind == "explicit":
            spec = self.schedule.spec_for_step(n, edge_exact)
            subset = spec.subset.resolve(edge_exact)
            params = ExpansionParams(self.graph(n), d=d, N=spec.N, subset=subset)
            k = params.K
            exact_ok = k * max(1, spec.N.bit_length()) <= MAX_EXACT_BITS
            if exact_ok:
                c = expansion_counts(params)
                kind = "explicit" if c.total_count <= self.limit else "implicit"
                return TowerLevel(
                    n + 1,
                    kind,
                    SymbolicSize.of(c.total_count),
                    SymbolicSize.of(c.total_count * d // 2),
                    params=params,
                    counts=c,
                    N=SymbolicSize.of(spec.N),
                    K=SymbolicSize.of(k),
                )
            size, n_sym, k_sym = self._symbolic_size(
                prev.size, SymbolicSize.of(spec.N), SymbolicSize.of(k)
            )
            return TowerLevel(
                n + 1, "implicit", size, self._edge_sym(size),
                params=params, N=n_sym, K=k_sym,
            )
        # beyond the last explicit level only symbolic accounting remains
        if self.schedule.mode == "desk":
            raise TowerError(
                f"desk schedule demands explicit level {n + 1}, but level {n} "
                f"could not be materialized (size {prev.size.describe()})"
            )
        two = SymbolicSize.of(2)
        k_sym = two.power(prev.edge_count)
        n_sym = SymbolicSize.of(2 ** (n + 1)) * k_sym
        size, n_sym, k_sym = self._symbolic_size(prev.size, n_sym, k_sym)
        return TowerLevel(n + 1, "symbolic", size, self._edge_sym(size),
                          N=n_sym, K=k_sym)

    def _symbolic_size(self, prev_size: SymbolicSize, n_sym: SymbolicSize,
                       k_sym: SymbolicSize):
        d = self.d
        nk = n_sym.power(k_sym)
        fiber_hi = SymbolicSize.of(2 * d) * nk
        sub = (
            SymbolicSize.of(d) * n_sym.subtract(1).power(k_sym)
            if (n_sym.exact is None or n_sym.exact > 1)
            else SymbolicSize.of(0)
        )
        fiber = fiber_hi.subtract(sub)
        return prev_size * fiber, n_sym, k_sym

    def _edge_sym(self, size: SymbolicSize) -> SymbolicSize:
        if size.exact is not None:
            return SymbolicSize.of(size.exact * self.d // 2)
        half_d = self.d / 2
        if size.log2 is not None:
            return SymbolicSize(None, size.log2 + math.log2(half_d))
        return SymbolicSize(None, None, size.log2_log2)

    def level(self, n: int) -> TowerLevel:
        if not 1 <= n <= self.depth:
            raise TowerError(f"level {n} outside 1..{self.depth}")
        return self.levels[n - 1]

    def graph(self, n: int) -> FiniteGraph:
        lvl = self.level(n)
        if lvl.kind != "explicit":
            raise TowerError(
                f"level {n} is {lvl.kind}; its exact size is "
                f"{lvl.size.describe()}"
            )
        if lvl.graph is None:
            lvl.materialized = materialize(lvl.params, self.limit)
            lvl.graph = lvl.materialized.graph
        return lvl.graph

    def materialized(self, n: int) -> MaterializedExpansion:
        if n < 2:
            raise TowerError("level 1 is the base graph, not an expansion")
        self.graph(n)
        return self.level(n).materialized

    def params(self, n: int) -> ExpansionParams:
        """Expansion parameters producing level n from level n - 1."""
        lvl = self.level(n)
        if lvl.params is None:
            raise TowerError(f"level {n} has no representable parameters")
        return lvl.params

    def report(self) -> dict:
        out = {"d": self.d, "mode": self.schedule.mode, "depth": self.depth,
               "levels": []}
        for lvl in self.levels:
            entry = {
                "level": lvl.n,
                "kind": lvl.kind,
                "size": lvl.size.as_json(),
                "edges": lvl.edge_count.as_json(),
            }
            if lvl.N is not None:
                entry["N"] = lvl.N.as_json()
                entry["K"] = lvl.K.as_json()
            if lvl.n >= 2:
                frac = v0_fraction(self, lvl.n - 1)
                entry["v0_fraction"] = {
                    "value": str(frac.value),
                    "exact": frac.exact,
                    "below_2^-n": frac.below_threshold,
                }
            out["levels"].append(entry)
        return out


def build_tower(d: int, schedule: Schedule, depth: int,
                limit: int = DEFAULT_LIMIT) -> Tower:
    return Tower(d, schedule, depth, limit)


@dataclass(frozen=True)
class V0FractionResult:
    """Share of padding vertices at level n + 1 under the uniform measure."""

    value: Fraction
    exact: bool  # False means `value` is a certified upper bound
    below_threshold: bool  # value < 2^-n, decided exactly


def v0_fraction(tower: Tower, n: int) -> V0FractionResult:
    """nu(V0) of level n + 1: exact when counts are, else a certified bound."""
    lvl = tower.level(n + 1)
    if lvl.counts is not None:
        c = lvl.counts
        value = Fraction(c.v0_count, c.total_count)
        return V0FractionResult(value, True, value < Fraction(1, 2**n))
    # v0/total <= v0/v1 = 1 - (1 - 1/N)^K <= K/N; paper schedule: K/N = 2^-(n+1)
    if lvl.N is not None and lvl.N.exact is not None and lvl.K.exact is not None:
        bound = Fraction(lvl.K.exact, lvl.N.exact)
    elif tower.schedule.mode == "paper":
        bound = Fraction(1, 2 ** (n + 1))
    else:
        raise TowerError(f"level {n + 1} has no representable V0 bound")
    return V0FractionResult(bound, False, bound < Fraction(1, 2**n))


@dataclass(frozen=True)
class FiberReport:
    fiber_size: int
    deviations: tuple  # (base vertex, fiber size) for every unequal fiber
    ok: bool


def fiber_map_report(projection: Sequence[int], base_count: int) -> FiberReport:
    """Check that all fibers of a projection map are equinumerous."""
    sizes = [0] * base_count
    for a in projection:
        sizes[int(a)] += 1
    expected = sizes[0] if sizes else 0
    deviations = tuple(
        (a, s) for a, s in enumerate(sizes) if s != expected
    )
    return FiberReport(expected, deviations, not deviations)


def level_measure_check(tower: Tower, n: int) -> FiberReport:
    """Fiber equality of the projection from level n + 1 onto level n.

    Equal fibers are exactly what makes the pushforward of the uniform
    measure on level n + 1 the uniform measure on level n.
    """
    mat = tower.materialized(n + 1)
    return fiber_map_report(mat.projection, tower.graph(n).vertex_count)
