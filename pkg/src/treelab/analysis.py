"""Circulation-obstruction toolkit on materialized expansions.

Finite analogs of the facts that kill absolutely integrable circulations
in the limit: potentials whose oriented steps are +1 off a small defect
set, the exact mass identity forcing half of any circulation's mass onto
the defect, majority fitting of a base orientation to an arbitrary
orientation of the expansion, and the flow-quantified bound on aligned
circulations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .expansion import (
    ExpansionParams,
    MaterializedExpansion,
    counts as expansion_counts,
    materialize,
)
from .flow import is_acyclic, max_circulation, orientation_arcs
from .graphs import (
    Circulation,
    FiniteGraph,
    Orientation,
    Potential,
    is_circulation,
    matching_to_circulation,
    max_matching,
)


class AnalysisError(ValueError):
    pass


def build_knowhow_potential(mat: MaterializedExpansion, position: int) -> Potential:
    """The profile coordinate at one subset position, as a vertex potential.

    Steps by exactly +1 along every product edge in the lifted direction of
    that position's orientation, and is constant across padding edges.
    """
    return Potential(mat.graph, mat.potential_array(position))


def lifted_orientation(mat: MaterializedExpansion, position: int) -> Orientation:
    """Lift of a subset orientation to the whole expansion.

    Product edges copy the base direction (equivalently: they point toward
    the +1 side of the position's potential).  Padding edges carry no base
    direction; they are oriented adversarially, alternating by slot and pad
    parity so padding cycles stay consistently orientable wherever possible.
    """
    g = mat.potential_array(position)
    edges = mat.graph.edges
    u, v = edges[:, 0], edges[:, 1]
    v1v1 = v < mat.v1_count
    bits = np.empty(len(edges), dtype=np.uint8)
    # product edges: bit 0 (low -> high) iff the high endpoint is the +1 side
    bits[v1v1] = np.where(g[v[v1v1]] == g[u[v1v1]] + 1, 0, 1)
    # padding edges: low endpoint is always the V1 side
    pad = ~v1v1
    slot = mat.slot_array()[u[pad]]
    padidx = mat.pad_array()[v[pad]]
    bits[pad] = np.where((slot + padidx) % 2 == 0, 0, 1)
    return Orientation(mat.graph, bits)


@dataclass(frozen=True)
class DefectReport:
    """Edges where an oriented step fails to raise the potential by one."""

    total_edges: int
    defect_edges: int
    v0_incident: int
    level_disagreement: int
    defect_fraction: Fraction
    defect_l1: Optional[Fraction] = None


def knowhow_defect(
    mat: MaterializedExpansion,
    omega: Orientation,
    g: Potential,
    f: Optional[Circulation] = None,
) -> DefectReport:
    """Count edges violating g(head) = g(tail) + 1 under an orientation."""
    if omega.graph is not mat.graph or g.graph is not mat.graph:
        raise AnalysisError("orientation and potential must live on the expansion")
    if g.max_edge_step() > 1:
        raise AnalysisError("potential steps by more than 1 across an edge")
    edges = mat.graph.edges
    gu = g.values[edges[:, 0]]
    gv = g.values[edges[:, 1]]
    heads = np.where(omega.bits == 0, gv, gu)
    tails = np.where(omega.bits == 0, gu, gv)
    defect = heads != tails + 1
    v0_inc = edges[:, 1] >= mat.v1_count
    n_defect = int(defect.sum())
    n_v0 = int((defect & v0_inc).sum())
    total = len(edges)
    defect_l1 = None
    if f is not None:
        if f.graph is not mat.graph:
            raise AnalysisError("circulation must live on the expansion")
        defect_l1 = Fraction(
            sum(abs(f.values[i]) for i in np.flatnonzero(defect))
        )
    return DefectReport(
        total_edges=total,
        defect_edges=n_defect,
        v0_incident=n_v0,
        level_disagreement=n_defect - n_v0,
        defect_fraction=Fraction(n_defect, total) if total else Fraction(0),
        defect_l1=defect_l1,
    )


@dataclass(frozen=True)
class MassBoundReport:
    """The exact mass identity 0 = |f|_1 - 2*(anti mass) - (flat mass)."""

    l1: Fraction
    aligned_mass: Fraction
    anti_mass: Fraction
    flat_mass: Fraction
    residual: Fraction  # l1 - 2*anti - flat; identically zero
    defect_mass: Fraction  # anti + flat; at least l1 / 2

    @property
    def holds(self) -> bool:
        return self.residual == 0 and 2 * self.defect_mass >= self.l1


def circulation_mass_bound_check(
    graph: FiniteGraph, f: Circulation, g: Potential
) -> MassBoundReport:
    """Split a circulation's mass by the sign of its potential increments.

    With |g(x) - g(y)| <= 1 on every edge, the aligned and anti-aligned
    masses coincide, so at least half of the total mass sits on edges that
    are anti-aligned or flat.
    """
    if not is_circulation(graph, f):
        raise AnalysisError("mass identity is only claimed for circulations")
    if g.graph is not graph:
        raise AnalysisError("mismatched graph reference")
    if g.max_edge_step() > 1:
        raise AnalysisError("potential steps by more than 1 across an edge")
    gval = g.values.tolist()
    aligned = Fraction(0)
    anti = Fraction(0)
    flat = Fraction(0)
    for (u, v), fe in zip(graph.edges.tolist(), f.values):
        step = gval[v] - gval[u]  # g change in the stored flow direction
        if step == 0:
            flat += abs(fe)
        elif fe * step > 0:
            aligned += abs(fe)
        elif fe != 0:
            anti += abs(fe)
    l1 = f.l1()
    residual = l1 - 2 * anti - flat
    return MassBoundReport(
        l1=l1,
        aligned_mass=aligned,
        anti_mass=anti,
        flat_mass=flat,
        residual=residual,
        defect_mass=anti + flat,
    )


def _v1_edge_tables(mat: MaterializedExpansion):
    """Per product edge: base-edge position and projected endpoints."""
    edges = mat.graph.edges
    v1v1 = edges[:, 1] < mat.v1_count
    u = edges[v1v1, 0]
    v = edges[v1v1, 1]
    pu = mat.projection[u]
    pv = mat.projection[v]
    base = mat.params.base
    lo = np.minimum(pu, pv)
    hi = np.maximum(pu, pv)
    keys = base.edges[:, 0] * base.vertex_count + base.edges[:, 1]
    pos = np.searchsorted(keys, lo * base.vertex_count + hi)
    return v1v1, u, v, pu, pv, lo, hi, pos


def best_level_orientation(
    mat: MaterializedExpansion, omega: Orientation
) -> Tuple[Orientation, Fraction]:
    """Majority-vote base orientation against an expansion orientation.

    Per base edge the two directions are voted on by the product edges
    projecting onto it; the majority is exactly optimal since base edges
    are independent.  Ties break toward low -> high.  The disagreement is
    the fraction of product edges overruled by the winner.
    """
    if omega.graph is not mat.graph:
        raise AnalysisError("orientation must live on the expansion")
    base = mat.params.base
    v1v1, u, v, pu, pv, lo, hi, pos = _v1_edge_tables(mat)
    bits_lift = omega.bits[v1v1]
    head_proj = np.where(bits_lift == 0, pv, pu)
    toward_high = head_proj == hi
    e = base.edge_count
    votes_high = np.bincount(pos[toward_high], minlength=e)
    votes_low = np.bincount(pos[~toward_high], minlength=e)
    best_bits = (votes_high < votes_low).astype(np.uint8)
    disagree = int(np.where(best_bits == 0, votes_low, votes_high).sum())
    total = int(v1v1.sum())
    frac = Fraction(disagree, total) if total else Fraction(0)
    return Orientation(base, best_bits), frac


def orientation_disagreement(
    mat: MaterializedExpansion, omega: Orientation, base_ori: Orientation
) -> Fraction:
    """Fraction of product edges whose omega direction disagrees with a lift."""
    if base_ori.graph is not mat.params.base:
        raise AnalysisError("base orientation must live on the base graph")
    v1v1, u, v, pu, pv, lo, hi, pos = _v1_edge_tables(mat)
    bits_lift = omega.bits[v1v1]
    head_proj = np.where(bits_lift == 0, pv, pu)
    toward_high = head_proj == hi
    base_toward_high = base_ori.bits[pos] == 0
    total = int(v1v1.sum())
    if not total:
        return Fraction(0)
    return Fraction(int((toward_high != base_toward_high).sum()), total)


def v1_restricted_arcs(mat: MaterializedExpansion, position: int):
    """Directed product edges of the lift at one subset position."""
    g = mat.potential_array(position)
    edges = mat.graph.edges
    v1v1 = edges[:, 1] < mat.v1_count
    u = edges[v1v1, 0]
    v = edges[v1v1, 1]
    forward = g[v] == g[u] + 1
    tails = np.where(forward, u, v)
    heads = np.where(forward, v, u)
    return tails, heads


def max_aligned_circulation(graph: FiniteGraph, omega: Orientation) -> int:
    """Exact maximum total flow of a circulation respecting an orientation."""
    if omega.graph is not graph:
        raise AnalysisError("orientation must live on the given graph")
    tails, heads = orientation_arcs(graph, omega)
    return max_circulation(graph.vertex_count, tails, heads)


def orientation_by_sign(graph: FiniteGraph, f: Circulation) -> Orientation:
    """Direct every edge toward the endpoint receiving positive flow.

    Zero-flow edges default to low -> high.
    """
    bits = np.asarray([0 if fe >= 0 else 1 for fe in f.values], dtype=np.uint8)
    return Orientation(graph, bits)


def matching_paradox_demo(
    params: ExpansionParams, seed: int, limit: int
) -> dict:
    """Finite-level contrast pipeline: perfect matchings exist at every
    level, yet the circulation each one carries must park at least half of
    its mass on defect edges of the fitted orientation.
    """
    mat = materialize(params, limit)
    graph = mat.graph
    matching = max_matching(graph)
    phi = matching_to_circulation(graph, matching)
    omega_phi = orientation_by_sign(graph, phi)
    best_ori, disagreement = best_level_orientation(mat, omega_phi)
    try:
        position = params.subset.index(best_ori.index)
        position_note = "fitted orientation"
    except ValueError:
        position = 0
        position_note = "fitted orientation outside subset; using position 0"
    g = build_knowhow_potential(mat, position)
    omega_lift = lifted_orientation(mat, position)
    defect = knowhow_defect(mat, omega_lift, g, f=phi)
    mass = circulation_mass_bound_check(graph, phi, g)
    tails, heads = v1_restricted_arcs(mat, position)
    v1_acyclic = is_acyclic(mat.v1_count, tails, heads)
    aligned_max = max_aligned_circulation(graph, omega_lift)
    c = expansion_counts(params)
    return {
        "params": {
            "d": params.d,
            "N": params.N,
            "K": params.K,
            "base_vertices": params.base.vertex_count,
        },
        "seed": seed,
        "matching_size": len(matching),
        "phi_l1": str(mass.l1),
        "phi_is_circulation": is_circulation(graph, phi),
        "defect_fraction": str(defect.defect_fraction),
        "defect_mass_fraction": str(
            mass.defect_mass / mass.l1 if mass.l1 else Fraction(0)
        ),
        "mass_identity_residual": str(mass.residual),
        "mass_bound_holds": mass.holds,
        "best_orientation_index": best_ori.index,
        "disagreement": str(disagreement),
        "potential_position": position,
        "potential_position_note": position_note,
        "v1_lift_acyclic": v1_acyclic,
        "aligned_circulation_max": str(aligned_max),
        "v0_cut_bound": params.d * c.v0_count,
    }
