"""The acceptance gate: ten criteria, one test each, exact tolerances.

Every test finishes with a single printed PASS line; pytest -v adds the
per-test verdict.  All equalities are exact (integers and Fractions)
unless the criterion itself specifies a statistical window, in which case
the window is 4 sigma.
"""

import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from treelab.analysis import (
    best_level_orientation,
    build_knowhow_potential,
    circulation_mass_bound_check,
    lifted_orientation,
    matching_paradox_demo,
    max_aligned_circulation,
    orientation_disagreement,
    v1_restricted_arcs,
)
from treelab.cli import main as cli_main
from treelab.expansion import ExpansionParams, counts, materialize
from treelab.flow import is_acyclic, max_circulation
from treelab.graphs import (
    FiniteGraph,
    Orientation,
    Potential,
    make_complete_bipartite,
    orientation_by_index,
    potential_pairing,
    random_circulation,
)
from treelab.sampler import sample_path, tree_stats
from treelab.tower import LevelSpec, Schedule, SubsetRule, Tower, v0_fraction
from treelab.verification import run_expansion_checks

FOUR_SIGMA = 4


def _sigma(p, n):
    return (p * (1 - p) / n) ** 0.5


def test_criterion_01_counting_claim(k22):
    t0 = time.monotonic()
    params = ExpansionParams(k22, N=2)  # all 16 orientations, K = 16
    mat = materialize(params, 1 << 22)
    fibers = mat.fiber_sizes()
    expected_fiber = 2 * 2 * 2**16 - 2 * 1**16
    assert expected_fiber == 262_142
    assert np.all(fibers == expected_fiber)
    assert mat.total_count == 1_048_568
    elapsed = time.monotonic() - t0
    assert elapsed <= 300
    print(f"CRITERION 1: PASS - all 4 fibers exactly 262142, "
          f"total 1048568 vertices ({elapsed:.1f}s)")


def test_criterion_02_expansion_properties(toy_mat, flagship_mat):
    for label, mat in (("toy", toy_mat), ("flagship", flagship_mat)):
        checks = run_expansion_checks(mat)
        failures = [c.name for c in checks if not c.ok]
        assert failures == [], f"{label}: {failures}"
    print("CRITERION 2: PASS - all structural checks hold on both instances "
          "(regular, simple, bipartite, homomorphism, potentials, V0 bound)")


def test_criterion_03_schedule_bound():
    t0 = time.monotonic()
    tower = Tower(2, Schedule.paper(), 2)
    frac = v0_fraction(tower, 1)
    assert frac.exact
    assert frac.value == Fraction(64**16 - 63**16, 2 * 64**16 - 63**16)
    assert frac.value < Fraction(1, 2)
    elapsed = time.monotonic() - t0
    assert elapsed < 1
    print(f"CRITERION 3: PASS - paper-schedule V0 fraction "
          f"(64^16-63^16)/(2*64^16-63^16) < 1/2 exactly ({elapsed:.3f}s)")


def test_criterion_04_potential_pairing(toy_mat):
    graphs = [
        make_complete_bipartite(3),
        make_complete_bipartite(4),
        toy_mat.graph,
        FiniteGraph(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5),
                        (5, 3), (0, 4)]),
    ]
    total = 0
    for seed in range(1000):
        g = graphs[seed % len(graphs)]
        f = random_circulation(g, seed, cycle_count=1 + seed % 4)
        rng = random.Random(seed ^ 0xBEEF)
        pot = Potential(g, [rng.randint(-5, 5) for _ in range(g.vertex_count)])
        assert potential_pairing(g, f, pot) == 0
        total += 1
    print(f"CRITERION 4: PASS - pairing exactly 0 on {total} seeded "
          "(circulation, potential) pairs")


def test_criterion_05_knowhow_mass_identity(toy_mat):
    g = build_knowhow_potential(toy_mat, 0)
    for seed in range(1000):
        f = random_circulation(toy_mat.graph, seed, cycle_count=1 + seed % 5)
        rep = circulation_mass_bound_check(toy_mat.graph, f, g)
        assert rep.residual == 0
        assert 2 * rep.defect_mass >= rep.l1
    print("CRITERION 5: PASS - mass identity exact and defect mass >= "
          "||f||_1 / 2 on 1000 seeded circulations")


def test_criterion_06_aligned_acyclicity(toy_mat, flagship_mat):
    for label, mat in (("toy", toy_mat), ("flagship", flagship_mat)):
        for s in range(mat.params.K):
            tails, heads = v1_restricted_arcs(mat, s)
            assert is_acyclic(mat.v1_count, tails, heads), (label, s)
            assert max_circulation(mat.v1_count, tails, heads) == 0, (label, s)
        full = max_aligned_circulation(mat.graph, lifted_orientation(mat, 0))
        cut = mat.params.d * mat.v0_count
        assert full <= cut, (label, full, cut)
    print("CRITERION 6: PASS - every V1-restricted lift acyclic with zero "
          "max circulation; full lifted optima within the d*|V0| cut bound")


def test_criterion_07_orientation_fitting(toy_mat):
    e = toy_mat.graph.edge_count
    base = toy_mat.params.base
    for seed in range(100):
        rng = random.Random(seed)
        omega = Orientation(toy_mat.graph, [rng.randrange(2) for _ in range(e)])
        _, got = best_level_orientation(toy_mat, omega)
        brute = min(
            orientation_disagreement(toy_mat, omega, orientation_by_index(base, m))
            for m in range(16)
        )
        assert got == brute, seed
    print("CRITERION 7: PASS - majority fit equals the brute-force optimum "
          "over all 16 base orientations on 100 seeded orientations")


def test_criterion_08_matching_paradox(toy_params, flagship_params):
    for label, params in (("toy", toy_params), ("flagship", flagship_params)):
        rep = matching_paradox_demo(params, 0, 1 << 22)
        c = counts(params)
        assert rep["matching_size"] * 2 == c.total_count, label
        assert rep["phi_is_circulation"], label
        assert rep["mass_identity_residual"] == "0", label
        assert rep["mass_bound_holds"], label
    print("CRITERION 8: PASS - perfect matchings of size |V|/2 on both "
          "instances; mass-bound identity exact (finite/limit contrast)")


def test_criterion_09_sampler_statistics():
    t0 = time.monotonic()
    rule = SubsetRule("random", size=1, seed=0)
    tower = Tower(2, Schedule.desk([LevelSpec(3, rule)] * 2), 3)
    n = 10_000

    # level marginals: level-1 coordinate uniform on 4 vertices, and the
    # V0 share at levels 2 and 3 matching the exact fraction
    rng = random.Random(0)
    lvl1 = [0] * 4
    v0_hits = {2: 0, 3: 0}
    for _ in range(n):
        path = sample_path(tower, 3, rng)
        lvl1[path.vertex(1)] += 1
        for lvl in (2, 3):
            v0_hits[lvl] += tower.materialized(lvl).is_v0(path.vertex(lvl))
    sigma1 = _sigma(0.25, n)
    for count in lvl1:
        assert abs(count / n - 0.25) < FOUR_SIGMA * sigma1
    for lvl in (2, 3):
        p = float(v0_fraction(tower, lvl - 1).value)
        assert abs(v0_hits[lvl] / n - p) < FOUR_SIGMA * _sigma(p, n)

    # tree-ball fraction at radius 2 nondecreasing over levels, seed 0
    rows = [tree_stats(tower, lvl, 2, n, seed=0) for lvl in (1, 2, 3)]
    fractions = [r.tree_fraction for r in rows]
    assert fractions[0] <= fractions[1] <= fractions[2], fractions

    # V0-hit frequency of the radius-2 ball: at least the vertex marginal,
    # at most the union bound over the mean ball size (both 4-sigma padded)
    for lvl in (2, 3):
        p = float(v0_fraction(tower, lvl - 1).value)
        row = rows[lvl - 1]
        hit = float(row.v0_hit_fraction)
        upper = min(1.0, float(row.mean_ball_size) * p)
        assert hit > p - FOUR_SIGMA * _sigma(p, n)
        assert hit < upper + FOUR_SIGMA * _sigma(min(upper, 0.999), n)

    elapsed = time.monotonic() - t0
    assert elapsed <= 120
    print(f"CRITERION 9: PASS - marginals uniform, tree fractions "
          f"{[str(f) for f in fractions]} nondecreasing, V0 hits within "
          f"4-sigma windows ({elapsed:.1f}s)")


def test_criterion_10_determinism_round_trip(tmp_path):
    sample_args = ["sample", "--d", "2", "--N", "3", "--subset", "1",
                   "--levels", "3", "--radius", "2", "--samples", "500",
                   "--seed", "7"]
    demo_args = ["demo", "--d", "2", "--N", "3", "--subset", "1",
                 "--seed", "1"]
    outs = []
    for i in range(2):
        f = tmp_path / f"s{i}.csv"
        assert cli_main(sample_args + ["--out", str(f)]) == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]

    for i in range(2):
        f = tmp_path / f"d{i}.json"
        assert cli_main(demo_args + ["--out", str(f)]) == 0
        outs.append(f.read_bytes())
    assert outs[2] == outs[3]

    from treelab import io as codecs

    f = tmp_path / "g.json"
    assert cli_main(["export", "--d", "2", "--N", "3", "--subset", "1",
                     "--levels", "2", "--seed", "0", "--out", str(f)]) == 0
    first = f.read_bytes()
    g = codecs.graph_from_json(json.loads(first))
    again = codecs.dumps(codecs.graph_to_json(g)).encode() + b"\n"
    assert first == again
    print("CRITERION 10: PASS - byte-identical reruns and export/import "
          "round trips")
