from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelab.graphs import (
    Circulation,
    FiniteGraph,
    GraphError,
    Orientation,
    Potential,
    fundamental_cycles,
    is_circulation,
    make_complete_bipartite,
    matching_to_circulation,
    max_matching,
    orientation_by_index,
    potential_pairing,
    random_circulation,
)


def small_graphs():
    """Random simple graphs on up to 8 vertices, as hypothesis data."""
    def build(n, edge_picks):
        all_edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
        edges = [e for e, keep in zip(all_edges, edge_picks) if keep]
        return FiniteGraph(n, edges)

    return st.integers(2, 8).flatmap(
        lambda n: st.tuples(
            st.just(n), st.lists(st.booleans(), min_size=n * (n - 1) // 2,
                                 max_size=n * (n - 1) // 2)
        )
    ).map(lambda t: build(*t))


class TestFiniteGraph:
    def test_canonical_order(self):
        g = FiniteGraph(4, [(3, 1), (0, 2), (2, 1)])
        assert g.edge_list() == [(0, 2), (1, 2), (1, 3)]

    def test_rejects_loops(self):
        with pytest.raises(GraphError):
            FiniteGraph(3, [(1, 1)])

    def test_rejects_parallel_edges(self):
        with pytest.raises(GraphError):
            FiniteGraph(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphError):
            FiniteGraph(2, [(0, 2)])

    def test_bipartition_checked(self):
        FiniteGraph(2, [(0, 1)], ["A", "B"])
        with pytest.raises(GraphError):
            FiniteGraph(2, [(0, 1)], ["A", "A"])

    def test_k22(self):
        g = make_complete_bipartite(2)
        assert g.vertex_count == 4
        assert g.edge_count == 4
        assert g.regularity() == 2
        assert g.bipartition == ("A", "A", "B", "B")
        assert sorted(g.neighbors(0)) == [2, 3]

    @given(small_graphs())
    def test_neighbor_symmetry(self, g):
        for v in range(g.vertex_count):
            for w in g.neighbors(v):
                assert v in g.neighbors(w)

    @given(small_graphs())
    def test_handshake(self, g):
        assert int(g.degrees.sum()) == 2 * g.edge_count

    def test_edge_position(self):
        g = make_complete_bipartite(2)
        for i, (u, v) in enumerate(g.edge_list()):
            assert g.edge_position(u, v) == i
            assert g.edge_position(v, u) == i
        with pytest.raises(GraphError):
            g.edge_position(0, 1)


class TestOrientation:
    def test_index_round_trip(self):
        g = make_complete_bipartite(2)
        for m in range(16):
            assert orientation_by_index(g, m).index == m

    def test_head_tail(self):
        g = make_complete_bipartite(2)
        o = orientation_by_index(g, 0b0001)
        u, v = g.edge_list()[0]
        assert o.head(0) == u and o.tail(0) == v
        u, v = g.edge_list()[1]
        assert o.head(1) == v and o.tail(1) == u

    def test_reversed(self):
        g = make_complete_bipartite(2)
        o = orientation_by_index(g, 0b0110)
        assert o.reversed().index == 0b1001

    def test_index_out_of_range(self):
        g = make_complete_bipartite(2)
        with pytest.raises(GraphError):
            orientation_by_index(g, 16)


class TestCirculation:
    def test_antisymmetry(self):
        g = make_complete_bipartite(2)
        f = Circulation(g, [1, -1, Fraction(1, 2), 0])
        u, v = g.edge_list()[2]
        assert f.value(u, v) == Fraction(1, 2)
        assert f.value(v, u) == -Fraction(1, 2)

    def test_l1_and_scaling(self):
        g = make_complete_bipartite(2)
        f = Circulation(g, [1, -1, Fraction(1, 2), 0])
        assert f.l1() == Fraction(5, 2)
        assert f.scaled(Fraction(-2)).l1() == 5
        assert (f + f.scaled(-1)).l1() == 0

    def test_four_cycle_is_circulation(self):
        g = make_complete_bipartite(2)
        # 0 -> 2 -> 1 -> 3 -> 0 around the unique 4-cycle
        f = Circulation(g, [1, -1, -1, 1])
        assert is_circulation(g, f)

    def test_nonzero_divergence_detected(self):
        g = make_complete_bipartite(2)
        assert not is_circulation(g, Circulation(g, [1, 0, 0, 0]))

    @given(st.integers(0, 10_000))
    def test_random_circulation_is_circulation(self, seed):
        g = make_complete_bipartite(3)
        f = random_circulation(g, seed, cycle_count=4)
        assert is_circulation(g, f)

    def test_fundamental_cycles_span(self):
        g = make_complete_bipartite(3)
        basis = fundamental_cycles(g)
        # cyclomatic number of K_{3,3}: 9 - 6 + 1
        assert len(basis) == 4
        for f in basis:
            assert is_circulation(g, f)
            assert f.l1() >= 3


class TestPotentialPairing:
    @given(st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_pairing_zero(self, seed):
        import random as _random
        g = make_complete_bipartite(3)
        f = random_circulation(g, seed, cycle_count=3)
        rng = _random.Random(seed)
        g_pot = Potential(g, [rng.randint(-5, 5) for _ in range(6)])
        assert potential_pairing(g, f, g_pot) == 0

    def test_rejects_non_circulation(self):
        g = make_complete_bipartite(2)
        f = Circulation(g, [1, 0, 0, 0])
        with pytest.raises(GraphError):
            potential_pairing(g, f, Potential(g, [0, 0, 0, 0]))

    def test_max_edge_step(self):
        g = make_complete_bipartite(2)
        assert Potential(g, [0, 0, 3, 1]).max_edge_step() == 3


class TestMatching:
    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_perfect_on_kdd(self, d):
        g = make_complete_bipartite(d)
        m = max_matching(g)
        assert len(m) == d
        used = [v for e in m for v in e]
        assert len(set(used)) == 2 * d

    def test_requires_bipartition(self):
        g = FiniteGraph(3, [(0, 1), (1, 2), (0, 2)])
        with pytest.raises(GraphError):
            max_matching(g)

    def test_matching_to_circulation(self):
        g = make_complete_bipartite(3)
        m = max_matching(g)
        f = matching_to_circulation(g, m)
        assert is_circulation(g, f)
        for u, v in m:
            assert f.value(min(u, v), max(u, v)) * (1 if g.side(min(u, v)) == "A" else -1) == 2

    def test_rejects_imperfect_matching(self):
        g = make_complete_bipartite(2)
        with pytest.raises(GraphError):
            matching_to_circulation(g, frozenset({(0, 2)}))
