from fractions import Fraction

import pytest

from treelab import io as codecs
from treelab.expansion import ExpansionParams, V0, V1
from treelab.graphs import Circulation, FiniteGraph, make_complete_bipartite
from treelab.tower import ALL, LevelSpec, Schedule, SubsetRule


class TestCanonicalJson:
    def test_sorted_keys(self):
        assert codecs.dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_config_hash_stable(self):
        a = codecs.config_hash({"x": 1, "y": [1, 2]})
        b = codecs.config_hash({"y": [1, 2], "x": 1})
        assert a == b and len(a) == 64

    def test_config_hash_sensitive(self):
        assert codecs.config_hash({"x": 1}) != codecs.config_hash({"x": 2})


class TestFractions:
    def test_round_trip(self):
        for x in (Fraction(3, 7), Fraction(-1, 2), 5, Fraction(0)):
            assert codecs.fraction_from_str(codecs.fraction_to_str(x)) == x

    def test_bad_input(self):
        with pytest.raises(codecs.CodecError):
            codecs.fraction_from_str("zero")
        with pytest.raises(codecs.CodecError):
            codecs.fraction_from_str("1/0")


class TestGraphCodec:
    def test_round_trip_bipartite(self):
        g = make_complete_bipartite(3)
        assert codecs.graph_from_json(codecs.graph_to_json(g)) == g

    def test_round_trip_plain(self):
        g = FiniteGraph(4, [(0, 1), (2, 3)])
        obj = codecs.graph_to_json(g)
        assert "bipartition" not in obj
        assert codecs.graph_from_json(obj) == g

    def test_byte_identical_double_export(self):
        g = make_complete_bipartite(2)
        once = codecs.dumps(codecs.graph_to_json(g))
        twice = codecs.dumps(
            codecs.graph_to_json(codecs.graph_from_json(codecs.graph_to_json(g)))
        )
        assert once == twice

    def test_bad_graph(self):
        with pytest.raises(codecs.CodecError):
            codecs.graph_from_json({"edges": [[0, 1]]})


class TestCirculationCodec:
    def test_round_trip(self):
        g = make_complete_bipartite(2)
        f = Circulation(g, [1, Fraction(-2, 3), 0, Fraction(7, 2)])
        arr = codecs.circulation_to_json(f)
        assert arr == ["1", "-2/3", "0", "7/2"]
        back = codecs.circulation_from_json(g, arr)
        assert back.values == f.values

    def test_length_checked(self):
        g = make_complete_bipartite(2)
        with pytest.raises(codecs.CodecError):
            codecs.circulation_from_json(g, ["1"])


class TestVertexCodec:
    def test_v1(self):
        x = V1(2, 5, (1, 3, 2))
        s = codecs.vertex_to_str(x)
        assert s == "V1:2:5:[1,3,2]"
        assert codecs.vertex_from_str(s) == x

    def test_v0(self):
        x = V0(4, (2, 2), 1)
        s = codecs.vertex_to_str(x)
        assert s == "V0:4:[2,2]:1"
        assert codecs.vertex_from_str(s) == x

    def test_empty_profile(self):
        assert codecs.vertex_from_str("V1:1:0:[]") == V1(1, 0, ())

    def test_bad_codes(self):
        for s in ("V2:1:0:[1]", "V1:1:0:1", "", "V0:1:[1]"):
            with pytest.raises(codecs.CodecError):
                codecs.vertex_from_str(s)


class TestParamsCodec:
    def test_round_trip_explicit_subset(self, toy_params):
        obj = codecs.params_to_json(toy_params)
        assert obj["orientation_subset"] == [1]
        back = codecs.params_from_json(obj)
        assert back.subset == toy_params.subset
        assert back.N == toy_params.N and back.d == toy_params.d
        assert back.base == toy_params.base

    def test_full_subset_spelled_all(self, flagship_params):
        obj = codecs.params_to_json(flagship_params)
        assert obj["orientation_subset"] == "all"
        assert codecs.params_from_json(obj).K == 16

    def test_bad_params(self):
        with pytest.raises(codecs.CodecError):
            codecs.params_from_json({"d": 2})


class TestTowerConfigCodec:
    def test_round_trip_desk(self):
        sched = Schedule.desk([
            LevelSpec(3, SubsetRule("random", size=1, seed=4)),
            LevelSpec(5, ALL),
        ])
        obj = codecs.tower_config_to_json(2, 3, sched)
        d, depth, back = codecs.tower_config_from_json(obj)
        assert (d, depth) == (2, 3)
        assert back == sched

    def test_round_trip_paper(self):
        obj = codecs.tower_config_to_json(3, 4, Schedule.paper())
        d, depth, back = codecs.tower_config_from_json(obj)
        assert (d, depth, back.mode) == (3, 4, "paper")

    def test_bad_config(self):
        with pytest.raises(codecs.CodecError):
            codecs.tower_config_from_json({"d": 2})
