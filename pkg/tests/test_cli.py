import json

import pytest

from treelab.cli import main


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_bytes()


class TestExitCodes:
    def test_invalid_d(self, capsys):
        assert main(["params", "--d", "0", "--levels", "2"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_invalid_subset(self, capsys):
        assert main(["demo", "--d", "2", "--N", "3", "--subset", "few"]) == 2

    def test_over_limit(self, capsys):
        code = main(["demo", "--d", "2", "--N", "2", "--subset", "all",
                     "--limit", "1000"])
        assert code == 2

    def test_env_limit(self, monkeypatch, capsys):
        monkeypatch.setenv("TREELAB_LIMIT", "10")
        assert main(["export", "--d", "2", "--N", "3", "--subset", "1",
                     "--levels", "2"]) == 2
        monkeypatch.setenv("TREELAB_LIMIT", "nope")
        assert main(["params", "--d", "2", "--levels", "2"]) == 2


class TestParams:
    def test_paper_d2(self, tmp_path):
        code, out = run(tmp_path, "p.txt", "params", "--d", "2",
                        "--levels", "2", "--schedule", "paper")
        assert code == 0
        text = out.decode()
        assert "N=64" in text
        assert "fiber=" in text  # level-2 fiber printed exactly

    def test_paper_d3_symbolic(self, tmp_path):
        code, out = run(tmp_path, "p.txt", "params", "--d", "3",
                        "--levels", "2", "--schedule", "paper")
        assert code == 0
        assert "~2^" in out.decode()


class TestVerify:
    def test_desk_tower_passes(self, tmp_path):
        code, out = run(tmp_path, "v.json", "verify", "--d", "2", "--N", "3",
                        "--subset", "1", "--levels", "2", "--seed", "0")
        assert code == 0
        rep = json.loads(out)
        assert rep["ok"] and all(c["ok"] for c in rep["checks"])
        assert rep["config_hash"]

    def test_mutation_hook_fails_regularity(self, tmp_path):
        code, out = run(tmp_path, "v.json", "verify", "--d", "2", "--N", "3",
                        "--subset", "1", "--levels", "2", "--seed", "0",
                        "--mutate-drop-edge", "0")
        assert code == 1
        rep = json.loads(out)
        failed = {c["name"]: c for c in rep["checks"] if not c["ok"]}
        assert "regular" in failed
        assert failed["regular"]["witness"].startswith("V")


class TestDeterminism:
    def test_sample_byte_identical(self, tmp_path):
        args = ("sample", "--d", "2", "--N", "3", "--subset", "1",
                "--levels", "3", "--radius", "2", "--samples", "200",
                "--seed", "7")
        _, a = run(tmp_path, "a.csv", *args)
        _, b = run(tmp_path, "b.csv", *args)
        assert a == b
        header = a.decode().splitlines()[0]
        assert header == ("level,radius,samples,tree_fraction,"
                          "v0_hit_fraction,mean_persistent_degree,seed")

    def test_demo_byte_identical(self, tmp_path):
        args = ("demo", "--d", "2", "--N", "3", "--subset", "1", "--seed", "1")
        _, a = run(tmp_path, "a.json", *args)
        _, b = run(tmp_path, "b.json", *args)
        assert a == b
        rep = json.loads(a)
        assert rep["matching_size"] == 16
        assert rep["seed"] == 1


class TestExport:
    def test_round_trip(self, tmp_path):
        from treelab import io as codecs

        code, out = run(tmp_path, "g.json", "export", "--d", "2", "--N", "3",
                        "--subset", "1", "--levels", "2", "--seed", "0")
        assert code == 0
        g = codecs.graph_from_json(json.loads(out))
        assert g.vertex_count == 32
        assert codecs.dumps(codecs.graph_to_json(g)).encode() == out.strip()


class TestReportAndBuild:
    def test_report_embeds_config(self, tmp_path):
        code, out = run(tmp_path, "r.json", "report", "--d", "2", "--N", "3",
                        "--subset", "1", "--levels", "2", "--seed", "3")
        assert code == 0
        rep = json.loads(out)
        assert rep["config"]["seed"] == 3
        assert len(rep["levels"]) == 2

    def test_build_reports_materialization(self, tmp_path):
        code, out = run(tmp_path, "b.json", "build", "--d", "2", "--N", "3",
                        "--subset", "1", "--levels", "2", "--seed", "0")
        assert code == 0
        rep = json.loads(out)
        assert rep["levels"][1]["materialized"] == {
            "vertices": 32, "edges": 32,
        }
