import json

import pytest

from vrjp import cli

GRAPH = ('{"vertices": ["a", "b", "c"], '
         '"edges": [["a","b",1.0],["b","c",2.0],["a","c",0.5]]}')


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(GRAPH)
    return str(path)


def run(args):
    return cli.main(args)


class TestSubdivide:
    def test_emits_subdivision(self, graph_file, tmp_path, capsys):
        out = tmp_path / "sub.json"
        assert run(["subdivide", "--graph", graph_file, "--r", "2",
                    "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert len(data["vertices"]) == 3 + 3 * 3
        assert len(data["edges"]) == 4 * 3
        assert "e:a~b:1/4" in data["vertices"]

    def test_round_trips_as_graph_input(self, graph_file, tmp_path):
        sub = tmp_path / "sub.json"
        run(["subdivide", "--graph", graph_file, "--r", "1",
             "--out", str(sub)])
        out = tmp_path / "betas.csv"
        assert run(["sample-beta", "--graph", str(sub), "--samples", "3",
                    "--seed", "1", "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert "e:a~b:1/2" in header


class TestDeterminism:
    def test_sample_beta_byte_identical(self, graph_file, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            run(["sample-beta", "--graph", graph_file, "--samples", "50",
                 "--seed", "7", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.csv"
        run(["sample-beta", "--graph", graph_file, "--samples", "50",
             "--seed", "8", "--out", str(c)])
        assert a.read_bytes() != c.read_bytes()

    def test_simulate_and_flow_byte_identical(self, graph_file, tmp_path):
        outs = []
        for name in ("x.csv", "y.csv"):
            out = tmp_path / name
            run(["simulate", "--model", "errw", "--graph", graph_file,
                 "--steps", "20", "--paths", "3", "--seed", "11",
                 "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        outs = []
        for name in ("m1.csv", "m2.csv"):
            out = tmp_path / name
            run(["flow", "--graph", graph_file, "--r", "2", "--l", "0",
                 "--alpha", "0.25,1.0", "--dist", "gamma:a=1",
                 "--samples", "500", "--seed", "3", "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestSimulateRestrict:
    def test_restrict_round_trip(self, graph_file, tmp_path):
        paths = tmp_path / "paths.csv"
        run(["simulate", "--model", "mjp", "--graph", graph_file, "--steps",
             "30", "--seed", "5", "--paths", "2", "--out", str(paths)])
        out = tmp_path / "restricted.csv"
        assert run(["restrict", "--paths", str(paths), "--subset", "a,b",
                    "--drop-loops", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "path,step,vertex,wait"
        vertices = {line.split(",")[2] for line in lines[1:]}
        assert vertices <= {"a", "b"}

    def test_json_format(self, graph_file, capsys):
        assert run(["simulate", "--model", "vrjp", "--graph", graph_file,
                    "--steps", "3", "--seed", "5", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["columns"] == ["path", "step", "vertex", "wait"]
        assert len(data["rows"]) == 4


class TestFlowReport:
    def test_clean_run_reports_no_violation(self, graph_file, tmp_path,
                                            capsys):
        moments = tmp_path / "m.csv"
        run(["flow", "--graph", graph_file, "--r", "3", "--l", "0",
             "--alpha", "0.25", "--dist", "gamma:a=1", "--samples", "2000",
             "--seed", "13", "--out", str(moments)])
        assert run(["report", "--moments", str(moments)]) == 0
        table = capsys.readouterr().out
        assert "YES" not in table

    def test_violation_flagged(self, tmp_path, capsys):
        moments = tmp_path / "m.csv"
        moments.write_text(
            "level,alpha,mc_moment,mc_se,bound_phase1,bound_combined,"
            "bound_log,m0,m1\n"
            "0,0.25,2.0,0.001,1.0,0.9,,3,\n")
        assert run(["report", "--moments", str(moments)]) == 1
        assert "YES" in capsys.readouterr().out

    def test_empty_input(self, tmp_path, capsys):
        moments = tmp_path / "m.csv"
        moments.write_text("level,alpha,mc_moment,mc_se,bound_phase1,"
                           "bound_combined,bound_log,m0,m1\n")
        assert run(["report", "--moments", str(moments)]) == 0


class TestBounds:
    def test_json_payload(self, capsys):
        assert run(["bounds", "--alpha", "0.25", "--moment", "1.0",
                    "--r", "6", "--l", "0", "--c3", "0.5",
                    "--degree", "4"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["phase1"] == pytest.approx(2.0 ** -1.5)
        assert data["m0"] == 1
        assert data["recurrence_hypothesis_holds"] is True
        assert data["required_gap"] == 4


class TestVerify:
    def test_unknown_suite_exits_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            run(["verify", "--suite", "nope", "--seed", "1"])
        assert err.value.code == 2

    def test_quick_suite_passes(self, tmp_path):
        out = tmp_path / "report.json"
        assert run(["verify", "--suite", "flow-oracle", "--seed", "3",
                    "--quick", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["passed"] is True
        assert all(v["passed"] for v in data["verdicts"])
