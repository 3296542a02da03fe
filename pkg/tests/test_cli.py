"""End-to-end command coverage: exit codes, JSON schema, CSV tables."""

import json
import shutil
import subprocess

import pytest

from hypercon import (
    Hypergraph,
    SolverError,
    complete,
    parse_hypergraph,
    s_path,
    sunflower,
    upper_bound_vertex_cut,
    write_hypergraph,
)
from hypercon.cli import main


def _write(tmp_path, H, name):
    path = tmp_path / name
    path.write_text(write_hypergraph(H), encoding="ascii")
    return str(path)


@pytest.fixture()
def edge_file(tmp_path):
    return _write(tmp_path, Hypergraph.from_edges(3, 3, [(0, 1, 2)]), "edge.hg")


@pytest.fixture()
def path_file(tmp_path):
    return _write(tmp_path, s_path(4, 2, 2), "p6.hg")


# ---------------------------------------------------------------------- gen


def test_gen_writes_the_requested_instance(tmp_path):
    out = str(tmp_path / "k10minus.hg")
    assert main(["gen", "complete-minus", "--k", "3", "--n", "10", "-o", out]) == 0
    with open(out, encoding="ascii") as fh:
        H = parse_hypergraph(fh.read())
    assert (H.n, H.k, H.m) == (10, 3, 119)


def test_gen_prints_to_stdout(capsys):
    assert main(["gen", "sunflower", "--k", "3", "--d", "4"]) == 0
    H = parse_hypergraph(capsys.readouterr().out)
    assert (H.n, H.m) == (9, 4)


def test_gen_two_path_instance(tmp_path):
    out = str(tmp_path / "p10.hg")
    assert main(["gen", "s-path", "--k", "4", "--s", "2", "--len", "4", "-o", out]) == 0
    with open(out, encoding="ascii") as fh:
        assert parse_hypergraph(fh.read()).n == 10


def test_gen_rejects_bad_parameters(capsys):
    assert main(["gen", "sunflower", "--k", "2", "--d", "3"]) == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------ compute


def test_compute_single_edge_json(edge_file, capsys):
    rc = main(
        ["compute", "--input", edge_file, "--strategy", "all", "--restarts", "3", "--json"]
    )
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {
        "alpha",
        "argmin_vertex",
        "per_vertex",
        "config",
        "connected",
        "input",
        "version",
        "times",
    }
    assert report["alpha"] == pytest.approx(1.0, abs=1e-10)
    assert report["connected"] is True
    assert report["argmin_vertex"] in (1, 2, 3)
    assert {row["j"] for row in report["per_vertex"]} == {1, 2, 3}
    for row in report["per_vertex"]:
        assert set(row) == {"j", "alpha_j", "ratio", "iters_mean", "time_s", "kkt_residual"}
    assert report["config"]["strategy"] == "all"
    assert report["config"]["restarts"] == 3
    assert report["input"] == edge_file
    assert set(report["times"]) == {"parse_s", "solve_s", "total_s"}


def test_compute_disconnected_report(tmp_path, capsys):
    path = _write(tmp_path, Hypergraph.from_edges(6, 3, [(0, 1, 2), (3, 4, 5)]), "d.hg")
    assert main(["compute", "--input", path, "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["alpha"] == 0.0
    assert report["argmin_vertex"] is None
    assert report["per_vertex"] == []
    assert report["connected"] is False


def test_compute_human_summary(edge_file, tmp_path, capsys):
    assert main(["compute", "--input", edge_file, "--restarts", "2"]) == 0
    out = capsys.readouterr().out
    assert "alpha = " in out and "argmin vertex" in out and "j=" in out
    path = _write(tmp_path, Hypergraph.from_edges(6, 3, [(0, 1, 2), (3, 4, 5)]), "d.hg")
    assert main(["compute", "--input", path]) == 0
    assert "(disconnected)" in capsys.readouterr().out


def test_compute_writes_the_report_file(edge_file, tmp_path, capsys):
    out = str(tmp_path / "report.json")
    rc = main(["compute", "--input", edge_file, "--restarts", "2", "--json", "-o", out])
    assert rc == 0
    payload = capsys.readouterr().out
    with open(out, encoding="ascii") as fh:
        assert fh.read() == payload
    json.loads(payload)


def test_compute_file_only_is_quiet(edge_file, tmp_path, capsys):
    out = str(tmp_path / "report.json")
    assert main(["compute", "--input", edge_file, "--restarts", "2", "-o", out]) == 0
    assert capsys.readouterr().out == ""
    with open(out, encoding="ascii") as fh:
        assert json.load(fh)["alpha"] == pytest.approx(1.0, abs=1e-10)


def test_compute_missing_file(tmp_path, capsys):
    assert main(["compute", "--input", str(tmp_path / "nope.hg")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_compute_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.hg"
    bad.write_text("3 3\n1 2 3\n", encoding="ascii")
    assert main(["compute", "--input", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("sigma", ["0.25,0.5", "0.9,0.5,0.75", "a,b,c"])
def test_compute_rejects_bad_sigma(edge_file, capsys, sigma):
    assert main(["compute", "--input", edge_file, "--sigma", sigma]) == 2
    assert "error:" in capsys.readouterr().err


def test_solver_failure_exit_code(edge_file, capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverError("no restart converged for pinned vertex 0")

    monkeypatch.setattr("hypercon.cli.compute_alpha", boom)
    assert main(["compute", "--input", edge_file]) == 3
    assert "no restart converged" in capsys.readouterr().err


def test_reports_repeat_bit_for_bit(path_file, capsys, monkeypatch):
    argv = ["compute", "--input", path_file, "--restarts", "4", "--seed", "7", "--json"]

    def run():
        assert main(argv) == 0
        report = json.loads(capsys.readouterr().out)
        report.pop("times")
        for row in report["per_vertex"]:
            row.pop("time_s")
        return report

    first = run()
    assert run() == first
    monkeypatch.setenv("HYPERCON_THREADS", "3")
    assert run() == first


def test_threads_env_must_be_an_integer(edge_file, capsys, monkeypatch):
    monkeypatch.setenv("HYPERCON_THREADS", "many")
    assert main(["compute", "--input", edge_file, "--restarts", "2"]) == 0
    assert "ignoring non-integer" in capsys.readouterr().err


# -------------------------------------------------------------------- bench


def test_bench_two_path_rows_sorted_and_decreasing(capsys):
    assert main(["bench", "two-path", "--n-list", "8,6", "--restarts", "6"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,alpha,ratio,iter,time_s,upper_bound"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == [6, 8]
    assert float(rows[0][1]) > float(rows[1][1]) > 0.0
    assert rows[0][5] == ""  # no closed-form bound column for this family


def test_bench_kn_minus_stays_below_the_bound(tmp_path):
    out = str(tmp_path / "t.csv")
    assert main(["bench", "kn-minus", "--n-list", "8", "--restarts", "6", "-o", out]) == 0
    with open(out, encoding="ascii") as fh:
        header, row = fh.read().strip().splitlines()
    assert header == "n,alpha,ratio,iter,time_s,upper_bound"
    n, alpha, ratio, itr, _t, bound = row.split(",")
    assert int(n) == 8
    assert float(bound) == pytest.approx(upper_bound_vertex_cut(8, 3, 5), abs=1e-6)
    assert float(alpha) <= float(bound) + 1e-6
    assert 0.0 < float(ratio) <= 1.0 and float(itr) >= 1.0


@pytest.mark.parametrize(
    "argv",
    [
        ["bench", "two-path", "--n-list", "7", "--restarts", "2"],
        ["bench", "two-path", "--n-list", " ", "--restarts", "2"],
        ["bench", "kn-minus", "--n-list", "3", "--restarts", "2"],
    ],
)
def test_bench_rejects_bad_sizes(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------- oracle


def test_oracle_beta_pass_and_fail(capsys):
    assert main(["oracle", "beta", "--l", "4", "--restarts", "20"]) == 0
    out = capsys.readouterr().out
    assert "beta(4) = -0.618033" in out and "PASS" in out
    assert main(["oracle", "beta", "--l", "4", "--restarts", "20", "--tol", "-0.2"]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert main(["oracle", "beta", "--l", "5", "--restarts", "20"]) == 2


def test_oracle_grid_agreement(tmp_path, capsys):
    path = _write(tmp_path, complete(5, 3), "k5.hg")
    assert main(["oracle", "grid", "--input", path, "--depth", "30", "--restarts", "5"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "grid minimum" in out


def test_oracle_grid_rejects_large_instances(tmp_path, capsys):
    path = _write(tmp_path, complete(14, 3), "k14.hg")
    assert main(["oracle", "grid", "--input", path]) == 2
    assert "too large" in capsys.readouterr().err


def test_oracle_grid_rejects_bad_depth(tmp_path, capsys):
    path = _write(tmp_path, complete(5, 3), "k5.hg")
    assert main(["oracle", "grid", "--input", path, "--depth", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_oracle_edge_cut(tmp_path, capsys):
    path = _write(tmp_path, sunflower(3, 3), "s.hg")
    assert main(["oracle", "edge-cut", "--input", path, "--restarts", "5"]) == 0
    out = capsys.readouterr().out
    assert "edge connectivity = 1" in out and "PASS" in out
    assert main(["oracle", "edge-cut", "--input", path, "--restarts", "5", "--tol", "-5"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_oracle_edge_cut_rejects_large_edge_sets(tmp_path, capsys):
    path = _write(tmp_path, complete(7, 3), "k7.hg")
    assert main(["oracle", "edge-cut", "--input", path, "--restarts", "2"]) == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------- top level


def test_commands_are_required():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_console_script_is_installed():
    exe = shutil.which("hypercon")
    assert exe is not None
    out = subprocess.run(
        [exe, "gen", "squid", "--k", "3"], capture_output=True, text=True, check=True
    )
    assert out.stdout.startswith("3 7 3")
