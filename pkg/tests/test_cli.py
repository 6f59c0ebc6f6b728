"""CLI surface tests: subcommands, formats, exit codes, round-trips."""

import json

import numpy as np
import pytest

from bgstates import bipartite as bp
from bgstates import cli
from bgstates.errors import SeriesConvergenceError


def run_cli(args, capsys=None):
    code = cli.main(args)
    return code


class TestStateBipartite:
    ARGS = ["state-bipartite", "q=0.9", "a1=0.3", "a2=0.5", "k1=1", "k2=1",
            "delta=1", "N=50"]

    def test_json_payload(self, tmp_path):
        out = tmp_path / "state.json"
        assert run_cli(self.ARGS + [f"out={out}"]) == 0
        data = json.loads(out.read_text())
        assert data["schmidt"]["entropy"] > 0
        assert data["residual_interior"] <= 1e-8
        assert data["norm_rel_err"] <= 1e-8
        assert len(data["coefficients"]) == 51

    def test_round_trip(self, tmp_path):
        out = tmp_path / "state.json"
        run_cli(self.ARGS + [f"out={out}"])
        M, data = cli.load_state_json(str(out))
        assert bp.eigen_residual(M) == pytest.approx(data["residual_interior"],
                                                     abs=1e-12)
        assert bp.schmidt_entropy(M).entropy == pytest.approx(
            data["schmidt"]["entropy"], abs=1e-12)

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(self.ARGS + [f"out={a}"])
        run_cli(self.ARGS + [f"out={b}"])
        assert a.read_bytes() == b.read_bytes()

    def test_perturbation_is_seeded_and_sensitive(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        extra = ["perturb=0.01", "seed=7"]
        run_cli(self.ARGS + extra + [f"out={a}"])
        run_cli(self.ARGS + extra + [f"out={b}"])
        da, db = json.loads(a.read_text()), json.loads(b.read_text())
        assert da["perturbed_residual"] == db["perturbed_residual"]
        assert da["perturbed_residual"] > 1e-3

    def test_classical_mode(self, tmp_path):
        out = tmp_path / "c.json"
        args = ["state-bipartite", "q=classical", "a1=0.3", "a2=0.5", "k1=1",
                "k2=1", "N=40", f"out={out}"]
        assert run_cli(args) == 0
        data = json.loads(out.read_text())
        assert data["schmidt"]["entropy"] == pytest.approx(0.0, abs=1e-10)

    def test_crossing_mode(self, tmp_path):
        out = tmp_path / "x.json"
        args = ["state-bipartite", "q=1.25", "a1=0.3", "a2=0.5", "k1=1",
                "k2=1", "delta=1", "N=45", f"out={out}"]
        assert run_cli(args) == 0
        data = json.loads(out.read_text())
        assert data["residual_interior"] <= 1e-8
        # q > 1 artifacts round-trip too
        M, stored = cli.load_state_json(str(out))
        assert bp.eigen_residual(M) == pytest.approx(stored["residual_interior"],
                                                     abs=1e-12)

    def test_csv_state_is_coefficient_table(self, tmp_path):
        out = tmp_path / "s.csv"
        args = ["state-bipartite", "q=0.9", "a1=0.3", "a2=0.5", "k1=1", "k2=1",
                "delta=1", "N=20", "format=csv", f"out={out}"]
        assert run_cli(args) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n1,n2,re,im"
        assert len(lines) == 1 + 21 * 21


class TestStateSingle:
    def test_payload(self, tmp_path):
        out = tmp_path / "s.json"
        args = ["state-single", "q=0.9", "alpha=0.8", "k=1", "N=50", f"out={out}"]
        assert run_cli(args) == 0
        data = json.loads(out.read_text())
        assert data["residual"] <= 1e-10
        coeffs = np.array([complex(re, im) for re, im in data["coefficients"]])
        assert abs(np.linalg.norm(coeffs) - 1) < 1e-10


class TestVerifyMoments:
    def test_classical(self, tmp_path):
        out = tmp_path / "m.json"
        args = ["verify-moments", "mode=classical", "k=1", "nmax=3", f"out={out}"]
        assert run_cli(args) == 0
        data = json.loads(out.read_text())
        assert all(rec["rel_err"] <= 1e-5 for rec in data["records"])

    def test_q_csv(self, tmp_path):
        out = tmp_path / "m.csv"
        args = ["verify-moments", "mode=q", "q=0.95", "k=1", "nmax=2",
                "format=csv", f"out={out}"]
        assert run_cli(args) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n,lhs,rhs,rel_err"
        assert len(lines) == 4


class TestSweepQ:
    def test_entropy_endpoints(self, tmp_path):
        out = tmp_path / "sweep.csv"
        args = ["sweep-q", "from=0.999", "to=0.5", "steps=4", "a1=0.3", "a2=0.5",
                "k1=1", "k2=1", "delta=1", "N=40", "format=csv", f"out={out}"]
        assert run_cli(args) == 0
        lines = out.read_text().strip().splitlines()
        header = lines[0].split(",")
        ientropy = header.index("entropy")
        first = float(lines[1].split(",")[ientropy])
        last = float(lines[-1].split(",")[ientropy])
        assert first <= 1e-6
        assert last > 1e-6

    def test_deterministic_csv(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep-q", "from=0.99", "to=0.7", "steps=3", "a1=0.3", "a2=0.5",
                "k1=1", "k2=1", "delta=1", "N=40", "format=csv"]
        run_cli(args + [f"out={a}"])
        run_cli(args + [f"out={b}"])
        assert a.read_bytes() == b.read_bytes()


class TestGOracle:
    def test_triangle(self, tmp_path):
        out = tmp_path / "g.json"
        args = ["g-oracle", "q=0.7", "a1=0.3", "a2=0.5", "k1=1", "k2=1",
                "delta=0.9", "nmax=12", f"out={out}"]
        assert run_cli(args) == 0
        data = json.loads(out.read_text())
        assert data["max_rel_recurrence_vs_ansatz"] <= 1e-11
        assert data["max_rel_recurrence_vs_closed"] <= 1e-11


class TestExitCodes:
    def test_invalid_config_is_2(self, capsys):
        assert run_cli(["state-bipartite", "q=0.9", "a1=0.3", "k1=1"]) == 2
        assert "a2" in capsys.readouterr().err

    def test_bad_subcommand_is_2(self, capsys):
        assert run_cli(["frobnicate"]) == 2

    def test_precondition_named(self, capsys):
        code = run_cli(["state-bipartite", "q=0.9", "a1=0.5", "a2=-0.5",
                        "k1=1", "k2=1", "N=30"])
        assert code == 2
        assert "alpha1 + alpha2" in capsys.readouterr().err

    def test_truncation_is_2(self, capsys):
        code = run_cli(["state-single", "q=classical", "alpha=2.5", "k=1", "N=4"])
        assert code == 2
        assert "truncation" in capsys.readouterr().err

    def test_numerical_failure_is_3(self, monkeypatch, capsys):
        def boom(cfg):
            raise SeriesConvergenceError("test series", "synthetic")
        monkeypatch.setitem(cli._RUNNERS, "state-single", boom)
        code = run_cli(["state-single", "q=0.9", "alpha=0.5", "k=1", "N=20"])
        assert code == 3
        assert "test series" in capsys.readouterr().err

    def test_help_is_0(self):
        assert run_cli(["--help"]) == 0


def test_float_formatting_17_sig_digits():
    assert cli._fmt(1.0) == "1.0000000000000000e+00"
    assert cli._fmt(1 / 3) == "3.3333333333333331e-01"
