"""
Tests for the command-line front end.
"""
import csv
import io
import json

import pytest

from src.main import build_parser, evaluate, run_command
from src.core.teleport import GaussianInput, TeleportSetting
from src.ui.exporter import load_csv_rows, read_metadata


def _csv_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestParser:
    """Tests for argument parsing."""

    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["--no-progress", "figure", "3", "--set", "count=5"])
        assert args.command == "figure"
        assert args.figure_id == 3
        assert args.overrides == ["count=5"]
        assert args.no_progress

    def test_unknown_flag_exits_with_usage_code(self, capsys):
        assert run_command(["fidelity", "--bogus"]) == 2


class TestFidelityCommand:
    """Tests for the fidelity subcommand."""

    def test_single_photon_classical_level(self, capsys):
        code = run_command(["--no-progress", "fidelity", "--state", "fock", "--n", "1", "--lambda", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("# ")
        row = _csv_rows(out)[0]
        assert float(row["F"]) == pytest.approx(0.25, abs=1e-12)
        assert row["method"] == "closed_form"

    def test_missing_zeta0(self, capsys):
        """A squeezed input without zeta0 names the missing field."""
        code = run_command(["--no-progress", "fidelity", "--state", "squeezed"])
        err = capsys.readouterr().err
        assert code == 2
        assert "zeta0" in err
        assert "❌ Error" in err

    def test_out_of_range_transmission(self, capsys):
        code = run_command(["--no-progress", "fidelity", "--state", "coherent", "--t1", "1.5"])
        assert code == 2
        assert "t1" in capsys.readouterr().err

    def test_json_format(self, capsys):
        code = run_command([
            "--no-progress", "fidelity", "--state", "coherent", "--alpha0", "0.7", "--lambda", "1", "--format", "json",
        ])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["rows"][0]["F"] == pytest.approx(0.5, abs=1e-10)
        assert payload["metadata"]["command"] == "fidelity"
        assert payload["metadata"]["state"]["alpha0"] == 0.7

    def test_output_file_is_reproducible(self, tmp_path, capsys):
        """The same command writes byte-identical files."""
        argv = ["--no-progress", "fidelity", "--state", "squeezed", "--zeta0", "0.88", "--zeta", "1.5", "--t2", "0.9"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_command(argv + ["--output", str(first)]) == 0
        assert run_command(argv + ["--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert capsys.readouterr().out == ""
        assert read_metadata(first)["channel"]["t2"] == 0.9
        row = load_csv_rows(first)[0]
        assert float(row["lambda"]) == pytest.approx(0.9)
        assert row["exceeded_classical"] == "true"

    def test_rotated_gaussian_uses_overlap(self):
        report = evaluate(GaussianInput(0.5), TeleportSetting(lam=1.0, sigma=0.2, phi_tilde=0.3))
        assert report.method == "overlap"


class TestOtherCommands:
    """Tests for the remaining subcommands."""

    def test_unknown_figure(self, capsys):
        assert run_command(["--no-progress", "figure", "99"]) == 2

    def test_figure_unknown_override(self, capsys):
        assert run_command(["--no-progress", "figure", "5", "--set", "bogus=1"]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_figure_rows(self, capsys):
        code = run_command(["--no-progress", "figure", "5", "--set", "count=3", "--set", "zeta0s=[0.88]",
                            "--set", "fock_ns=[1]"])
        out = capsys.readouterr().out
        assert code == 0
        rows = _csv_rows(out)
        assert len(rows) == 6
        assert {r["series"] for r in rows} == {"squeezed zeta0=0.88", "fock N=1"}
        meta = json.loads(out.splitlines()[0][2:])
        assert meta["params"]["count"] == 3

    def test_sweep(self, capsys):
        code = run_command(["--no-progress", "sweep", "--state", "coherent", "--parameter", "lambda",
                            "--start", "0.5", "--stop", "1.0", "--count", "3"])
        rows = _csv_rows(capsys.readouterr().out)
        assert code == 0
        assert len(rows) == 6
        assert [r["series"] for r in rows[:2]] == ["F", "classical"]

    def test_sweep_needs_two_points(self, capsys):
        code = run_command(["--no-progress", "sweep", "--state", "coherent", "--parameter", "zeta",
                            "--start", "0", "--stop", "1", "--count", "1"])
        assert code == 2

    def test_optimize_lambda(self, capsys):
        code = run_command(["--no-progress", "optimize-lambda", "--state", "squeezed", "--zeta0", "0.88",
                            "--zeta", "20", "--t2", "0.9", "--format", "json"])
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert code == 0
        assert row["lambda_opt"] == pytest.approx(0.9, abs=1e-3)
        assert row["lambda_star"] == pytest.approx(0.9)
        assert row["F_max"] >= row["F_star"] - 1e-12
        assert row["F_max"] > 0.86

    def test_optimize_source(self, capsys):
        code = run_command(["--no-progress", "optimize-source", "--state", "fock", "--n", "1",
                            "--l12", "0.1", "--format", "json"])
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert code == 0
        assert 0.0 <= row["l1_opt"] < 0.05

    def test_average_fidelity(self, capsys):
        code = run_command(["--no-progress", "average-fidelity", "--n-coh", "10", "--zeta", "1", "--t2", "0.9",
                            "--lambda", "0.9", "--format", "json"])
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert code == 0
        assert row["F_avg"] == pytest.approx(row["F_avg_closed_form"], rel=1e-9)

    def test_oracle_rejects_small_grid(self, capsys):
        assert run_command(["--no-progress", "oracle-check", "--fock", "10", "--grid-n", "128"]) == 2

    def test_oracle_negative_control(self, capsys):
        """A perturbed grid sigma fails the check with exit code 1."""
        code = run_command(["--no-progress", "oracle-check", "--fock", "1", "--perturb-sigma", "0.01"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 1
        assert payload["passed"] is False

    def test_oracle_fock_cases_pass(self, capsys):
        code = run_command(["--no-progress", "oracle-check", "--fock", "1"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert len(payload["cases"]) == 4

    def test_mc_check_requires_seed(self, capsys):
        code = run_command(["--no-progress", "mc-check", "--state", "coherent", "--samples", "100"])
        assert code == 2
        assert "seed" in capsys.readouterr().err.lower()

    def test_mc_check_rejects_fock(self, capsys):
        code = run_command(["--no-progress", "mc-check", "--state", "fock", "--n", "1", "--seed", "1"])
        assert code == 2

    def test_mc_check_is_deterministic(self, capsys):
        argv = ["--no-progress", "mc-check", "--state", "coherent", "--alpha0", "0.5", "--zeta", "1",
                "--samples", "2000", "--seed", "7", "--streams", "2"]
        first_code = run_command(argv)
        first = capsys.readouterr().out
        second_code = run_command(argv)
        second = capsys.readouterr().out
        assert first == second
        assert first_code == second_code
        assert first_code in (0, 1)
        row = _csv_rows(first)[0]
        assert float(row["standard_error"]) > 0.0
