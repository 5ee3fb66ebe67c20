"""Command-line interface: exit codes, outputs, and determinism."""

import json

import numpy as np
import pytest

from stchopt.cli import main


def read_bytes(path):
    return path.read_bytes()


class TestExitCodes:
    def test_invalid_method_exits_2_without_files(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main([
            "solve", "--problem", "toy", "--method", "newton", "--out", str(out)
        ])
        assert code == 2
        assert not out.exists()
        assert "config error" in capsys.readouterr().err

    def test_invalid_problem_exits_2(self, tmp_path):
        assert main(["solve", "--problem", "F9", "--out", str(tmp_path / "o")]) == 2

    def test_bad_lambda_exits_2(self, tmp_path):
        code = main([
            "solve", "--problem", "toy", "--method", "stch",
            "--lambda", "0.5", "--out", str(tmp_path / "o"),
        ])
        assert code == 2

    def test_unknown_config_key_exits_2(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"definitely_not_a_key": 1}))
        code = main([
            "solve", "--problem", "toy", "--config", str(config),
            "--out", str(tmp_path / "o"),
        ])
        assert code == 2

    def test_success_exit_0(self, tmp_path):
        code = main([
            "solve", "--problem", "toy", "--method", "stch",
            "--iters", "20", "--out", str(tmp_path / "o"),
        ])
        assert code == 0


class TestSolveCommand:
    def test_writes_trajectory_and_summary(self, tmp_path):
        out = tmp_path / "solve"
        main([
            "solve", "--problem", "toy", "--method", "stch",
            "--lambda", "0.5,0.5", "--iters", "200", "--out", str(out),
        ])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["balance_residual"] <= 1e-3
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0].startswith("# stchopt version=")

    def test_degenerate_preference_minimizes_one_objective(self, tmp_path):
        out = tmp_path / "ls"
        main([
            "solve", "--problem", "F1", "--method", "ls",
            "--lambda", "1,0", "--iters", "300", "--out", str(out),
        ])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["final_f"][0] == pytest.approx(0.0, abs=1e-2)

    def test_mgda_runs(self, tmp_path):
        out = tmp_path / "mgda"
        code = main([
            "solve", "--problem", "toy", "--method", "mgda",
            "--iters", "100", "--out", str(out),
        ])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["qp_solves"] > 0


class TestRaceCommand:
    def test_output_schema_and_gap_signs(self, tmp_path):
        out = tmp_path / "race"
        main(["race", "--trials", "10", "--iters", "60", "--out", str(out)])
        lines = (out / "race.csv").read_text().splitlines()
        header_rows = [ln for ln in lines if ln.startswith("# ")]
        assert any("mu=" in ln for ln in header_rows)
        columns = next(ln for ln in lines if not ln.startswith("# ")).split(",")
        assert columns == [
            "evals", "mean_gap_tch", "median_gap_tch", "mean_gap_stch", "median_gap_stch",
        ]
        data = np.array([
            [float(v) for v in ln.split(",")]
            for ln in lines
            if not ln.startswith("# ") and not ln.startswith("evals")
        ])
        assert data.shape[0] == 61
        assert np.all(data[:, 1:] >= 0)
        # the smooth method wins at the final budget
        assert data[-1, 3] < data[-1, 1]


class TestPslCommand:
    def test_three_objective_pipeline(self, tmp_path):
        out = tmp_path / "psl3"
        code = main([
            "psl", "--problem", "RocketInjector", "--loss", "stch",
            "--iters", "30", "--seeds", "1", "--resolution", "200",
            "--out", str(out),
        ])
        assert code == 0
        front_lines = (out / "front.csv").read_text().splitlines()
        columns = next(ln for ln in front_lines if not ln.startswith("# "))
        assert columns == "f1,f2,f3"
        assert (out / "model.json").exists()
        assert (out / "dhv_report.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_seeds"] == 1


class TestDeterminism:
    def run_twice(self, args_fn, tmp_path, files):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args_fn(a)) == 0
        assert main(args_fn(b)) == 0
        for name in files:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_solve_byte_identical(self, tmp_path):
        self.run_twice(
            lambda out: [
                "solve", "--problem", "F2", "--method", "stch",
                "--iters", "40", "--seed", "5", "--out", str(out),
            ],
            tmp_path,
            ["trajectory.csv", "summary.json"],
        )

    def test_race_byte_identical(self, tmp_path):
        self.run_twice(
            lambda out: ["race", "--trials", "5", "--iters", "40", "--out", str(out)],
            tmp_path,
            ["race.csv"],
        )

    def test_psl_byte_identical(self, tmp_path):
        self.run_twice(
            lambda out: [
                "psl", "--problem", "F1", "--loss", "stch",
                "--iters", "25", "--seeds", "2", "--out", str(out),
            ],
            tmp_path,
            ["dhv_report.csv", "model.json", "front.csv", "loss_history.csv", "summary.json"],
        )

    def test_table_byte_identical_with_cache(self, tmp_path):
        out = tmp_path / "table"
        args = [
            "table", "--problems", "F1,GearTrain", "--methods", "ls,stch",
            "--iters", "20", "--seeds", "2", "--resolution", "100",
            "--out", str(out),
        ]
        assert main(args) == 0
        first = (out / "table.csv").read_bytes()
        assert main(args) == 0  # second run resolves every cell from cache
        assert (out / "table.csv").read_bytes() == first
        lines = first.decode().splitlines()
        rows = [ln for ln in lines if not ln.startswith("# ")]
        assert rows[0] == "problem,method,mean_dhv,std_dhv,n_seeds"
        assert len(rows) == 1 + 4
