import math

import numpy as np
import pytest

from gnormal.cli import main


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestPhiCommand:
    def test_single_beta_with_derivatives(self, tmp_path):
        out = tmp_path / "phi.csv"
        code = main(["phi", "--betas", "2", "--n", "1000",
                     f"--range={-math.pi}:{3*math.pi}", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["x", "phi", "phi_d1", "phi_d2"]
        assert len(rows) == 1000
        vals = np.array([float(r[1]) for r in rows])
        assert vals.max() == pytest.approx(2.0 / 3.0, abs=1e-4)
        assert vals.min() == pytest.approx(-4.0 / 3.0, abs=1e-4)

    def test_beta_one_is_cosine(self, tmp_path):
        out = tmp_path / "phi.csv"
        assert main(["phi", "--betas", "1", "--n", "200", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        for r in rows[::17]:
            # 12-significant-digit CSV rounding on both columns
            assert float(r[1]) == pytest.approx(math.cos(float(r[0])), abs=1e-9)

    def test_multi_beta_columns_keep_separation(self, tmp_path):
        out = tmp_path / "phi.csv"
        code = main(["phi", "--betas", "1.5,3", "--range", f"0:{2*math.pi}",
                     "--n", "2000", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert len(header) == 3
        diffs = [float(r[1]) - float(r[2]) for r in rows]
        assert min(diffs) >= 0.3 - 1e-9

    def test_bad_beta_is_usage_error(self):
        assert main(["phi", "--betas", "0.5"]) == 64

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["phi", "--betas", "2.5", "--n", "333"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSolveCommand:
    def test_constant_initial_data(self, tmp_path):
        out = tmp_path / "u.csv"
        code = main(["solve", "--schedule", "1:2:1", "--init", "const:7",
                     "--n", "64", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["x", "u"]
        assert all(float(r[1]) == 7.0 for r in rows)

    def test_error_estimate_flag(self, capsys, tmp_path):
        out = tmp_path / "u.csv"
        code = main(["solve", "--schedule", "1:1:0.5", "--init", "cos:freq=1",
                     "--n", "128", "--error-estimate", "--out", str(out)])
        assert code == 0
        assert "error_estimate=" in capsys.readouterr().out

    def test_bad_schedule_is_usage_error(self):
        assert main(["solve", "--schedule", "1:2", "--init", "const:1"]) == 64
        assert main(["solve", "--schedule", "2:1:1", "--init", "const:1"]) == 64


class TestExpectCommands:
    def test_classical_cosine(self, capsys):
        code = main(["expect", "--g", "1:1", "--f", "cos:freq=1", "--n", "512"])
        assert code == 0
        out = capsys.readouterr().out
        assert "value=0.6065" in out

    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["expect", "--g", "1:2", "--f", "phi:beta=2", "--t", "0.5,1",
                     "--n", "512", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["t", "x", "value", "error_estimate"]
        assert len(rows) == 2

    def test_convolve_classical(self, capsys):
        code = main(["convolve", "--g", "1:1", "--g", "1:1",
                     "--f", "cos:freq=1", "--n", "512"])
        assert code == 0
        value = float(capsys.readouterr().out.split("value=")[1].split()[0])
        assert value == pytest.approx(math.exp(-1.0), abs=5e-4)

    def test_comma_pair_form_accepted(self, capsys):
        assert main(["expect", "--g", "1,1", "--f", "const:2.5", "--n", "512"]) == 0
        assert "value=2.5" in capsys.readouterr().out

    def test_unknown_function_key_rejected(self):
        assert main(["expect", "--g", "1:1", "--f", "cos:frequency=1"]) == 64
        assert main(["expect", "--g", "1:1", "--f", "sinc:freq=1"]) == 64


class TestTheoremCommands:
    def test_separation_confirmed(self, capsys, tmp_path):
        out = tmp_path / "sep.csv"
        code = main(["separation", "--alpha", "1.5", "--beta", "3", "--out", str(out)])
        assert code == 0
        assert "verdict=confirmed" in capsys.readouterr().out
        header, _ = read_csv(out)
        assert header == ["t", "x", "measured", "reference", "bound", "error_estimate"]

    def test_separation_bad_order(self):
        assert main(["separation", "--alpha", "3", "--beta", "1.5"]) == 64

    def test_eigen_check(self, capsys):
        code = main(["eigen-check", "--g", "1:2", "--t", "0.25", "--n", "256"])
        assert code == 0
        assert "eigen-decay: verdict=confirmed" in capsys.readouterr().out

    def test_degenerate_generator_usage_error(self):
        assert main(["eigen-check", "--g", "0:1", "--t", "1"]) == 64


class TestConvergenceCommand:
    def test_table_and_orders(self, capsys, tmp_path):
        out = tmp_path / "conv.csv"
        code = main(["convergence", "--g", "1:2", "--n-list", "64,128,256",
                     "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["n", "error", "order"]
        assert len(rows) == 3
        orders = [float(r[2]) for r in rows[1:]]
        assert all(o >= 1.0 for o in orders)


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("betas = 1\nn = 50\n")
        out = tmp_path / "phi.csv"
        code = main(["phi", "--config", str(cfg), "--n", "60", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 60  # flag beats config
        assert float(rows[0][1]) == pytest.approx(math.cos(float(rows[0][0])), abs=1e-9)

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mystery = 1\n")
        assert main(["phi", "--config", str(cfg)]) == 64


class TestErrorPaths:
    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 64

    def test_missing_required_flag(self):
        assert main(["expect", "--g", "1:1"]) == 64

    def test_unwritable_output(self):
        assert main(["phi", "--betas", "2", "--n", "10",
                     "--out", "/nonexistent-dir/x.csv"]) == 1
