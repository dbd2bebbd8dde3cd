import json
from pathlib import Path

import pytest
import yaml

from polypass.cli import main


def run_cli(tmp_path, config, command, extra=None):
    cfg_path = tmp_path / "run.yaml"
    cfg_path.write_text(yaml.safe_dump(config), encoding="utf-8")
    argv = [command, "--config", str(cfg_path)] + (extra or [])
    return main(argv)


def read_meta(outdir):
    return json.loads((Path(outdir) / "meta.json").read_text())


class TestConfigHandling:
    def test_print_config_resolves_defaults(self, capsys):
        assert main(["solve", "--print-config"]) == 0
        doc = yaml.safe_load(capsys.readouterr().out)
        assert doc["solve"]["tol"] == 1e-8
        assert doc["problem"]["modes"] == 32

    def test_missing_parameter_names_field(self, tmp_path, capsys):
        code = run_cli(tmp_path, {"nonlinearity": {"kind": "power",
                                                   "params": {}}}, "check")
        assert code == 2
        assert "q" in capsys.readouterr().err

    def test_bad_modes(self, tmp_path, capsys):
        code = run_cli(tmp_path, {"problem": {"modes": 2}}, "solve")
        assert code == 2
        assert "problem.modes" in capsys.readouterr().err

    def test_bad_dimension(self, tmp_path, capsys):
        code = run_cli(tmp_path, {"problem": {"d": 3}}, "solve")
        assert code == 2
        assert "problem.d" in capsys.readouterr().err

    def test_config_file_missing(self, capsys):
        assert main(["solve", "--config", "/nonexistent.yaml"]) == 2


class TestCheckCommand:
    def test_linear_reports_h1_violated(self, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16, "N_nominal": 5},
            "nonlinearity": {"kind": "linear", "params": {"a": 1.0}},
            "check": {"points_per_decade": 60},
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "check") == 0
        report = read_meta(out)  # meta.json summary
        assert "H1" in report["results"]["violated"]
        full = json.loads((out / "report.json").read_text())
        h1 = next(r for r in full["results"]["reports"]
                  if r["hypothesis_id"] == "H1")
        assert h1["verdict"] == "violated"
        assert h1["witnesses"][0][1] == pytest.approx(0.0, abs=1e-12)

    def test_power_theta_fit(self, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16, "N_nominal": 5},
            "nonlinearity": {"kind": "power", "params": {"q": 3.0}},
            "check": {"points_per_decade": 60, "ids": ["AR-i"]},
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "check") == 0
        full = json.loads((out / "report.json").read_text())
        ar = full["results"]["reports"][0]
        assert ar["verdict"] == "satisfied-on-sample"
        assert abs(ar["constants"]["theta"] - 4.0) <= 0.01


class TestSolveCommand:
    CFG = {
        "problem": {"d": 1, "m": 1, "modes": 32},
        "nonlinearity": {"kind": "power", "params": {"q": 3.0}},
    }

    def test_writes_outputs(self, tmp_path):
        out = tmp_path / "out"
        cfg = dict(self.CFG, out=str(out))
        assert run_cli(tmp_path, cfg, "solve") == 0
        assert (out / "solution.csv").exists()
        assert (out / "trace.csv").exists()
        meta = read_meta(out)
        assert meta["results"]["converged"]
        assert meta["results"]["residual"] <= 1e-8
        assert meta["version"]
        assert len(meta["config_sha256"]) == 64
        assert len(meta["results"]["ps_records"]) >= 1
        header = (out / "solution.csv").read_text().splitlines()[0]
        assert header == "x,u"

    def test_no_valley_exit_code(self, tmp_path):
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16},
            "nonlinearity": {"kind": "linear", "params": {"a": 0.5}},
            "out": str(tmp_path / "nv"),
        }
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert run_cli(tmp_path, cfg, "solve") == 3

    def test_iteration_budget_exit_code(self, tmp_path):
        cfg = dict(self.CFG, out=str(tmp_path / "mi"),
                   solve={"max_iter": 2, "polish": False})
        assert run_cli(tmp_path, cfg, "solve") == 4

    def test_reproducible_byte_identical(self, tmp_path):
        out = tmp_path / "repro"
        cfg = dict(self.CFG, out=str(out))
        run_cli(tmp_path, cfg, "solve")
        first = {name: (out / name).read_bytes()
                 for name in ("solution.csv", "trace.csv", "meta.json")}
        run_cli(tmp_path, cfg, "solve")
        for name, data in first.items():
            assert (out / name).read_bytes() == data

    def test_flag_overrides(self, tmp_path):
        out = tmp_path / "ov"
        cfg = dict(self.CFG)
        code = run_cli(tmp_path, cfg, "solve",
                       ["--out", str(out), "--modes", "16", "--tol", "1e-6"])
        assert code == 0
        meta = read_meta(out)
        assert meta["config"]["problem"]["modes"] == 16
        assert meta["config"]["solve"]["tol"] == 1e-6


class TestMultiCommand:
    def test_three_pairs(self, tmp_path):
        out = tmp_path / "multi"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 32},
            "nonlinearity": {"kind": "power", "params": {"q": 3.0}},
            "multi": {"n_solutions": 3},
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "multi") == 0
        meta = read_meta(out)
        energies = meta["results"]["energies"]
        assert len(energies) == 3
        assert energies == sorted(energies)
        for k in range(3):
            assert (out / f"pair_{k:02d}" / "solution.csv").exists()


class TestTruncateCommand:
    def test_stops_and_writes_stages(self, tmp_path):
        out = tmp_path / "tr"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16},
            "nonlinearity": {"kind": "oscillating", "params": {"p": 2.0}},
            "truncate": {"p": 2.0, "s1": 0.5, "ratio": 10.0, "n_max": 5},
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "truncate") == 0
        meta = read_meta(out)
        assert meta["results"]["stopped"]
        assert (out / "stages.csv").exists()
        assert (out / "solution.csv").exists()

    def test_not_stopped_exit_code(self, tmp_path):
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16},
            "nonlinearity": {"kind": "oscillating", "params": {"p": 2.0}},
            "truncate": {"p": 2.0, "s1": 1e-3, "ratio": 2.0, "n_max": 2},
            "out": str(tmp_path / "ns"),
        }
        assert run_cli(tmp_path, cfg, "truncate") == 5

    def test_precondition_exit_code(self, tmp_path):
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16},
            "nonlinearity": {"kind": "linear", "params": {"a": 2.0}},
            "out": str(tmp_path / "pc"),
        }
        assert run_cli(tmp_path, cfg, "truncate") == 2


class TestBootstrapCommand:
    def test_chain_csv(self, tmp_path):
        out = tmp_path / "bs"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16, "N_nominal": 5},
            "bootstrap": {"p": 2.0, "p1": 1.3},
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "bootstrap") == 0
        rows = (out / "chain.csv").read_text().splitlines()
        assert rows[0] == "k,p_k,p_k_star"
        assert len(rows) == 4  # header + 3 steps
        assert read_meta(out)["results"]["terminated"]

    def test_invalid_exponents(self, tmp_path, capsys):
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16, "N_nominal": 5},
            "bootstrap": {"p": 3.0, "p1": 1.3},
            "out": str(tmp_path / "bad"),
        }
        assert run_cli(tmp_path, cfg, "bootstrap") == 2


class TestSweepCommand:
    def test_fans_out_runs(self, tmp_path):
        out = tmp_path / "sweep"
        cfg = {
            "problem": {"d": 1, "m": 1, "modes": 16, "N_nominal": 5},
            "sweep": {
                "command": "bootstrap",
                "overrides": [
                    {"bootstrap.p1": 1.3},
                    {"bootstrap.p1": 1.4285714285714286},
                ],
            },
            "out": str(out),
        }
        assert run_cli(tmp_path, cfg, "sweep") == 0
        assert (out / "run_000" / "chain.csv").exists()
        assert (out / "run_001" / "chain.csv").exists()
        meta = read_meta(out)
        assert meta["results"]["n_runs"] == 2
