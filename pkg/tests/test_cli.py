import json
import subprocess
import sys

import pytest


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "hkprop.cli"] + args,
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture
def tiny_config(tmp_path):
    cfg = {
        "system": {"kind": "harmonic", "m": 1.0, "omega": 1.0},
        "initial_state": {"q0": -1.0, "p0": 0.0, "gamma": 2.0, "hbar": 1.0},
        "sampling": {"scheme": "sqrt-husimi"},
        "run": {"dt": 1.0, "n_steps": 0, "n_trajectories": 800, "seed": 3},
        "grid": {"x_min": -12.0, "x_max": 10.0, "n_points": 256},
        "output": {"directory": str(tmp_path / "out"), "formats": ["csv"]},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestPlan:
    def test_values(self, tmp_path):
        r = run_cli(["plan", "--sigma2", "3", "--epsilon", "0.1", "--p", "0.05"],
                    tmp_path)
        assert r.returncode == 0
        payload = json.loads(r.stdout)
        assert payload["chebyshev"] == 6000
        assert 200 <= payload["clt"] <= 206

    def test_not_applicable_branch(self, tmp_path):
        r = run_cli(["plan", "--sigma2", "3", "--epsilon", "0.1", "--p", "0.6"],
                    tmp_path)
        assert r.returncode == 0
        assert json.loads(r.stdout)["clt"] == "not-applicable"

    def test_invalid_query_is_config_error(self, tmp_path):
        r = run_cli(["plan", "--sigma2", "-3", "--epsilon", "0.1", "--p", "0.05"],
                    tmp_path)
        assert r.returncode == 2


class TestConfigHandling:
    def test_missing_file(self, tmp_path):
        r = run_cli(["initial-error", "--config", "nope.json"], tmp_path)
        assert r.returncode == 2
        assert "config" in r.stderr

    def test_json_error_reports_line(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "system": }\n')
        r = run_cli(["initial-error", "--config", str(bad)], tmp_path)
        assert r.returncode == 2
        assert "line 2" in r.stderr

    def test_unknown_key_rejected(self, tmp_path, tiny_config):
        cfg = json.loads(tiny_config.read_text())
        cfg["run"]["gpu"] = True
        bad = tmp_path / "unknown.json"
        bad.write_text(json.dumps(cfg))
        r = run_cli(["initial-error", "--config", str(bad)], tmp_path)
        assert r.returncode == 2
        assert "unknown keys" in r.stderr

    def test_validation_happens_before_compute(self, tmp_path, tiny_config):
        cfg = json.loads(tiny_config.read_text())
        cfg["run"]["n_trajectories"] = 10 ** 9  # would run forever if started
        cfg["grid"]["n_points"] = 1000          # fails fast instead
        bad = tmp_path / "fast.json"
        bad.write_text(json.dumps(cfg))
        r = run_cli(["initial-error", "--config", str(bad)], tmp_path)
        assert r.returncode == 2


class TestOutputs:
    def test_csv_metadata_and_naming(self, tmp_path, tiny_config):
        r = run_cli(["initial-error", "--config", str(tiny_config)], tmp_path)
        assert r.returncode == 0, r.stderr
        out = r.stdout.strip()
        assert out.endswith(".csv") and "initial-error_" in out
        lines = open(out).read().splitlines()
        assert lines[0] == "# experiment: initial-error"
        assert any(l.startswith("# config_hash:") for l in lines)
        assert any(l.startswith("# seed: 3") for l in lines)
        assert any(l.startswith("# version:") for l in lines)
        header_idx = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert lines[header_idx] == "scheme,N,l2_error,analytic_prediction"

    def test_seed_override_changes_hash(self, tmp_path, tiny_config):
        r1 = run_cli(["initial-error", "--config", str(tiny_config)], tmp_path)
        r2 = run_cli(["initial-error", "--config", str(tiny_config), "--seed", "4"],
                     tmp_path)
        assert r1.stdout != r2.stdout

    def test_rerun_byte_identical_across_workers(self, tmp_path, tiny_config):
        outputs = []
        for workers in ("1", "4", "8"):
            r = run_cli(["initial-error", "--config", str(tiny_config),
                         "--workers", workers], tmp_path)
            assert r.returncode == 0, r.stderr
            outputs.append(open(r.stdout.strip(), "rb").read())
        rerun = run_cli(["initial-error", "--config", str(tiny_config)], tmp_path)
        outputs.append(open(rerun.stdout.strip(), "rb").read())
        assert all(o == outputs[0] for o in outputs[1:])

    def test_preset_runs_without_config(self, tmp_path):
        r = run_cli(["density", "--preset", "desk", "--n", "64",
                     "--out-dir", str(tmp_path)], tmp_path)
        assert r.returncode == 0, r.stderr
        lines = open(r.stdout.strip()).read().splitlines()
        header = next(l for l in lines if not l.startswith("#"))
        assert header.split(",")[:2] == ["x", "density_reference"]
