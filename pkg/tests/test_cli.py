import json
import subprocess
import sys

import pytest

from airsgd.config import parse_config


def _cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "airsgd", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def _write_fast_config(tmp_path, **updates):
    proc = _cli("template", "minimal")
    doc = json.loads(proc.stdout)
    doc.update(T=6, eval_every=2, K=4)
    doc.update(updates)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_template_minimal_validates():
    proc = _cli("template", "minimal")
    assert proc.returncode == 0
    parse_config(json.loads(proc.stdout))


def test_template_paper_scale_contents():
    proc = _cli("template", "paper_scale")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["T"] == 800
    parse_config(doc)


def test_run_smoke(tmp_path):
    config = _write_fast_config(tmp_path)
    proc = _cli("run", "--config", str(config), "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    assert "final accuracy:" in proc.stdout
    assert "average power:" in proc.stdout
    assert (tmp_path / "metrics.csv").exists()


def test_run_override_lands_in_metrics_header(tmp_path):
    config = _write_fast_config(tmp_path)
    proc = _cli("run", "--config", str(config), "--set", "K=5",
                "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    header = (tmp_path / "metrics.csv").read_text().splitlines()[0]
    assert json.loads(header[len("# config: "):])["K"] == 5


def test_run_missing_config_exits_2(tmp_path):
    proc = _cli("run", "--config", str(tmp_path / "absent.json"))
    assert proc.returncode == 2
    assert "absent.json" in proc.stderr


def test_run_invalid_config_exits_2(tmp_path):
    config = _write_fast_config(tmp_path)
    proc = _cli("run", "--config", str(config), "--set", "K=0")
    assert proc.returncode == 2
    assert "config error" in proc.stderr


def test_run_numeric_abort_exits_3(tmp_path):
    config = _write_fast_config(
        tmp_path, sigma_h_sq=1e200,
        power={"kind": "constant", "alpha0": 1e200},
    )
    proc = _cli("run", "--config", str(config), "--out", str(tmp_path))
    assert proc.returncode == 3
    assert "numeric abort" in proc.stderr
    assert "iteration 1" in proc.stderr


def test_sweep_writes_all_cells(tmp_path):
    config = _write_fast_config(tmp_path, T=2, eval_every=1)
    out = tmp_path / "grid"
    proc = _cli("sweep", "--config", str(config),
                "--sweep", "K=1,5", "--sweep", "sigma_z_sq=20,100",
                "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    files = sorted(p.name for p in out.glob("*.csv"))
    assert len(files) == 4
    assert "metrics_K=1_sigma_z_sq=20.csv" in files
    assert "4 runs complete" in proc.stdout


def test_sweep_unknown_field_exits_2(tmp_path):
    config = _write_fast_config(tmp_path)
    proc = _cli("sweep", "--config", str(config), "--sweep", "foo=1,2",
                "--out", str(tmp_path))
    assert proc.returncode == 2


def test_verify_stats_smoke():
    proc = _cli("verify-stats", "--trials", "2000", "--seed", "5")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "checks passed" in proc.stdout
    assert "interference" in proc.stdout
    assert "hardening" in proc.stdout


def test_verify_stats_rejects_tiny_trials():
    proc = _cli("verify-stats", "--trials", "500")
    assert proc.returncode == 2


def test_unknown_verb_exits_2():
    proc = _cli("orbit")
    assert proc.returncode == 2
