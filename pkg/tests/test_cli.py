import json
import subprocess
import sys

import pytest

from bn4d import cli


def _run(args, tmp_path):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def test_constants_prints_values(tmp_path, capsys):
    assert _run(["constants"], tmp_path) == 0
    out = capsys.readouterr().out
    assert "c_reduced = 78.956835208714" in out
    assert "omega/12 = 1.644934066848" in out
    doc = json.loads((tmp_path / "constants.json").read_text())
    assert doc["provenance"]["schema_version"] == 1
    assert doc["constants"]["frak_C"] == pytest.approx(111.66182719422207)


def test_reduce_json(tmp_path):
    assert _run(["reduce", "--check"], tmp_path) == 0
    doc = json.loads((tmp_path / "reduce.json").read_text())
    assert abs(doc["solution"]["t0"] - 2.0) < 1e-10
    assert max(abs(v) for v in doc["solution"]["xi0"]) < 1e-8
    prov = doc["provenance"]
    assert set(prov) >= {"version", "config_sha256", "seed", "config"}
    checks = json.loads((tmp_path / "checks.json").read_text())["checks"]
    assert all(c["passed"] for c in checks)


def test_robin_table(tmp_path):
    assert _run(["robin"], tmp_path) == 0
    lines = [l for l in (tmp_path / "robin.csv").read_text().splitlines() if not l.startswith("#")]
    assert lines[0].split(",")[:5] == ["x1", "x2", "x3", "x4", "tau"]
    assert len(lines[0].split(",")) == 25
    assert float(lines[1].split(",")[4]) == pytest.approx(0.025330295910584444, rel=1e-15)


def test_verify_check_exit_zero(tmp_path):
    assert _run(["verify", "--check"], tmp_path) == 0
    text = (tmp_path / "verify.csv").read_text()
    header = [l for l in text.splitlines() if not l.startswith("#")][0]
    assert header == "check_name,delta,eps,numeric,predicted,ratio,slope"


def test_verify_is_deterministic():
    cfg = cli.default_config()
    assert cli.render_verify(cfg, quick=True) == cli.render_verify(cfg, quick=True)


def test_seed_changes_header(tmp_path):
    cfg = cli.default_config()
    a = cli.render_verify(cfg, quick=True)
    b = cli.render_verify(cfg.with_seed(5), quick=True)
    assert a != b
    assert "# seed: 5" in b


def test_sweep_csv(tmp_path, capsys):
    cfg_path = tmp_path / "c.toml"
    cfg_path.write_text("[eps]\ngrid = [0.5, 0.4]\n")
    assert cli.main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path), "--threads", "2"]) == 0
    rows = [l for l in (tmp_path / "sweep.csv").read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "eps,u0,delta_num,eps_ln_inv_delta,t0_pred,status,delta_halfwidth"
    assert len(rows) == 3 and rows[1].split(",")[5] == "ok"
    assert cli.render_sweep(cli.ExperimentConfig.from_dict({}), eps_grid=[0.5]) == \
        cli.render_sweep(cli.ExperimentConfig.from_dict({}), eps_grid=[0.5])


def test_shoot_writes_profile(tmp_path):
    cfg_path = tmp_path / "c.toml"
    cfg_path.write_text("[eps]\nvalue = 0.4\n")
    assert cli.main(["shoot", "--config", str(cfg_path), "--out", str(tmp_path), "--check"]) == 0
    prof = [l for l in (tmp_path / "profile.csv").read_text().splitlines() if not l.startswith("#")]
    assert prof[0] == "r,u"
    assert len(prof) > 300


def test_malformed_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[domain]\nradius = \"one\"\n")
    assert cli.main(["reduce", "--config", str(bad), "--out", str(tmp_path)]) == 2
    rec = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert rec == {"error": "config", "location": "domain.radius", "message": "expected a number"}


def test_solver_failure_exit_3(tmp_path, capsys):
    cfg_path = tmp_path / "c.toml"
    cfg_path.write_text("[eps]\nvalue = 20.0\n")
    assert cli.main(["shoot", "--config", str(cfg_path), "--out", str(tmp_path)]) == 3
    rec = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert rec["error"] == "solver"


def test_check_failure_exit_4(tmp_path, capsys):
    cfg_path = tmp_path / "c.toml"
    # wide bubbles are far outside the cubic regime of the projection defect
    cfg_path.write_text("[verify]\ndefect_deltas = [2.0, 3.0]\n")
    assert cli.main(["verify", "--config", str(cfg_path), "--out", str(tmp_path), "--check"]) == 4
    assert "[FAIL] C3 defect_slope" in capsys.readouterr().out
    checks = json.loads((tmp_path / "checks.json").read_text())["checks"]
    assert [c["name"] for c in checks if not c["passed"]] == ["defect_slope"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bn4d", "constants", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "frak_c = 2.8284271247461903" in proc.stdout


def test_byte_identical_across_processes(tmp_path):
    cfg_path = tmp_path / "c.toml"
    cfg_path.write_text("seed = 11\n[eps]\ngrid = [0.5, 0.4]\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        for cmd in ("sweep", "robin"):
            proc = subprocess.run([sys.executable, "-m", "bn4d", cmd, "--config", str(cfg_path),
                                   "--out", str(out)], capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1]
