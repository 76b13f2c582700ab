import json
import os
import subprocess
import sys

import pytest

from ncx import cli

DATA = os.path.join(os.path.dirname(__file__), "data")


def run_cli(*args, env=None):
    e = dict(os.environ)
    e.update(env or {})
    p = subprocess.run([sys.executable, "-m", "ncx.cli", *args], capture_output=True, text=True, env=e)
    return p.returncode, p.stdout, p.stderr


def test_integrability_exit_zero(capsys):
    assert cli.main(["check", "integrability", "--model", "theta_plane", "--n", "2",
                     "--samples", "20"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == "ncx-report/1"
    assert set(rep["checks"][0]["verdicts"]) == {"N1", "N2", "N3", "N4"}


def test_broken_fixture_exits_one_with_residuals():
    code, out, _ = run_cli("run", "--config", os.path.join(DATA, "broken_j.json"), "--text")
    assert code == 1
    assert "NONZERO" in out and "dz0:" in out


def test_configuration_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"task": "axioms", "model": {"kind": "theta_plane", "n": 9}}))
    assert cli.main(["run", "--config", str(bad)]) == 2
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"task": "axioms", "model": {"kind": "theta_plane", "n": 1},
                               "samples": 0}))
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert cli.main(["frolicher", "--model", "theta_plane", "--n", "1", "--samples", "-1"]) == 2
    assert cli.main(["cohomology", "derham", "--model", "free", "--n", "1"]) == 2


def test_env_override():
    code, out, err = run_cli("cohomology", "dolbeault", "--n", "1", env={"NCX_MAX_WEIGHT": "2"})
    assert code == 0
    assert json.loads(out)["checks"][0]["max_weight"] == 2
    code, _, err = run_cli("cohomology", "dolbeault", env={"NCX_MAX_WEIGHT": "nope"})
    assert code == 2 and "NCX_MAX_WEIGHT" in err


@pytest.mark.parametrize("name,args", [
    ("dolbeault_projective_1", ["cohomology", "dolbeault", "--model", "theta_projective", "--n", "1",
                                "--max-weight", "4"]),
    ("integrability_plane_1", ["check", "integrability", "--model", "theta_plane", "--n", "1",
                               "--samples", "50"]),
    ("modcohom_projective_1", ["modcohom", "--n", "1", "--m", "0", "1", "-1", "-2"]),
])
def test_golden_reports(name, args, capsys):
    cli.main(args)
    out = capsys.readouterr().out
    with open(os.path.join(DATA, "golden", name + ".json")) as fh:
        assert out == fh.read()


def test_golden_values_are_meaningful():
    with open(os.path.join(DATA, "golden", "modcohom_projective_1.json")) as fh:
        rep = json.load(fh)
    dims = {r["m"]: r["dims"] for r in rep["checks"][0]["modules"]}
    assert dims[0][0] == 1 and dims[1][0] == 2 and dims[-1][0] == 0 and dims[-2][1] == 1


def test_reports_are_deterministic(capsys):
    args = ["check", "axioms", "--model", "theta_sphere", "--n", "1", "--samples", "30", "--seed", "99"]
    cli.main(args)
    a = capsys.readouterr().out
    cli.main(args)
    b = capsys.readouterr().out
    assert a == b
    assert json.loads(a)["seed"] == 99


def test_jobs_do_not_change_report(capsys):
    base = ["cohomology", "derham", "--model", "theta_plane", "--n", "1", "--max-weight", "3"]
    cli.main(base)
    a = capsys.readouterr().out
    cli.main(base + ["--jobs", "2"])
    b = capsys.readouterr().out
    assert a == b


def test_text_views(capsys):
    cli.main(["cohomology", "dolbeault", "--model", "theta_plane", "--n", "1", "--max-weight", "3",
              "--text"])
    out = capsys.readouterr().out
    assert "q=0 |" in out and "p0" in out
    cli.main(["les", "--n", "1", "--m", "0", "--windows", "3", "--text"])
    assert "exact=True" in capsys.readouterr().out


def test_output_file_and_timings(tmp_path):
    path = tmp_path / "r.json"
    assert cli.main(["frolicher", "--n", "1", "--max-weight", "2", "--timings", "-o", str(path)]) == 0
    rep = json.loads(path.read_text())
    assert all("seconds" in b for b in rep["checks"][0]["blocks"])


def test_model_dump(capsys):
    assert cli.main(["model", "dump", "--model", "theta_projective", "--n", "1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert set(rep["relations"]) == {"del_r2", "dbar_r2"}


def test_run_all(tmp_path, capsys):
    cfg = tmp_path / "all.json"
    cfg.write_text(json.dumps({"task": "all", "model": {"kind": "theta_plane", "n": 1, "max_weight": 2},
                               "samples": 20}))
    assert cli.main(["run", "--config", str(cfg)]) == 0
    names = [c["name"] for c in json.loads(capsys.readouterr().out)["checks"]]
    assert names[:2] == ["axioms", "integrability"] and "frolicher" in names
