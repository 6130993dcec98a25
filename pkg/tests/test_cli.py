import json
import subprocess
import sys
from pathlib import Path

import pytest

from einstype.cli import main
from einstype.constructions import corpus_names
from einstype.report import CheckReport, dumps, strip_timing

SCENARIOS = sorted((Path(__file__).parent.parent / "scenarios").glob("*.toml"))

GAUSSIAN = """\
name = "g"

[chart]
coords = ["x", "y", "z"]
domain = [[0.2, 1.2], [-1, 1], [-1, 1]]
g_1_1 = "1"
g_2_2 = "1"
g_3_3 = "1"

[structure]
alpha = 1
beta = 1
mu = 0
rho = 0
lambda = "{lam}"
f = "(x^2 + y^2 + z^2)/4"
"""


def _write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_shipped_scenarios_pass(path, capsys):
    assert main(["run", str(path), "--points", "16"]) == 0


def test_wrong_lambda_fails(tmp_path, capsys):
    path = _write(tmp_path, GAUSSIAN.format(lam="1/2 + x/10"))
    out = tmp_path / "r.json"
    assert main(["run", path, "--points", "16", "--json", str(out), "--quiet"]) == 1
    rep = json.loads(out.read_text())
    byname = {c["name"]: c for c in rep["checks"]}
    assert byname["structure_equation"]["status"] == "fail"
    assert rep["exit_code"] == 1 and rep["counts"]["fail"] >= 1


def test_correct_lambda_passes(tmp_path, capsys):
    assert main(["run", _write(tmp_path, GAUSSIAN.format(lam="1/2")), "--points", "16", "--quiet"]) == 0


def test_malformed_metric_reports_line(tmp_path, capsys):
    text = GAUSSIAN.format(lam="1/2").replace('g_2_2 = "1"', 'g_2_2 = "1 +* y"')
    assert main(["run", _write(tmp_path, text)]) == 2
    err = capsys.readouterr().err
    assert "line 7" in err and "offset 3" in err


def test_unknown_key_is_rejected(tmp_path, capsys):
    text = GAUSSIAN.format(lam="1/2").replace("mu = 0", "mu = 0\nnu = 1")
    assert main(["run", _write(tmp_path, text)]) == 2
    err = capsys.readouterr().err
    assert "nu" in err and "line 14" in err


def test_missing_structure_key(tmp_path, capsys):
    text = GAUSSIAN.format(lam="1/2").replace("rho = 0\n", "")
    assert main(["run", _write(tmp_path, text)]) == 2
    assert "rho" in capsys.readouterr().err


def test_toml_syntax_error(tmp_path, capsys):
    assert main(["run", _write(tmp_path, 'name = "x\n')]) == 2
    assert "line 1" in capsys.readouterr().err


def test_unknown_target_and_checks(tmp_path, capsys):
    assert main(["run", "no_such_thing"]) == 2
    assert main(["run", "gaussian3", "--checks", "bogus"]) == 2
    assert main(["run", "gaussian3", "--points", "0"]) == 2


def test_list_corpus(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.splitlines()]
    assert names == corpus_names()
    assert "gaussian3" in names and "sphere4_degenerate" in names
    assert any(n.startswith("alpha0_warp") for n in names)


def test_list_checks(capsys):
    assert main(["list", "--checks"]) == 0
    out = capsys.readouterr().out
    assert "structure_equation" in out and "cotton_divergence_formula" in out


def test_json_round_trip(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "cylinder_s2r2", "--points", "8", "--json", str(out), "--quiet"]) == 0
    text = out.read_text()
    rep = CheckReport.from_dict(json.loads(text))
    assert dumps(rep.as_dict(timing=True)) == text


def test_same_seed_gives_identical_json(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["run", "quasi_einstein_sphere3", "--points", "12", "--seed", "3", "--json", str(out),
              "--no-timing", "--quiet"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert b"wall_time" not in outs[0]


def test_tol_scale_can_flip_a_verdict(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["run", "sphere4_degenerate", "--points", "8", "--checks", "structure_equation",
          "--tol-scale", "1e-12", "--json", str(out), "--quiet"])
    rep = json.loads(out.read_text())
    assert rep["tol_scale"] == 1e-12
    assert rep["checks"][0]["status"] == "fail"


def test_spectral_subcommands(capsys):
    assert main(["spectral", "critical-curve", "--v", "r^2", "--r", "1", "2"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["chi"] == pytest.approx([0.25, 1 / 16], rel=1e-9)
    assert main(["spectral", "lambda1", "--m", "3", "--n", "1000"]) == 0
    assert json.loads(capsys.readouterr().out)["lambda1"] == pytest.approx(9.8696, rel=1e-5)
    assert main(["spectral", "condition", "--qbar", "-1", "--v", "r^2", "--r-max", "1000"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "diverging"
    assert main(["spectral", "critical-curve", "--v", "r", "--r", "1"]) == 2
    assert "NotIntegrable" in capsys.readouterr().err


@pytest.mark.parametrize("name", corpus_names())
def test_every_corpus_entry_runs_clean(name, capsys):
    assert main(["run", name, "--points", "8", "--quiet"]) == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "einstype", "run", "gaussian3", "--points", "4",
                          "--json", "-", "--quiet", "--no-timing"], capture_output=True, text=True)
    assert out.returncode == 0
    d = json.loads(out.stdout)
    assert d == strip_timing(d) and d["scenario"] == "gaussian3"
