"""Config validation, subcommands, exit codes, and report determinism."""

import csv
import json
import math
import os

import pytest

from rieszkit.cli import main
from rieszkit.config import load_config, parse_config
from rieszkit.errors import ConfigError

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _base_config(**extra):
    cfg = {"version": 1, "dimension": 1,
           "weight": {"kind": "power", "exponent": 0.5}}
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# schema validation
# ---------------------------------------------------------------------------


def test_bundled_configs_validate():
    for name in os.listdir(CONFIG_DIR):
        cfg = load_config(os.path.join(CONFIG_DIR, name))
        assert cfg.dimension == 1


def test_missing_field_paths(tmp_path):
    with pytest.raises(ConfigError) as err:
        parse_config({"version": 1})
    assert "dimension" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse_config(_base_config(weight={"kind": "power"}))
    assert "weight.exponent" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse_config(_base_config(weight={"kind": "power", "exponent": -3.0}))
    assert "weight.exponent" in str(err.value)


def test_matrix_and_exponent_validation():
    cfg = _base_config(matrices=[[[1.0]], [[0.0]]],
                       exponents={"alpha": 0.0, "alphas": "equal-split"})
    with pytest.raises(ConfigError) as err:
        parse_config(cfg)
    assert "matrices" in str(err.value)
    cfg = _base_config(matrices=[[[1.0]]],
                       exponents={"alpha": 0.5, "alphas": [0.3]})
    with pytest.raises(ConfigError) as err:
        parse_config(cfg)
    assert "exponents" in str(err.value)
    with pytest.raises(ConfigError):
        parse_config(_base_config(version=99))


def test_q_is_derived_not_supplied():
    cfg = parse_config(_base_config(
        matrices=[[[1.0]]], exponents={"alpha": 0.5, "alphas": [0.5]},
        atom={"p": 0.75, "p0": 1.5}, campaign={"count": 2, "s": 0.75}))
    # no q anywhere in the schema; the campaign spec carries only (p, alpha)
    assert cfg.campaign.p == 0.75
    assert not hasattr(cfg.campaign, "q")


def test_unknown_check_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config(_base_config(checks=[{"check": "prove-everything"}]))
    assert "checks[0].check" in str(err.value)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def test_cli_config_error_exit_code(tmp_path):
    bad = _write(tmp_path, "bad.json", _base_config(weight={"kind": "power",
                                                            "exponent": -2.0}))
    assert main(["verify", "--config", bad]) == 4


def test_cli_weights_classify(tmp_path, capsys):
    cfg = _write(tmp_path, "w.json", _base_config(
        classify={"classes": [{"kind": "Ap", "p": 2.0}], "critical_indices": True,
                  "tol": 0.02}))
    code = main(["weights", "classify", "--config", cfg, "--out", str(tmp_path / "out")])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["classes"][0]["verdict"] == "finite"
    assert abs(payload["critical_indices"]["q_critical"] - 1.5) < 0.04
    assert (tmp_path / "out" / "weights-classify.json").exists()


def test_cli_sweep_anchor_values(tmp_path):
    out = tmp_path / "out"
    code = main(["operator", "sweep", "--config",
                 os.path.join(CONFIG_DIR, "sweep-riesz.json"), "--out", str(out)])
    assert code == 0
    with open(out / "riesz-half-indicator.csv") as fh:
        rows = list(csv.DictReader(fh))
    at_zero = [r for r in rows if abs(float(r["x0"])) < 1e-12][0]
    assert float(at_zero["value"]) == pytest.approx(4.0, rel=1e-3)

    code = main(["operator", "sweep", "--config",
                 os.path.join(CONFIG_DIR, "sweep-t02.json"), "--out", str(out)])
    assert code == 0
    with open(out / "t02-shifted-indicator.csv") as fh:
        rows = list(csv.DictReader(fh))
    at_zero = [r for r in rows if abs(float(r["x0"])) < 1e-12][0]
    assert float(at_zero["value"]) == pytest.approx(math.log(2.0), rel=1e-3)


def test_cli_sweep_empty_selection(tmp_path):
    cfg = _write(tmp_path, "empty.json", _base_config(sweeps=[]))
    out = tmp_path / "nothing"
    assert main(["operator", "sweep", "--config", cfg, "--out", str(out)]) == 0
    assert not out.exists()


def test_cli_atoms_gen_and_validate(tmp_path):
    cfg = _write(tmp_path, "atoms.json", _base_config(
        atom={"p": 1.0, "p0": 2.0, "d": 0},
        campaign={"count": 6, "seed": 5, "centers": [[0.0]], "radii": [0.5, 1.0, 2.0, 4.0]}))
    out = str(tmp_path / "out")
    assert main(["atoms", "gen", "--config", cfg, "--out", out]) == 0
    manifest = os.path.join(out, "atoms.jsonl")
    assert os.path.exists(manifest)
    assert main(["atoms", "validate", "--config", cfg, "--out", out,
                 "--manifest", manifest]) == 0
    report = json.load(open(os.path.join(out, "atoms-validate.json")))
    assert report["report"]["all_passed"]


def test_cli_verify_fast_checks_and_determinism(tmp_path):
    cfg = _write(tmp_path, "checks.json", _base_config(
        checks=[
            {"check": "quasi-norm-assembly", "lambdas": [1.0, 0.5, 0.25], "q": 1.5,
             "p": 0.75},
            {"check": "rh-ball-inequality", "p": 1.0, "alpha": 0.5},
            {"check": "critical-index-chain", "p": 0.5},
        ],
        weight={"kind": "power", "exponent": -0.125}))
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["verify", "--config", cfg, "--out", out1]) == 0
    assert main(["verify", "--config", cfg, "--out", out2]) == 0
    for name in sorted(os.listdir(out1)):
        if not name.endswith(".json"):
            continue
        a = json.load(open(os.path.join(out1, name)))
        b = json.load(open(os.path.join(out2, name)))
        a.pop("timestamp"), b.pop("timestamp")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True), name


def test_cli_verify_check_failure_exit_code(tmp_path):
    cfg = _write(tmp_path, "fail.json", _base_config(
        weight={"kind": "power", "exponent": 0.9},
        checks=[{"check": "maximal-inequality", "p": 1.0}]))
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "out")]) == 2


def test_cli_verify_hypothesis_exit_code(tmp_path):
    raw = json.load(open(os.path.join(CONFIG_DIR, "ta-worked.json")))
    raw["exponents"] = {"alpha": 0.9, "alphas": [0.05, 0.05]}
    raw["campaign"]["count"] = 2
    cfg = _write(tmp_path, "badta.json", raw)
    out = str(tmp_path / "out")
    assert main(["verify", "--config", cfg, "--out", out]) == 3
    reports = [json.load(open(os.path.join(out, f))) for f in os.listdir(out)
               if f.endswith(".json")]
    assert any(r["report"].get("verdict") == "hypothesis-failed" for r in reports)


def test_cli_seed_override_changes_campaign(tmp_path):
    cfg = _write(tmp_path, "atoms.json", _base_config(
        atom={"p": 1.0, "p0": 2.0, "d": 0},
        campaign={"count": 2, "seed": 5, "centers": [[0.0]], "radii": [0.5, 1.0, 2.0, 4.0]}))
    out1, out2 = str(tmp_path / "s1"), str(tmp_path / "s2")
    assert main(["atoms", "gen", "--config", cfg, "--out", out1]) == 0
    assert main(["atoms", "gen", "--config", cfg, "--out", out2, "--seed", "6"]) == 0
    a = open(os.path.join(out1, "atoms.jsonl")).read()
    b = open(os.path.join(out2, "atoms.jsonl")).read()
    assert a != b
