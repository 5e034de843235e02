import csv
import json
import os

import pytest
import yaml

from sairod import config
from sairod.cli import main
from sairod.experiment import run_experiment

BASE = {
    "name": "t",
    "model": "simplified",
    "parameters": {"preset": "paper", "N": 6, "C": 2},
    "initial": [{"state": [4, 1, 0, 1, 0, 0], "weight": 0.5},
                {"state": [5, 1, 0, 0, 0, 0], "weight": 0.5}],
    "queries": [{"name": "deaths_ge_0.2", "compartment": "D", "op": ">=", "frac": 0.2},
                {"name": "a_zero", "compartment": "A", "op": "==", "value": 0}],
    "cdf": ["D", "R"],
    "solve": {"steps": 8},
}


def _write(tmp_path, raw, name="c.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_load_defaults(tmp_path):
    cfg = config.load(_write(tmp_path, BASE))
    assert cfg.params.N == 6 and cfg.params.omega == 0.5
    assert cfg.policy == {"kind": "constant", "M": 2}
    assert [q.name for q in cfg.queries] == ["deaths_ge_0.2", "a_zero"]


@pytest.mark.parametrize("patch", [
    {"initial": [{"state": [4, 1, 0, 1, 0, 0], "weight": 0.4}]},
    {"initial": [{"state": [4, 1, 0, 0, 0, 0], "weight": 1.0}]},
    {"model": "weird"},
    {"policy": {"kind": "adaptive-magic"}},
    {"policy": {"kind": "adaptive-symptomatic", "t_low": 0.5, "t_high": 0.1}},
    {"parameters": {"preset": "paper", "N": 6, "C": 2, "beta": 0.9}},
    {"queries": [{"name": "q", "compartment": "Z", "op": ">=", "value": 1}]},
    {"queries": [{"name": "q", "compartment": "D", "op": ">="}]},
    {"cdf": ["Q"]},
    {"solve": {"tol": -1}},
])
def test_config_errors(tmp_path, patch):
    raw = dict(BASE, **patch)
    with pytest.raises(config.ConfigError):
        config.from_dict(raw)


def test_policy_eval_outputs(tmp_path):
    cfg = config.from_dict(dict(BASE, policy={"kind": "adaptive-asymptomatic"}))
    out = run_experiment(cfg, str(tmp_path / "o"))
    series = _rows(out["series"])
    assert series[0] == ["iteration", "deaths_ge_0.2", "a_zero", "mean_M"]
    assert len(series) == 10
    lim = _rows(out["limit"])
    assert lim[1][0] == "deaths_ge_0.2" and lim[1][3] == "True"
    cdf = _rows(out["cdf_D"])
    assert len(cdf) == 8 and float(cdf[-1][1]) == 1.0
    man = json.loads(open(tmp_path / "o" / "manifest.json").read())
    assert man["versions"]["sairod"] and man["seed"] == 0
    assert set(man["outputs"].values()) == {"series.csv", "limit.csv", "cdf_D.csv", "cdf_R.csv"}


def test_sweep_has_twenty_rows(tmp_path):
    cfg = config.from_dict(dict(BASE, sweep={"M": [1, 2, 3, 4, 5], "C": [1, 2, 3, 5]}))
    out = run_experiment(cfg, str(tmp_path / "s"))
    rows = _rows(out["sweep"])
    assert len(rows) == 21
    assert [(r[0], r[1]) for r in rows[1:4]] == [("1", "1"), ("1", "2"), ("1", "3")]


def test_frozen_parameters_constant_series(tmp_path):
    params = {"N": 6, "C": 2, "omega": 0, "beta": 0, "delta": 0, "mu": 0, "alpha": 0,
              "sigma": 0, "xi": 0, "gamma": 0, "psi": 0, "iota": 0, "upsilon": 0}
    cfg = config.from_dict(dict(BASE, parameters=params))
    out = run_experiment(cfg, str(tmp_path / "f"))
    series = _rows(out["series"])[1:]
    assert len({tuple(r[1:]) for r in series}) == 1


def test_mc_reproducible(tmp_path):
    raw = dict(BASE, montecarlo={"runs": 30, "depth": 10, "seed": 5, "scale": 2})
    cfg = config.from_dict(raw)
    a = run_experiment(cfg, str(tmp_path / "a"), what="mc")
    b = run_experiment(cfg, str(tmp_path / "b"), what="mc")
    for k in a:
        assert open(a[k], "rb").read() == open(b[k], "rb").read()
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()


def test_cli_subcommands_and_exit_codes(tmp_path, capsys):
    raw = dict(BASE, montecarlo={"runs": 5, "depth": 3})
    path = _write(tmp_path, raw)
    out = str(tmp_path / "cli")
    for cmd in ["build", "solve", "policy-eval", "export", "roundtrip-check"]:
        assert main([cmd, "-c", path, "-o", out]) == 0, cmd
    assert main(["mc", "-c", path, "-o", out, "--runs", "7", "--depth", "2", "--seed", "9"]) == 0
    summary = json.loads(open(os.path.join(out, "mc.json")).read())
    assert summary["seed"] == 9 and summary["config"]["runs"] == 7
    assert main(["export", "-c", path, "-o", out, "--mdp", "--name", "mdp"]) == 0
    assert os.path.exists(os.path.join(out, "mdp.tra"))
    assert main(["solve", "-c", path, "-o", out, "--tol", "0"]) == 1
    bad = _write(tmp_path, dict(BASE, model="nope"), "bad.yaml")
    assert main(["solve", "-c", bad]) == 1
    assert main(["solve", "-c", str(tmp_path / "missing.yaml")]) == 3
    wrong_n = _write(tmp_path, dict(BASE, initial=[{"state": [6, 0, 0, 0, 0, 3], "weight": 1.0}]),
                     "inv.yaml")
    assert main(["solve", "-c", wrong_n]) == 1


def test_cli_numeric_failure(tmp_path, monkeypatch):
    from sairod import experiment
    from sairod.model import NormalizationError

    def broken(*a, **k):
        raise NormalizationError("row mass 0.9 deviates from 1")

    monkeypatch.setattr(experiment, "converge", broken)
    assert main(["solve", "-c", _write(tmp_path, BASE), "-o", str(tmp_path / "x")]) == 2
