from __future__ import annotations

import json
import math

import pytest

from mslab.grid import ConfigError
from mslab.harness import (THEOREMS, HypothesisError, TrialConfig, builtin_config,
                           check_hypotheses, domination_field_check, ensemble_report,
                           load_config, ratios_dat, report_csv, report_json, run_trial)
from mslab.harness.generators import make_functions, sample, trial_rng
from mslab.grid import Grid

FIELD_THEOREMS = [t for t in THEOREMS if t not in ("P31scale", "P32scale")]


def small(tid: str, **ens) -> TrialConfig:
    d = builtin_config(tid).to_dict()
    if tid != "SQID":
        d["grid"] = {"dim": 1, "n": 32, "length": 8.0}
    d["ensemble"].update(ens)
    return TrialConfig(**d)


@pytest.mark.parametrize("tid", THEOREMS)
def test_builtin_configs_pass_gates(tid):
    cfg = builtin_config(tid)
    check_hypotheses(cfg)
    assert TrialConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))).digest() == cfg.digest()


def test_gate_names_failed_hypothesis():
    d = builtin_config("T11i").to_dict()
    d["exponents"]["p_list"] = [1.0, 2.0]
    with pytest.raises(HypothesisError, match=r"requires p1,p2>p0"):
        run_trial(TrialConfig(**d), 0)
    d = builtin_config("L43").to_dict()
    d["params"]["delta"] = 1.2
    with pytest.raises(HypothesisError, match="delta"):
        run_trial(TrialConfig(**d), 0)
    d = builtin_config("T16").to_dict()
    d["weights"] = {"family": "power", "a": -1.5}
    with pytest.raises(HypothesisError, match="A_1"):
        check_hypotheses(TrialConfig(**d))


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        TrialConfig.from_dict({"theorem_id": "T11i", "colour": 1})
    with pytest.raises(ConfigError):
        TrialConfig(theorem_id="T99")
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"theorem_id": "T11i", "grid": {"n": 64}}))
    cfg = load_config(good)
    assert cfg.make_grid().n == 64 and cfg.make_grid().length == 16.0


@pytest.mark.parametrize("tid", FIELD_THEOREMS)
def test_zero_inputs_give_zero_ratio(tid):
    rec = run_trial(small(tid, generator="zero"), 0)
    assert rec.ratio == 0 and rec.lhs == 0


def test_l46_constant_b():
    d = small("L46").to_dict()
    d["bmo"] = {"family": "const", "value": 2.5, "slots": [1, 1]}
    assert run_trial(TrialConfig(**d), 0).ratio == 0


def test_scaling_trial():
    cfg = builtin_config("P31scale")
    d = cfg.to_dict()
    d["exponents"]["p_list"] = [4.0, 4.0]
    for i in range(3):
        assert run_trial(TrialConfig(**d), i).ratio < 1e-3


def test_trial_records_are_finite():
    for tid in ("T11i", "T11ii", "T15", "T16", "L43", "L44", "L46", "L55", "SQID"):
        rec = run_trial(small(tid), 1)
        assert math.isfinite(rec.ratio) and rec.ratio >= 0 and rec.config_hash


def test_sqid_trial_small():
    assert run_trial(builtin_config("SQID"), 0).ratio < 1e-8


def test_empty_ensemble():
    rep = ensemble_report(small("T11i", count=0), refine=True)
    assert rep.records == [] and math.isnan(rep.summary["max_ratio"])
    assert '"max_ratio": "nan"' in report_json(rep)


def test_determinism_across_threads():
    cfg = small("T15", count=4)
    a = ensemble_report(cfg, refine=True, threads=1)
    b = ensemble_report(cfg, refine=True, threads=3)
    assert report_json(a) == report_json(b)
    assert report_csv(a) == report_csv(b)
    assert ratios_dat(a) == ratios_dat(b)
    assert [r.index for r in a.records] == [0, 1, 2, 3, 0, 1, 2, 3]


def test_report_shapes():
    rep = ensemble_report(small("T11i", count=3), refine=True, threads=1)
    assert rep.header["note"].startswith("the bilinear")
    assert "refinement_drift" in rep.summary
    rows = report_csv(rep).strip().splitlines()
    assert rows[0].startswith("index,n,lhs") and len(rows) == 7
    blocks = ratios_dat(rep).strip().split("\n\n\n")
    assert len(blocks) == 2
    assert all(len(line.split()) == 2 for line in blocks[0].splitlines() if not line.startswith("#"))


def test_domination_field_check():
    rep = domination_field_check("L44", small("T11i", count=2), threads=1)
    assert rep.header["theorem_id"] == "L44"
    with pytest.raises(ConfigError):
        domination_field_check("T11i", small("T11i"))


def test_generators_deterministic_and_supported():
    ens = {"generator": "random_bumps", "seed": 9, "bumps": 3, "support": [0.25, 0.75]}
    g = Grid(1, 64, 8.0)
    a = sample(make_functions(ens, 1, 8.0, 3), g)
    b = sample(make_functions(ens, 1, 8.0, 3), g)
    assert all((x.values == y.values).all() for x, y in zip(a, b))
    x = g.axis_coords()
    outside = (x < 2.0) | (x > 6.0)
    assert all(abs(f.values[outside]).max() == 0 for f in a)
    assert trial_rng(1, 2, 0).random() != trial_rng(1, 2, 1).random()
    with pytest.raises(ConfigError):
        make_functions({"generator": "nope"}, 1, 8.0, 0)
