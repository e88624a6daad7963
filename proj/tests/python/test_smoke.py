import math

import pytest

import cmablb


def test_reward_roundtrip():
    r = cmablb.make_reward("exp-quadratic", 2)
    assert r.evaluate([0.5, 0.5]) == pytest.approx(1 - math.exp(-0.5), abs=1e-15)
    assert list(r.gradient([0.5, 0.5])) == pytest.approx([math.exp(-0.5)] * 2, abs=1e-15)
    assert set(cmablb.reward_names()) >= {"linear", "pmc-item", "exp-quadratic", "power-gradient"}


def test_smoothness_and_maximize():
    rep = cmablb.smoothness("linear", [0.25, 0.5])
    assert rep["modified"] == pytest.approx(0.6875)
    best = cmablb.maximize("pmc-item", [0.5, 0.0, 0.0], objective="per-arm")
    assert best["subset"]["indices"] == [1, 2]
    assert best["value"] == pytest.approx(0.25)


def test_bounds_values():
    assert cmablb.bounds("linear", [0.5, 0.5], 10, gap=0.01)["value"] == pytest.approx(37.5)
    assert cmablb.bounds("linear", [0.5, 0.5], 10, horizon=1e4)["value"] == pytest.approx(6.25)
    with pytest.raises(ValueError):
        cmablb.bounds("linear", [0.5, 0.5], 10)


def test_build_and_simulate():
    inst = cmablb.build("linear", [0.5, 0.5, 0.5], 15, gap=0.1)
    assert inst["gap"] == pytest.approx(0.1, rel=1e-6)
    assert len(inst["actions"]) == 5
    obs = cmablb.sample_round(inst_text(inst), 0, 3)
    assert len(obs) == 3 and all(bit in (0, 1) for _, bit in obs)
    a = cmablb.simulate(inst, "cucb", 1000, 10, workers=2)
    b = cmablb.simulate(inst, "cucb", 1000, 10, workers=1)
    assert a["csv"] == b["csv"]
    assert a["csv"].startswith("seed,t,cumulative_regret\n")
    assert a["summary"]["seeds"] == 10
    assert cmablb.simulate(inst, "oracle", 100, [1])["csv"].splitlines()[-1].endswith(",0")


def test_errors():
    with pytest.raises(cmablb.GapUnreachable):
        cmablb.build("linear", [0.25, 0.5], 10, gap=0.5)
    with pytest.raises(ValueError):
        cmablb.build("linear", [0.25, 0.5], 5, horizon=1e4)


def test_verify_suite():
    rep = cmablb.verify("lemma5", seed=2, trials=30)
    assert rep["passed"]
    assert "determinism" in cmablb.suite_names()


def inst_text(inst):
    import json

    return json.dumps(inst)
