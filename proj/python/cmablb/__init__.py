"""Python bindings for the cmablb core library."""

import json as _json

from . import _core
from ._core import (
    GapUnreachable,
    HorizonTooShort,
    Reward,
    finite_diff_gradient,
    make_reward,
    reward_names,
    sample_round,
    suite_names,
)

__all__ = [
    "GapUnreachable",
    "HorizonTooShort",
    "Reward",
    "bounds",
    "build",
    "finite_diff_gradient",
    "make_reward",
    "maximize",
    "reward_names",
    "sample_round",
    "simulate",
    "smoothness",
    "suite_names",
    "verify",
]


def _reward(model, mu, copies=1):
    if isinstance(model, Reward):
        return model
    return make_reward(model, len(mu) // copies, copies)


def smoothness(model, mu, subset=()):
    """L2, L1, modified and variance-form smoothness of ``mu`` w.r.t. ``subset``."""
    return _json.loads(_core.smoothness(_reward(model, mu), list(mu), list(subset)))


def maximize(model, mu, measure="modified", objective="raw", method="brute", workers=1):
    return _json.loads(_core.maximize(_reward(model, mu), list(mu), measure, objective, method, workers))


def bounds(model, mu, m, gap=None, horizon=None, copies=1):
    return _json.loads(_core.bounds(_reward(model, mu), list(mu), m, gap, horizon, copies))


def build(model, mu, m, gap=None, horizon=None, optimal_index=None):
    """Worst-case instance as a dict; pass it to ``simulate`` unchanged."""
    return _json.loads(_core.build(_reward(model, mu), list(mu), m, gap, horizon, optimal_index))


def simulate(instance, strategy, horizon, seeds, workers=1, epsilon=0.05):
    """Returns {"csv": trace text, "summary": band comparison (10+ seeds only)}."""
    if isinstance(seeds, int):
        seeds = range(1, seeds + 1)
    out = _core.simulate(_json.dumps(instance), strategy, horizon, list(seeds), workers, epsilon)
    return _json.loads(out)


def verify(suite="all", seed=1, trials=1000):
    return _json.loads(_core.verify(suite, seed, trials))
