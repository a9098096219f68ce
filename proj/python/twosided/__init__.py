"""Randomization tests for two-sided marketplace experiments."""

import json

from ._core import (
    ConfigError,
    DegenerateArmError,
    DegenerateEventError,
    Error,
    ParameterError,
    ParseError,
    SamplerExhaustedError,
    ShapeError,
    VarianceUndefinedError,
    ZeroVarianceError,
    power_curve,
    power_lower_bound,
    recommend_k,
    sample_complete_design,
    support_size_log,
)
from . import _core

__all__ = [
    "ConfigError",
    "DegenerateArmError",
    "DegenerateEventError",
    "Error",
    "ParameterError",
    "ParseError",
    "SamplerExhaustedError",
    "ShapeError",
    "VarianceUndefinedError",
    "ZeroVarianceError",
    "generate_schedule",
    "power_curve",
    "power_lower_bound",
    "recommend_k",
    "run_simulation",
    "run_test",
    "sample_complete_design",
    "support_size_log",
]


def run_test(
    y,
    buyer,
    seller,
    *,
    procedure="buyer_spillover",
    statistic="diff_means",
    L=500,
    alpha=0.05,
    k=1,
    sidedness="upper",
    resampler="permutation",
    seed=0,
    design="complete",
    p_buyer=0.5,
    p_seller=0.5,
    strict_comparator=False,
    threads=1,
):
    """Run one randomization test and return the result as a dict.

    ``y`` is an I x J array (buyers as rows); ``buyer`` and ``seller`` are
    0/1 sequences of length I and J.  ``t_obs`` and entries of ``t_reps`` are
    ``None`` where the studentized statistic had zero variance.
    """
    raw = _core._run_test_json(
        y, list(buyer), list(seller), procedure, statistic, L, alpha, k, sidedness,
        resampler, seed, design, p_buyer, p_seller, strict_comparator, threads,
    )
    return json.loads(raw)


def run_simulation(config):
    """Monte Carlo rejection rates for a simulation config dict."""
    return json.loads(_core._run_simulation_json(json.dumps(config)))


def generate_schedule(config, seed):
    """The four potential-outcome matrices (y00, y10, y01, y11) as arrays."""
    return _core.generate_schedule(json.dumps(config), seed)
