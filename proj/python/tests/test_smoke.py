import math

import numpy as np
import pytest

import twosided


def test_constant_outcomes_give_unit_p_value():
    y = np.full((5, 5), 2.0)
    r = twosided.run_test(y, [0, 1, 0, 0, 1], [1, 0, 1, 0, 0], L=99, seed=1)
    assert r["p_value"] == 1.0
    assert r["reject"] is False
    assert r["schema_version"] == 1
    assert len(r["t_reps"]) == 99


def test_deterministic_given_seed():
    rng = np.random.default_rng(0)
    y = rng.normal(size=(8, 6))
    args = dict(buyer=[1, 1, 0, 0, 1, 0, 0, 1], seller=[0, 1, 0, 1, 0, 0])
    a = twosided.run_test(y, **args, seed=5, L=200)
    b = twosided.run_test(y, **args, seed=5, L=200, threads=3)
    assert a == b


def test_total_effect_and_support():
    rng = np.random.default_rng(1)
    y = rng.normal(size=(12, 12))
    w = [1] * 4 + [0] * 8
    r = twosided.run_test(y, w, w, procedure="total_effect", k=1, L=50)
    assert r["event"]["block_count"] == 12
    assert round(math.exp(twosided.support_size_log(w, w, "total_effect", 1))) == 495


def test_degenerate_event_raises():
    with pytest.raises(twosided.DegenerateEventError, match="no control sellers"):
        twosided.run_test(np.zeros((3, 3)), [1, 0, 0], [1, 1, 1])


def test_power_helpers():
    assert twosided.recommend_k(100, 0.95) == 2
    curve = twosided.power_curve(400, [1, 2, 4, 5, 8, 10, 16, 20, 25, 40, 50, 80, 100, 200, 400], 1.0, 0.01, 0.01)
    bounds = [row["bound"] for row in curve]
    best = bounds.index(max(bounds))
    assert 0 < best < len(bounds) - 1
    with pytest.raises(twosided.ParameterError):
        twosided.power_lower_bound(10, 0, 1.0, 1.0, 1.0)


def test_schedule_and_simulation():
    y00, y10, y01, y11 = twosided.generate_schedule({"regime": "sharp_null", "n": 5}, 3)
    assert y00.shape == (15, 15)
    assert np.array_equal(y00, y10)
    report = twosided.run_simulation({"regime": "alternative", "n": 5, "reps": 10, "L": 30, "seed": 2})
    assert len(report["rows"]) == 6
    assert all(0.0 <= row["rate"] <= 1.0 for row in report["rows"])
