import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from purcellsim.dynamics import analytic_two_level_efficiency, emission_budget_steady
from purcellsim.model import ModelSpec, Rates, build_two_level_birefringent
from purcellsim.optimize import (
    ObjectiveError,
    enhancement_vs_cooperativity,
    golden_section_max,
    maximize_1d,
    maximize_2d,
    optimal_kappa,
    optimize_efficiency,
    optimize_lossless_average,
    optimize_window,
)

S2 = math.sqrt(2)


@given(c=st.floats(-3, 3), w=st.floats(0.1, 5))
@settings(max_examples=50, deadline=None)
def test_golden_section_on_parabola(c, w):
    x, fx = golden_section_max(lambda x: -w * (x - c) ** 2, -4, 4, 1e-9)
    assert x == pytest.approx(c, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-12)


def test_maximize_1d_finds_global_peak():
    # the secondary bump at x = -2 is lower than the main one at x = 1.5
    f = lambda x: math.exp(-(x - 1.5) ** 2) + 0.8 * math.exp(-4 * (x + 2) ** 2)
    res = maximize_1d(f, -4, 4, tol=1e-8, baseline_at=0.0)
    assert res.best_params["x"] == pytest.approx(1.5, abs=1e-6)
    assert res.baseline_value == pytest.approx(f(0.0))
    assert res.enhancement == pytest.approx(res.best_value - f(0.0))
    assert res.converged
    assert res.evaluations >= 129


def test_maximize_1d_edge_optimum():
    res = maximize_1d(lambda x: x, 0, 2, tol=1e-9)
    assert res.best_params["x"] == pytest.approx(2, abs=1e-8)


def test_maximize_1d_rejects_nan():
    with pytest.raises(ObjectiveError):
        maximize_1d(lambda x: float("nan") if x > 1 else x, 0, 2)


def test_maximize_1d_bad_interval():
    with pytest.raises(ValueError):
        maximize_1d(lambda x: x, 1, 1)


def test_maximize_2d_rosenbrock_like():
    f = lambda x, y: -((x - 1.2) ** 2 + 5 * (y - 0.4 - 0.3 * x) ** 2)
    res = maximize_2d(f, [(0, 3), (0, 3)], tol=1e-8, names=("a", "b"))
    assert res.best_params["a"] == pytest.approx(1.2, abs=1e-4)
    assert res.best_params["b"] == pytest.approx(0.76, abs=1e-4)
    assert res.best_value == pytest.approx(0.0, abs=1e-8)


def test_maximize_2d_stays_in_box():
    res = maximize_2d(lambda x, y: x + y, [(0, 1), (0, 2)], tol=1e-8)
    assert res.best_params["x"] <= 1 + 1e-12
    assert res.best_params["y"] <= 2 + 1e-12
    assert res.best_value == pytest.approx(3, abs=1e-5)


@pytest.mark.parametrize("g,gamma", [(1, 0.1), (1, 1), (2.5, 0.7), (0.4, 3)])
def test_kappa_optimum_is_critical_damping(g, gamma):
    spec = ModelSpec("two-level", Rates(g, 0, gamma))
    res = optimize_efficiency(spec, "kappa", box=[(0, 5 * g)], tol=1e-8)
    assert res.best_params["kappa"] == pytest.approx(g, rel=1e-3)
    assert res.best_value == pytest.approx(g * g / (g + gamma) ** 2, abs=1e-9)
    assert optimal_kappa(g, gamma) == g
    assert analytic_two_level_efficiency(g, g, gamma) == pytest.approx(res.best_value, abs=1e-9)


def test_optimal_kappa_multiplicity():
    assert optimal_kappa(1.0, 0.2, 4) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        optimal_kappa(0.0, 1.0)


def test_birefringence_optimum_verified_in_time_domain():
    spec = ModelSpec("two-level-biref", Rates.from_cooperativity(5, 1 / S2))
    res = optimize_efficiency(spec, "delta-p")
    assert res.converged
    assert res.verified_value == pytest.approx(res.best_value, abs=1e-6)
    # independent check: a dense scan never beats the optimiser
    scan = max(emission_budget_steady(build_two_level_birefringent(spec.rates.with_(delta_p=d))).eta_ext
               for d in np.linspace(0, 4, 801))
    assert res.best_value >= scan - 1e-9


def test_unknown_vary_name():
    with pytest.raises(ValueError):
        optimize_efficiency(ModelSpec("two-level-biref", Rates(1, 1, 1)), "colour")


def test_too_many_parameters():
    with pytest.raises(ValueError):
        optimize_efficiency(ModelSpec("three-level", Rates(1, 1, 1)), "delta-p,delta-z,kappa")


def test_lossless_birefringent_optimum():
    res = optimize_lossless_average(ModelSpec("two-level-biref", Rates(1, 0, 0)), "delta-p", tol=1e-7)
    assert res.best_params["delta_p"] == pytest.approx(S2, rel=1e-3)
    assert res.best_value == pytest.approx(2 / 3, abs=1e-6)


def test_window_optimum_ordering():
    res = optimize_window(ModelSpec("three-level", Rates(1, 0, 0)), "delta-p,delta-z", 8 * math.pi)
    assert res.best_params["delta_p"] >= res.best_params["delta_z"]
    assert res.verified_value == pytest.approx(res.best_value, abs=1e-7)


def test_enhancement_rows():
    spec = ModelSpec("two-level-biref", Rates(1, 0, 0))
    rows = enhancement_vs_cooperativity(spec, [0.1, 1.0, 10.0], "delta-p")
    gains = [r.enhancement for r in rows]
    assert gains == sorted(gains)
    for r in rows:
        assert r.result.best_value >= r.result.baseline_value - 1e-12
    with pytest.raises(ValueError):
        enhancement_vs_cooperativity(spec, [0.0], "delta-p")


def test_result_serialises():
    res = maximize_1d(lambda x: -(x - 1) ** 2, 0, 2)
    d = res.as_dict()
    assert d["enhancement_pp"] == pytest.approx(100 * res.enhancement)
    assert set(d["best_params"]) == {"x"}
