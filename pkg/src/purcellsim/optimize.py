"""Maximise extraction efficiency over splittings, chain coupling and kappa.

Searches are deterministic: a coarse grid scan (1-D) or a grid of
Nelder-Mead starts (2-D) followed by local refinement. Objective values
come from the steady (linear-equation) emission budget; the optimum is then
re-evaluated by time-domain propagation as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .dynamics import (
    emission_budget_steady,
    emission_budget_timedomain,
    finite_window_cavity_population,
    lossless_time_average,
)
from .model import ModelSpec, Rates, Scheme, build

__all__ = [
    "ObjectiveError",
    "OptimizationResult",
    "golden_section_max",
    "maximize_1d",
    "maximize_2d",
    "optimal_kappa",
    "efficiency_objective",
    "window_objective",
    "optimize_efficiency",
    "optimize_window",
    "optimize_lossless_average",
    "enhancement_vs_cooperativity",
    "VARY_FIELDS",
]

INV_PHI = (math.sqrt(5) - 1) / 2

# CLI-style names -> Rates fields
VARY_FIELDS = {
    "delta-p": "delta_p",
    "delta_p": "delta_p",
    "delta-z": "delta_z",
    "delta_z": "delta_z",
    "omega": "omega",
    "kappa": "kappa",
}


class ObjectiveError(ValueError):
    def __init__(self, x, value):
        super().__init__(f"objective is not finite at x={x!r} (value {value!r})")
        self.x = x
        self.value = value


@dataclass
class OptimizationResult:
    best_params: dict
    best_value: float
    baseline_value: float
    enhancement: float
    evaluations: int
    converged: bool
    verified_value: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "best_params": {k: float(v) for k, v in self.best_params.items()},
            "best_value": self.best_value,
            "baseline_value": self.baseline_value,
            "enhancement": self.enhancement,
            "enhancement_pp": 100 * self.enhancement,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "verified_value": self.verified_value,
        }


class _Counted:
    """Wraps an objective, counts calls and rejects non-finite values."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, *x):
        self.calls += 1
        v = float(self.fn(*x))
        if not math.isfinite(v):
            raise ObjectiveError(x if len(x) > 1 else x[0], v)
        return v


def golden_section_max(f, a, b, tol):
    """Golden-section search for a maximum of unimodal ``f`` on [a, b].

    Returns (x, f(x)) with the final bracket no wider than ``tol``.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _baseline(f, point):
    return float("nan") if point is None else f(*np.atleast_1d(point))


def maximize_1d(objective: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6,
                n_scan: int = 129, name: str = "x", baseline_at: Optional[float] = 0.0
                ) -> OptimizationResult:
    """Grid scan of ``n_scan`` (>= 64) points then golden-section refinement.

    The refinement bracket is the pair of grid cells around the best grid
    point, so the result is the global maximum up to grid resolution.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n_scan < 64:
        raise ValueError("coarse scan needs at least 64 points")
    f = _Counted(objective)
    xs = np.linspace(lo, hi, n_scan)
    values = np.array([f(x) for x in xs])
    i = int(np.argmax(values))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n_scan - 1)]
    x, v = golden_section_max(f, a, b, tol)
    if values[i] > v:
        x, v = xs[i], values[i]
    base = _baseline(f, baseline_at)
    return OptimizationResult({name: float(x)}, float(v), base, float(v) - base,
                              f.calls, converged=True)


def maximize_2d(objective: Callable[[float, float], float], box, tol: float = 1e-4,
                n_starts: int = 5, names=("x", "y"), baseline_at=(0.0, 0.0)
                ) -> OptimizationResult:
    """Best of ``n_starts**2`` bounded Nelder-Mead runs started on a grid.

    A run counts as converged once its simplex is no wider than ``tol`` in
    each coordinate. Equal optima are resolved towards the lexicographically
    smallest parameter vector.
    """
    (x0, x1), (y0, y1) = box
    if not (x0 < x1 and y0 < y1):
        raise ValueError("invalid box")
    f = _Counted(objective)
    best = None
    for sx in np.linspace(x0, x1, n_starts):
        for sy in np.linspace(y0, y1, n_starts):
            res = minimize(lambda p: -f(p[0], p[1]), np.array([sx, sy]), method="Nelder-Mead",
                           bounds=[(x0, x1), (y0, y1)],
                           options={"xatol": tol, "fatol": 1e-13, "maxiter": 4000,
                                    "initial_simplex": _initial_simplex(sx, sy, box)})
            key = (round(float(res.fun), 12), tuple(np.round(res.x, 12)))
            if best is None or key < best[0]:
                best = (key, res)
    res = best[1]
    xb = np.clip(res.x, [x0, y0], [x1, y1])
    v = -float(res.fun)
    base = _baseline(f, baseline_at)
    return OptimizationResult(dict(zip(names, map(float, xb))), v, base, v - base,
                              f.calls, converged=bool(res.success))


def _initial_simplex(sx, sy, box):
    (x0, x1), (y0, y1) = box
    hx, hy = 0.1 * (x1 - x0), 0.1 * (y1 - y0)
    # step inward so the simplex starts inside the box
    dx = hx if sx + hx <= x1 else -hx
    dy = hy if sy + hy <= y1 else -hy
    return np.array([[sx, sy], [sx + dx, sy], [sx, sy + dy]])


def optimal_kappa(g: float, gamma: float, m: int = 1) -> float:
    """Cavity decay rate that maximises extraction.

    For the plain two-level scheme (m=1) this is critical damping, kappa = g.
    For m emitting states in the strong-coupling enhancement studies it is
    kappa = gamma / sqrt(m).
    """
    if g <= 0 or gamma < 0:
        raise ValueError("need g > 0 and gamma >= 0")
    if m == 1:
        return g
    return gamma / math.sqrt(m)


def _fields(vary) -> tuple:
    if isinstance(vary, str):
        vary = [v for v in vary.split(",") if v]
    out = []
    for v in vary:
        try:
            out.append(VARY_FIELDS[v.strip()])
        except KeyError:
            raise ValueError(f"unknown parameter {v!r}; choose from delta-p, delta-z, omega, kappa") from None
    if not 1 <= len(out) <= 2:
        raise ValueError("vary one or two parameters")
    return tuple(out)


def _spec_with(spec: ModelSpec, fields, values) -> ModelSpec:
    rates = spec.rates.with_(**dict(zip(fields, map(float, values))))
    return ModelSpec(spec.scheme, rates, spec.n, spec.basis)


def efficiency_objective(spec: ModelSpec, vary) -> Callable:
    """eta_ext (steady method) as a function of the ``vary`` parameters."""
    fields = _fields(vary)

    def f(*values):
        return emission_budget_steady(build(_spec_with(spec, fields, values))).eta_ext
    return f


def window_objective(spec: ModelSpec, vary, window: float) -> Callable:
    """Mean cavity population over [0, window] as a function of ``vary``."""
    fields = _fields(vary)

    def f(*values):
        h = build(_spec_with(spec, fields, values))
        return finite_window_cavity_population(h, window=window, method="linear")
    return f


def _default_box(spec, fields):
    return [(0.0, 4.0 * spec.rates.g) for _ in fields]


def _run(objective, fields, box, tol, spec=None):
    if len(fields) == 1:
        (lo, hi), = box
        return maximize_1d(objective, lo, hi, tol=tol, name=fields[0])
    res = maximize_2d(objective, box, tol=tol, names=fields)
    if spec is not None:
        _canonical_exchange(res, spec, box)
    return res


def _canonical_exchange(res, spec, box):
    """Report the delta_p >= delta_z twin of a three-level optimum.

    Aggregate cavity populations of the three-level model are invariant under
    delta_p <-> delta_z, so both orderings are equally optimal.
    """
    if spec.scheme is not Scheme.THREE_LEVEL or set(res.best_params) != {"delta_p", "delta_z"}:
        return
    if box[0] != box[1]:
        return
    p = res.best_params
    if p["delta_p"] < p["delta_z"]:
        res.best_params = {"delta_p": p["delta_z"], "delta_z": p["delta_p"]}


def optimize_efficiency(spec: ModelSpec, vary, box=None, tol: Optional[float] = None,
                        verify: bool = True) -> OptimizationResult:
    """Maximise eta_ext over one or two parameters of ``spec``.

    The baseline is the efficiency with the varied parameters at zero. With
    ``verify`` the optimum is recomputed in the time domain; disagreement
    beyond 1e-6 marks the result unconverged.
    """
    fields = _fields(vary)
    box = _default_box(spec, fields) if box is None else box
    tol = 1e-4 * spec.rates.g if tol is None else tol
    res = _run(efficiency_objective(spec, fields), fields, box, tol, spec)
    if verify:
        h = build(_spec_with(spec, fields, [res.best_params[k] for k in fields]))
        check = emission_budget_timedomain(h).eta_ext
        res.verified_value = check
        if abs(check - res.best_value) > 1e-6:
            res.converged = False
    return res


def optimize_window(spec: ModelSpec, vary, window: float, box=None,
                    tol: Optional[float] = None) -> OptimizationResult:
    fields = _fields(vary)
    box = _default_box(spec, fields) if box is None else box
    tol = 1e-4 * spec.rates.g if tol is None else tol
    res = _run(window_objective(spec, fields, window), fields, box, tol, spec)
    h = build(_spec_with(spec, fields, [res.best_params[k] for k in fields]))
    res.verified_value = finite_window_cavity_population(h, window=window, method="quadrature")
    return res


def optimize_lossless_average(spec: ModelSpec, vary, box=None,
                              tol: Optional[float] = None) -> OptimizationResult:
    """Maximise the infinite-time cavity population of a lossless model."""
    fields = _fields(vary)
    box = _default_box(spec, fields) if box is None else box
    tol = 1e-4 * spec.rates.g if tol is None else tol

    def f(*values):
        return lossless_time_average(build(_spec_with(spec, fields, values)))
    return _run(f, fields, box, tol, spec)


@dataclass
class EnhancementRow:
    cooperativity: float
    enhancement: float
    best_params: dict
    result: OptimizationResult


def enhancement_vs_cooperativity(spec: ModelSpec, cooperativities: Sequence[float], vary,
                                 kappa_over_gamma: Optional[float] = None, g: float = 1.0,
                                 box=None, tol: Optional[float] = None,
                                 verify: bool = False) -> list:
    """Maximum enhancement over ``vary`` for each cooperativity.

    For each C the rates are g (fixed), kappa = r*gamma with
    r = ``kappa_over_gamma`` (default 1/sqrt(m) for the scheme's emitting
    multiplicity m) and g^2 = 2 C kappa gamma.
    """
    m = spec.multiplicity
    r = 1 / math.sqrt(m) if kappa_over_gamma is None else kappa_over_gamma
    rows = []
    for C in cooperativities:
        if C <= 0:
            raise ValueError("cooperativities must be positive")
        base = Rates.from_cooperativity(C, r, g=g)
        local = ModelSpec(spec.scheme, base.with_(**{k: getattr(spec.rates, k)
                                                     for k in ("delta_c", "delta_p", "delta_z", "omega")}),
                          spec.n, spec.basis)
        res = optimize_efficiency(local, vary, box=box, tol=tol, verify=verify)
        rows.append(EnhancementRow(float(C), res.enhancement, res.best_params, res))
    return rows
