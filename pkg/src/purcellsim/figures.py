"""Preconfigured data sets behind each figure panel.

Every builder returns a list of :class:`Panel` tables; ``points`` scales the
grid resolution so that quick runs stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .design import strong_coupling_geometry, sweep_length_birefringence, takahashi_preset
from .dynamics import emission_budget_steady, evolve
from .model import ModelSpec, Rates, Scheme, build, build_n_level_chain, build_three_level, \
    build_two_level, build_two_level_birefringent
from .optimize import enhancement_vs_cooperativity, optimize_efficiency, optimize_window

__all__ = ["Panel", "FIGURES", "reproduce"]

SQRT2 = math.sqrt(2)


@dataclass
class Panel:
    name: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _trace_columns(h, traj, prefix=""):
    cols = [f"{prefix}p_{lab}" for lab in h.labels]
    cols += [f"{prefix}p_cavity", f"{prefix}p_excited"]
    pops = traj.populations
    data = [pops[:, i] for i in range(h.dim)]
    data += [traj.population(h.cavity_mask), traj.population(h.excited_mask)]
    return cols, data


def _traces(name, cases, t_max, n, meta=None):
    trajs = [evolve(h, t_max=t_max, n_samples=n) for _, h in cases]
    # each case may raise the sample count differently; share the densest grid
    n_common = max(len(t.times) for t in trajs)
    trajs = [t if len(t.times) == n_common else evolve(h, t_max=t_max, n_samples=n_common)
             for t, (_, h) in zip(trajs, cases)]
    cols = ["t"]
    data = [trajs[0].times]
    for (prefix, h), traj in zip(cases, trajs):
        c, d = _trace_columns(h, traj, prefix)
        cols += c
        data += d
    rows = np.column_stack(data).tolist()
    return Panel(name, cols, rows, meta or {})


def fig1(points=401):
    cases = [("lossless_", build_two_level(Rates(1, 0, 0))),
             ("damped_", build_two_level(Rates(1, 1, 0)))]
    return [_traces("fig1", cases, 16.0, points, {"g": 1, "kappa_damped": 1})]


def fig3(points=401):
    r = Rates(1, 0, 0, delta_p=SQRT2)
    cases = [("lossless_", build_two_level_birefringent(r)),
             ("damped_", build_two_level_birefringent(r.with_(kappa=1.0)))]
    return [_traces("fig3", cases, 16.0, points, {"g": 1, "delta_p": SQRT2})]


def fig4a(points=81):
    rows = []
    for k, y in [(0.05, 0.05), (0.1, 0.1), (0.25, 0.25), (0.5, 0.5), (1.0, 1.0), (0.1, 0.5), (0.5, 0.1)]:
        for d in np.linspace(0, 4, points):
            h = build_two_level_birefringent(Rates(1, k, y, delta_p=d))
            rows.append([k, y, d, emission_budget_steady(h).eta_ext])
    return [Panel("fig4a", ["kappa", "gamma", "delta_p", "eta_ext"], rows, {"g": 1})]


def fig4b(points=25):
    rows = []
    grid = np.linspace(0.02, 1.5, points)
    for k in grid:
        for y in grid:
            spec = ModelSpec(Scheme.TWO_LEVEL_BIREFRINGENT, Rates(1.0, k, y))
            res = optimize_efficiency(spec, "delta-p", verify=False)
            rows.append([k, y, res.best_params["delta_p"], res.baseline_value, res.best_value,
                         res.enhancement])
    return [Panel("fig4b", ["kappa", "gamma", "delta_p_opt", "eta_no_biref", "eta_max",
                            "enhancement"], rows, {"g": 1, "contour_step": 0.02})]


def _coop_panel(name, spec, vary, cs, kappa_over_gamma):
    rows = enhancement_vs_cooperativity(spec, cs, vary, kappa_over_gamma=kappa_over_gamma)
    keys = list(rows[0].best_params)
    out = [[r.cooperativity, r.enhancement, r.result.baseline_value, r.result.best_value]
           + [r.best_params[k] for k in keys] for r in rows]
    return Panel(name, ["C", "enhancement", "eta_baseline", "eta_max"] + [f"{k}_opt" for k in keys],
                 out, {"kappa_over_gamma": kappa_over_gamma, "g": 1})


def fig4c(points=26):
    cs = np.logspace(-1, 4, points)
    spec = ModelSpec(Scheme.TWO_LEVEL_BIREFRINGENT, Rates(1, 0, 0))
    return [_coop_panel("fig4c", spec, "delta-p", cs, 1 / SQRT2)]


def fig5b(points=401):
    t = 8 * math.pi
    cases = [("dz_only_", build_three_level(Rates(1, 0, 0, delta_z=2.0))),
             ("dp_only_", build_three_level(Rates(1, 0, 0, delta_p=2.0)))]
    return [_traces("fig5b", cases, t, points, {"g": 1, "splitting": 2.0})]


def fig5c(points=401):
    window = 8 * math.pi
    spec = ModelSpec(Scheme.THREE_LEVEL, Rates(1, 0, 0))
    res = optimize_window(spec, "delta-p,delta-z", window)
    p = res.best_params
    h = build_three_level(Rates(1, 0, 0, delta_p=p["delta_p"], delta_z=p["delta_z"]))
    meta = {"g": 1, "window": window, "delta_p_opt": p["delta_p"], "delta_z_opt": p["delta_z"],
            "mean_cavity_population": res.best_value}
    return [_traces("fig5c", [("", h)], window, points, meta)]


def fig7a(points=21):
    cs = np.logspace(-1, 4, points)
    panels = []
    rows = []
    for n in (2, 4, 6, 8, 10):
        spec = ModelSpec(Scheme.N_LEVEL_CHAIN, Rates(1, 0, 0), n=n)
        p = _coop_panel("fig7a", spec, "omega", cs, 1 / math.sqrt(n))
        rows += [[n] + r for r in p.rows]
    panels.append(Panel("fig7a", ["n"] + p.columns, rows, {"g": 1, "kappa_over_gamma": "1/sqrt(n)"}))
    return panels


def fig7b(points=401):
    n = 10
    spec = ModelSpec(Scheme.N_LEVEL_CHAIN, Rates.from_cooperativity(10, 1 / math.sqrt(n)), n=n)
    res = optimize_efficiency(spec, "omega", verify=False)
    h = build_n_level_chain(spec.rates.with_(omega=res.best_params["omega"]), n)
    t_max = 10 / min(h.kappa, h.gamma)
    meta = {"n": n, "C": 10, "omega_opt": res.best_params["omega"], "eta_ext": res.best_value}
    return [_traces("fig7b", [("", h)], t_max, points, meta)]


def _map(name, geom, lengths, dps):
    rows = [list(r) for r in sweep_length_birefringence(geom, lengths, dps)]
    return Panel(name, ["l_um", "delta_p", "eta_ext", "purity"], rows,
                 {"l0": geom.l0, "g0": geom.g0, "kappa0": geom.kappa0, "gamma": geom.gamma,
                  "unit": geom.unit})


def fig8a(points=41):
    geom = strong_coupling_geometry(l0=1.0)
    return [_map("fig8a", geom, np.linspace(0.25, 3.0, points), np.linspace(0, 3.0, points))]


def fig8b(points=61):
    geom = takahashi_preset()
    return [_map("fig8b", geom, np.linspace(300, 900, points), np.linspace(0, 40, points))]


def fig9a(points=11):
    cs = np.logspace(-1, 4, points)
    spec = ModelSpec(Scheme.THREE_LEVEL, Rates(1, 0, 0))
    return [_coop_panel("fig9a", spec, "delta-p,delta-z", cs, 0.5)]


def fig9b(points=401):
    spec = ModelSpec(Scheme.THREE_LEVEL, Rates.from_cooperativity(10, 0.5))
    res = optimize_efficiency(spec, "delta-p,delta-z", verify=False)
    p = res.best_params
    h = build(ModelSpec(Scheme.THREE_LEVEL, spec.rates.with_(**p)))
    t_max = 10 / min(h.kappa, h.gamma)
    meta = {"C": 10, "eta_ext": res.best_value, **{f"{k}_opt": v for k, v in p.items()}}
    return [_traces("fig9b", [("", h)], t_max, points, meta)]


FIGURES = {
    "fig1": fig1,
    "fig3": fig3,
    "fig4a": fig4a,
    "fig4b": fig4b,
    "fig4c": fig4c,
    "fig5b": fig5b,
    "fig5c": fig5c,
    "fig7a": fig7a,
    "fig7b": fig7b,
    "fig8a": fig8a,
    "fig8b": fig8b,
    "fig9a": fig9a,
    "fig9b": fig9b,
}


def reproduce(figure_id: str, points=None) -> list:
    try:
        fn = FIGURES[figure_id]
    except KeyError:
        raise KeyError(f"unknown figure {figure_id!r}; available: {', '.join(FIGURES)}") from None
    return fn() if points is None else fn(points)
