"""Cavity length versus birefringence trade-offs.

Lengthening a cavity lowers the coupling as ``g0 / sqrt(L/L0)`` and the
field decay as ``kappa0 / (L/L0)``; the free-space decay is unchanged, so
the cooperativity does not depend on length. Mode-waist corrections from
re-choosing mirror curvature are ignored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .dynamics import emission_budget_steady
from .model import Rates, build_two_level_birefringent
from .optimize import maximize_1d

__all__ = [
    "CavityGeometry",
    "InfeasibleTargetError",
    "SweepRow",
    "rates_at_length",
    "efficiency_at",
    "best_birefringence",
    "sweep_length_birefringence",
    "iso_efficiency_max_length",
    "takahashi_preset",
    "strong_coupling_geometry",
    "PRESETS",
]

TWO_PI = 2 * math.pi


class InfeasibleTargetError(ValueError):
    pass


@dataclass(frozen=True)
class CavityGeometry:
    """Reference cavity: length ``l0`` in micrometres and rates at that length.

    ``unit="mhz"`` means rates (and any birefringence passed alongside) are
    frequencies over 2 pi in MHz; ``unit="angular"`` means they are already
    angular frequencies.
    """

    l0: float
    g0: float
    kappa0: float
    gamma: float
    unit: str = "angular"

    def __post_init__(self):
        if not self.l0 > 0:
            raise ValueError("reference length must be positive")
        if min(self.g0, self.kappa0, self.gamma) < 0:
            raise ValueError("rates must be non-negative")
        if self.unit not in ("angular", "mhz"):
            raise ValueError("unit must be 'angular' or 'mhz'")

    @property
    def to_angular(self) -> float:
        return TWO_PI if self.unit == "mhz" else 1.0

    @property
    def cooperativity(self) -> float:
        return self.g0 ** 2 / (2 * self.kappa0 * self.gamma)

    def dimensionless(self) -> "CavityGeometry":
        """Same geometry with every rate divided by g0."""
        return CavityGeometry(self.l0, 1.0, self.kappa0 / self.g0, self.gamma / self.g0, "angular")


def takahashi_preset() -> CavityGeometry:
    """Ion-cavity system of Takahashi et al.: {12.3, 4.1, 11.5} MHz at 370 um."""
    return CavityGeometry(l0=370.0, g0=12.3, kappa0=4.1, gamma=11.5, unit="mhz")


def strong_coupling_geometry(l0: float = 1.0) -> CavityGeometry:
    """Synthetic strong-coupling cavity with kappa0 = gamma = 0.1 g0."""
    return CavityGeometry(l0=l0, g0=1.0, kappa0=0.1, gamma=0.1, unit="angular")


PRESETS = {
    "takahashi": takahashi_preset,
    "strong-coupling": strong_coupling_geometry,
}


def rates_at_length(geom: CavityGeometry, l: float, delta_p: float = 0.0) -> Rates:
    """Angular-frequency rates at cavity length ``l``.

    ``delta_p`` is given in the geometry's unit and converted alongside.
    """
    if not l > 0:
        raise ValueError(f"cavity length must be positive, got {l}")
    s = l / geom.l0
    w = geom.to_angular
    return Rates(g=w * geom.g0 / math.sqrt(s), kappa=w * geom.kappa0 / s, gamma=w * geom.gamma,
                 delta_p=w * delta_p)


def efficiency_at(geom: CavityGeometry, l: float, delta_p: float):
    """(eta_ext, purity) of the birefringent two-level model at (l, delta_p)."""
    b = emission_budget_steady(build_two_level_birefringent(rates_at_length(geom, l, delta_p)))
    return b.eta_ext, b.purity


def best_birefringence(geom: CavityGeometry, l: float, box=None, tol: float = 1e-6):
    """Maximise eta_ext over delta_p at length ``l``; returns (delta_p, eta)."""
    lo, hi = (0.0, 4.0 * geom.g0) if box is None else box
    res = maximize_1d(lambda d: efficiency_at(geom, l, d)[0], lo, hi,
                      tol=tol * max(geom.g0, 1e-300), name="delta_p")
    return res.best_params["delta_p"], res.best_value


class SweepRow(NamedTuple):
    l: float
    delta_p: float
    eta_ext: float
    purity: float


def sweep_length_birefringence(geom: CavityGeometry, lengths: Sequence[float],
                               delta_ps: Sequence[float]) -> list:
    """eta_ext and purity on a (length, delta_p) grid, lengths outermost."""
    lengths = list(lengths)
    delta_ps = list(delta_ps)
    if not lengths or not delta_ps:
        raise ValueError("grids must be non-empty")
    if min(lengths) <= 0:
        raise ValueError("all lengths must be positive")
    rows = []
    for l in lengths:
        for d in delta_ps:
            eta, purity = efficiency_at(geom, l, d)
            rows.append(SweepRow(float(l), float(d), eta, purity))
    return rows


def iso_efficiency_max_length(geom: CavityGeometry, eta_target: float, delta_p_box=None,
                              l_range=None, rel_tol: float = 0.005,
                              delta_p: Optional[float] = None):
    """Longest cavity still reaching ``eta_target``.

    By default the birefringence is re-optimised at every probed length and
    the maximising ``delta_p`` at ``l_max`` is returned; passing ``delta_p``
    holds it fixed instead. Bisection stops at ``rel_tol`` relative width and
    returns the longest length known to reach the target.
    """
    if not 0 <= eta_target < 1:
        raise ValueError("eta_target must lie in [0, 1)")
    lo, hi = (0.25 * geom.l0, 8.0 * geom.l0) if l_range is None else l_range

    def best(l):
        if delta_p is not None:
            return delta_p, efficiency_at(geom, l, delta_p)[0]
        return best_birefringence(geom, l, delta_p_box)

    d_hi, e_hi = best(hi)
    if e_hi >= eta_target:
        return hi, d_hi
    d_lo, e_lo = best(lo)
    if e_lo < eta_target:
        raise InfeasibleTargetError(
            f"eta_target={eta_target} not reached even at l={lo} (best {e_lo:.4f})")
    while (hi - lo) / lo > rel_tol:
        mid = 0.5 * (lo + hi)
        d_mid, e_mid = best(mid)
        if e_mid >= eta_target:
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return lo, d_lo
