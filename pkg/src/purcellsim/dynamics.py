"""Amplitude dynamics, emission budgets and time-averaged populations.

Two independent routes give the integrated populations

    X = int_0^inf psi(t) psi(t)^dagger dt,

which fix every emission probability (``eta_ext = 2 kappa sum_cav X_ii``):

* time domain: adaptive Runge-Kutta propagation of ``i dpsi/dt = H psi`` with
  the running integrals carried as extra ODE components;
* steady: the linear matrix equation ``H X - X H^dagger = -i psi0 psi0^dagger``.

The analytic two-level formula is a third, closed-form check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .model import EffectiveHamiltonian, excited_state

__all__ = [
    "IntegrationError",
    "NoDecayChannelError",
    "StabilityError",
    "UndefinedPurityError",
    "Trajectory",
    "EmissionBudget",
    "evolve",
    "emission_budget_timedomain",
    "emission_budget_steady",
    "emission_budget",
    "analytic_two_level_efficiency",
    "limit_efficiency",
    "polarization_purity",
    "lossless_time_average",
    "finite_window_cavity_population",
    "default_t_ceiling",
]

DEFAULT_RTOL = 1e-10
DEFAULT_POP_FLOOR = 1e-10
UNCONVERGED_RESIDUAL = 1e-3


class IntegrationError(RuntimeError):
    def __init__(self, message, t_reached):
        super().__init__(f"{message} (reached t={t_reached:.6g})")
        self.t_reached = t_reached


class NoDecayChannelError(ValueError):
    pass


class StabilityError(ValueError):
    pass


class UndefinedPurityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # shape (len(times), dim)
    labels: tuple

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    def population(self, mask) -> np.ndarray:
        return self.populations[:, np.asarray(mask, dtype=bool)].sum(axis=1)


@dataclass(frozen=True)
class EmissionBudget:
    eta_ext: float
    eta_free: float
    residual: float
    purity: Optional[float]
    err_est: float
    method: str = "steady"
    converged: bool = True

    def as_dict(self) -> dict:
        return {
            "eta_ext": self.eta_ext,
            "eta_free": self.eta_free,
            "residual": self.residual,
            "purity": self.purity,
            "err_est": self.err_est,
            "method": self.method,
            "converged": self.converged,
        }


def _check_psi0(h: EffectiveHamiltonian, psi0) -> np.ndarray:
    psi0 = excited_state(h) if psi0 is None else np.asarray(psi0, dtype=complex)
    if psi0.shape != (h.dim,):
        raise ValueError(f"initial state has shape {psi0.shape}, expected ({h.dim},)")
    if abs(np.vdot(psi0, psi0).real - 1.0) > 1e-12:
        raise ValueError("initial state must be normalised")
    return psi0


def _max_frequency(m: np.ndarray) -> float:
    ev = np.linalg.eigvals(m).real
    spread = ev.max() - ev.min() if ev.size > 1 else 0.0
    return max(spread, np.abs(m).max(), 1e-300)


def evolve(h: EffectiveHamiltonian, psi0=None, t_max: float = 10.0,
           rel_tol: float = DEFAULT_RTOL, n_samples: Optional[int] = None) -> Trajectory:
    """Propagate ``psi0`` under ``h`` and sample on a uniform grid.

    The grid has at least 20 points per shortest oscillation period, and at
    least 201 points unless ``n_samples`` is given.
    """
    psi0 = _check_psi0(h, psi0)
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if not 0 < rel_tol <= 1e-6:
        raise ValueError("rel_tol must lie in (0, 1e-6]")
    period = 2 * math.pi / _max_frequency(h.matrix)
    needed = int(math.ceil(20 * t_max / period)) + 1
    n = max(needed, 201 if n_samples is None else n_samples)
    times = np.linspace(0.0, t_max, n)

    a = -1j * h.matrix
    sol = solve_ivp(lambda t, y: a @ y, (0.0, t_max), psi0, method="DOP853",
                    t_eval=times, rtol=rel_tol, atol=rel_tol * 1e-3)
    if sol.status < 0:
        raise IntegrationError(f"propagation failed: {sol.message}",
                               float(sol.t[-1]) if sol.t.size else 0.0)
    amps = sol.y.T.copy()
    amps[0] = psi0
    return Trajectory(times, amps, h.labels)


def default_t_ceiling(h: EffectiveHamiltonian) -> float:
    rates = [r for r in (h.kappa, h.gamma) if r > 0]
    g = np.abs(h.matrix - np.diag(np.diag(h.matrix))).max(initial=0.0)
    candidates = [1e3 / min(rates)] if rates else []
    if g > 0:
        candidates.append(1e4 / g)
    return max(candidates) if candidates else 1e4


def _integrated_populations(h, psi0, t_end, rtol, pop_floor=None, masks=()):
    """Integrate populations over [0, t_end] as extra ODE components.

    Returns (final amplitudes, integrals per mask, time reached, status).
    Integration stops early once the total population drops to ``pop_floor``.
    """
    a = -1j * h.matrix
    dim = h.dim
    masks = [np.asarray(m, dtype=bool) for m in masks]

    def rhs(t, y):
        psi = y[:dim]
        p = (psi.real ** 2 + psi.imag ** 2)
        return np.concatenate([a @ psi, [p[m].sum() for m in masks]])

    events = None
    if pop_floor is not None:
        def floor_event(t, y):
            psi = y[:dim]
            return np.vdot(psi, psi).real - pop_floor
        floor_event.terminal = True
        floor_event.direction = -1
        events = floor_event

    y0 = np.concatenate([psi0, np.zeros(len(masks), dtype=complex)])
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol,
                    atol=rtol * 1e-3, events=events)
    if sol.status < 0:
        raise IntegrationError(f"propagation failed: {sol.message}", float(sol.t[-1]))
    y = sol.y[:, -1]
    return y[:dim], y[dim:].real, float(sol.t[-1])


def emission_budget_timedomain(h: EffectiveHamiltonian, psi0=None, *,
                               pop_floor: float = DEFAULT_POP_FLOOR,
                               t_ceiling: Optional[float] = None,
                               rel_tol: float = DEFAULT_RTOL) -> EmissionBudget:
    """Emission budget by direct propagation until the excitation has left.

    ``eta_ext = 2 kappa int P_cav dt`` and ``eta_free = 2 gamma int P_exc dt``
    are integrated until the population falls below ``pop_floor`` or
    ``t_ceiling`` is reached. The estimate is repeated at a ten-fold tighter
    tolerance until successive values of ``eta_ext`` differ by < 1e-9.
    """
    if h.cavity_mask is None or h.excited_mask is None:
        raise ValueError("emission budget needs cavity and excited masks")
    kappa, gamma = h.kappa, h.gamma
    if kappa <= 0 and gamma <= 0:
        raise NoDecayChannelError("kappa = gamma = 0: the excitation never leaves")
    psi0 = _check_psi0(h, psi0)
    t_end = default_t_ceiling(h) if t_ceiling is None else float(t_ceiling)

    masks = [h.cavity_mask, h.excited_mask]
    if h.plus_mask is not None:
        masks.append(h.plus_mask)

    prev = None
    rtol = rel_tol
    for _ in range(4):
        psi_end, ints, t_reached = _integrated_populations(
            h, psi0, t_end, rtol, pop_floor=pop_floor, masks=masks)
        eta_ext = 2 * kappa * ints[0]
        if prev is not None and abs(eta_ext - prev[0]) < 1e-9:
            break
        prev = (eta_ext, psi_end, ints, t_reached)
        if rtol <= 1e-13:
            break
        rtol = max(rtol / 10, 1e-13)
    eta_free = 2 * gamma * ints[1]
    residual = float(np.vdot(psi_end, psi_end).real)
    refine = abs(eta_ext - prev[0]) if prev is not None else rtol
    defect = abs(1.0 - (eta_ext + eta_free + residual))
    purity = None
    if h.plus_mask is not None and eta_ext > 0:
        purity = min(1.0, 2 * kappa * ints[2] / eta_ext)
    return EmissionBudget(
        eta_ext=float(eta_ext), eta_free=float(eta_free), residual=residual,
        purity=purity, err_est=float(defect + refine + 10 * rtol),
        method="time", converged=residual <= UNCONVERGED_RESIDUAL)


def integrated_populations_steady(h: EffectiveHamiltonian, psi0=None):
    """Solve ``H X - X H^dagger = -i psi0 psi0^dagger``; return (X, residual norm)."""
    psi0 = _check_psi0(h, psi0)
    m = h.matrix
    if np.linalg.eigvals(m).imag.max() > -1e-12:
        raise StabilityError(
            "Hamiltonian has an undamped mode (max Im eigenvalue > -1e-12); "
            "time-integrated populations diverge")
    rhs = -1j * np.outer(psi0, psi0.conj())
    x = sla.solve_sylvester(m, -m.conj().T, rhs)
    res = np.linalg.norm(m @ x - x @ m.conj().T - rhs)
    return x, float(res)


def emission_budget_steady(h: EffectiveHamiltonian, psi0=None) -> EmissionBudget:
    """Emission budget from one linear matrix solve (no time stepping)."""
    if h.cavity_mask is None or h.excited_mask is None:
        raise ValueError("emission budget needs cavity and excited masks")
    if h.kappa <= 0 and h.gamma <= 0:
        raise NoDecayChannelError("kappa = gamma = 0: the excitation never leaves")
    x, res = integrated_populations_steady(h, psi0)
    pops = np.diag(x).real
    eta_ext = 2 * h.kappa * pops[h.cavity_mask].sum()
    eta_free = 2 * h.gamma * pops[h.excited_mask].sum()
    purity = None
    if h.plus_mask is not None and eta_ext > 0:
        purity = min(1.0, 2 * h.kappa * pops[h.plus_mask].sum() / eta_ext)
    scale = np.linalg.norm(h.matrix) * max(1.0, np.abs(x).max())
    return EmissionBudget(float(eta_ext), float(eta_free), 0.0, purity,
                          err_est=float(res * 2 * max(h.kappa, h.gamma) * h.dim + 1e-14 * scale),
                          method="steady")


def emission_budget(h: EffectiveHamiltonian, psi0=None, method: str = "steady",
                    **kwargs) -> EmissionBudget:
    if method == "steady":
        return emission_budget_steady(h, psi0)
    if method == "time":
        return emission_budget_timedomain(h, psi0, **kwargs)
    raise ValueError(f"unknown method {method!r}; use 'steady' or 'time'")


def analytic_two_level_efficiency(g: float, kappa: float, gamma: float) -> float:
    """Resonant two-level extraction efficiency.

    eta = kappa g^2 / ((kappa + gamma)(kappa gamma + g^2))
    """
    d1 = kappa + gamma
    d2 = kappa * gamma + g * g
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degenerate rates: need kappa + gamma > 0 and kappa*gamma + g^2 > 0")
    return kappa * g * g / (d1 * d2)


def limit_efficiency(m: int, kappa: float, gamma: float) -> float:
    """Strong-coupling bound m*kappa / (m*kappa + gamma) for m emitting states."""
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    den = m * kappa + gamma
    if den <= 0:
        raise ValueError("m*kappa + gamma must be positive")
    return m * kappa / den


def polarization_purity(h: EffectiveHamiltonian, psi0=None, method: str = "steady",
                        **kwargs) -> float:
    """Fraction of the cavity output leaving through the atom-coupled + mode."""
    if h.plus_mask is None:
        raise ValueError("Hamiltonian carries no plus-mode mask")
    budget = emission_budget(h, psi0, method=method, **kwargs)
    if budget.eta_ext <= 0 or budget.purity is None:
        raise UndefinedPurityError("no cavity emission: purity undefined")
    return budget.purity


def _spectral_projections(m: np.ndarray, psi0: np.ndarray, rel_tol: float):
    """Eigenvalues of Hermitian ``m`` grouped into degenerate clusters.

    Yields (mean eigenvalue, projection of psi0 onto the cluster).
    """
    w, v = np.linalg.eigh(m)
    tol = rel_tol * max(np.linalg.norm(m, 2), 1e-300)
    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    out = []
    for idx in groups:
        vk = v[:, idx]
        out.append((w[idx].mean(), vk @ (vk.conj().T @ psi0)))
    return out


def lossless_time_average(h: EffectiveHamiltonian, psi0=None, mask=None,
                          degeneracy_tol: float = 1e-9) -> float:
    """Infinite-time average of the population in ``mask`` for Hermitian ``h``.

    Cross terms between distinct eigenfrequencies average out; those inside
    a degenerate cluster (relative spacing below ``degeneracy_tol``) are kept.
    ``mask`` defaults to the cavity-photon states.
    """
    if not h.is_hermitian():
        raise ValueError("lossless_time_average needs a Hermitian Hamiltonian (kappa = gamma = 0)")
    psi0 = _check_psi0(h, psi0)
    mask = h.cavity_mask if mask is None else np.asarray(mask, dtype=bool)
    m = h.hermitian_part
    total = 0.0
    for _, proj in _spectral_projections(m, psi0, degeneracy_tol):
        total += float((np.abs(proj[mask]) ** 2).sum())
    return total


def _window_integral_spectral(m, psi0, window):
    """int_0^T psi psi^dagger dt for Hermitian ``m`` via its eigenbasis."""
    w, v = np.linalg.eigh(m)
    c = v.conj().T @ psi0
    dw = w[:, None] - w[None, :]
    small = np.abs(dw * window) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(small, window, (1 - np.exp(-1j * dw * window)) / (1j * np.where(small, 1, dw)))
    return v @ (np.outer(c, c.conj()) * f) @ v.conj().T


def _window_integral_sylvester(m, psi0, window):
    """int_0^T psi psi^dagger dt from H X - X H^dagger = -i(rho0 - rho(T))."""
    psi_t = sla.expm(-1j * m * window) @ psi0
    rhs = -1j * (np.outer(psi0, psi0.conj()) - np.outer(psi_t, psi_t.conj()))
    return sla.solve_sylvester(m, -m.conj().T, rhs)


def finite_window_cavity_population(h: EffectiveHamiltonian, psi0=None, window: float = 8 * math.pi,
                                    method: str = "quadrature", mask=None,
                                    rel_tol: float = DEFAULT_RTOL) -> float:
    """Mean population of ``mask`` (default: cavity states) over [0, window].

    ``method="quadrature"`` integrates along the propagated trajectory;
    ``method="linear"`` evaluates the same integral in closed form (eigenbasis
    for Hermitian ``h``, a Sylvester solve otherwise) and is used inside
    optimisation loops.
    """
    if not window > 0:
        raise ValueError("window must be positive")
    psi0 = _check_psi0(h, psi0)
    mask = h.cavity_mask if mask is None else np.asarray(mask, dtype=bool)
    if method == "quadrature":
        _, ints, t_reached = _integrated_populations(h, psi0, window, rel_tol, masks=[mask])
        if t_reached < window * (1 - 1e-12):
            raise IntegrationError("window integration stopped early", t_reached)
        return float(ints[0] / window)
    if method == "linear":
        if h.is_hermitian():
            x = _window_integral_spectral(h.hermitian_part, psi0, window)
        elif h.eigvals().imag.max() > -1e-12:
            # an undamped mode makes the Sylvester operator singular
            return finite_window_cavity_population(h, psi0, window, "quadrature", mask, rel_tol)
        else:
            x = _window_integral_sylvester(h.matrix, psi0, window)
        return float(np.diag(x).real[mask].sum() / window)
    raise ValueError(f"unknown method {method!r}; use 'quadrature' or 'linear'")
