"""Vacuum Rabi oscillations of a two-level atom in a single-mode cavity.

Without losses the excitation swaps between atom and cavity as cos^2(g t).
Switching on cavity decay at kappa = g damps the oscillation and the norm
of the state drops as the photon leaks out.
"""
import numpy as np

from purcellsim import Rates, build_two_level, evolve

lossless = build_two_level(Rates(g=1.0, kappa=0.0, gamma=0.0))
damped = build_two_level(Rates(g=1.0, kappa=1.0, gamma=0.0))

print(lossless.matrix)

a = evolve(lossless, t_max=2 * np.pi, n_samples=241)
b = evolve(damped, t_max=2 * np.pi, n_samples=241)

print(f"{'t':>8} {'P_e lossless':>14} {'cos^2 t':>10} {'P_e damped':>12} {'norm damped':>12}")
rows = zip(a.times, a.population(lossless.excited_mask), b.population(damped.excited_mask), b.norm)
for t, p, q, n in list(rows)[::20]:
    print(f"{t:8.3f} {p:14.6f} {np.cos(t) ** 2:10.6f} {q:12.6f} {n:12.6f}")

# the lossless run conserves probability, the damped one only loses it
assert np.allclose(a.norm, 1.0, atol=1e-8)
assert np.all(np.diff(b.norm) <= 1e-12)
