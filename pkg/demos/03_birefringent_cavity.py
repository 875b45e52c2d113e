"""Birefringence as a second emission channel.

A circularly polarised transition couples to only one of two cavity modes.
Splitting the linear polarisation modes by delta_p mixes in the second
circular mode, which holds the photon longer away from the atom. In the
lossless limit the photon spends 2/3 of its time in the cavity at
delta_p = sqrt(2) g instead of 1/2.
"""
import math

import numpy as np

from purcellsim import (ModelSpec, Rates, build_two_level_birefringent, emission_budget_steady,
                        enhancement_vs_cooperativity, lossless_time_average)

for d in [0.0, 0.5, 1.0, math.sqrt(2), 2.0, 3.0]:
    h = build_two_level_birefringent(Rates(1, 0, 0, delta_p=d))
    print(f"delta_p = {d:5.3f} g   time-averaged photon population {lossless_time_average(h):.4f}")

print()
print("optimised enhancement with kappa = gamma/sqrt(2)")
spec = ModelSpec("two-level-biref", Rates(1, 0, 0))
rows = enhancement_vs_cooperativity(spec, [0.1, 1, 5, 10, 100, 1e4], "delta-p",
                                    kappa_over_gamma=1 / math.sqrt(2))
for r in rows:
    print(f"C = {r.cooperativity:8g}   delta_p* = {r.best_params['delta_p']:.4f} g   "
          f"eta {r.result.baseline_value:.4f} -> {r.result.best_value:.4f}   "
          f"+{100 * r.enhancement:.2f} pp")

# polarisation of the output: the extra channel leaks photons into the
# orthogonal circular mode
h = build_two_level_birefringent(Rates.from_cooperativity(10, 1 / math.sqrt(2)).with_(delta_p=np.sqrt(2)))
b = emission_budget_steady(h)
print(f"\nC = 10 at delta_p = sqrt2 g: eta_ext {b.eta_ext:.4f}, purity {b.purity:.4f}")
