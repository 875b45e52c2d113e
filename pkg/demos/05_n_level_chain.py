"""A ladder of n coupled ground states.

Each extra ground state adds a cavity photon state that can emit. In the
strong-coupling limit the achievable efficiency approaches
n kappa / (n kappa + gamma), and the best intra-level coupling tends to
sqrt(2) g for every n.
"""
import math

from purcellsim import ModelSpec, Rates, enhancement_vs_cooperativity, limit_efficiency

C = 1e4
print(f"C = {C:g}, kappa = gamma/sqrt(n)")
print(f"{'n':>3} {'Omega*/g':>9} {'eta max':>8} {'bound':>8} {'gain pp':>8} {'1-2/(1+sqrt n)':>15}")
for n in (1, 2, 4, 6, 8, 10):
    spec = ModelSpec("n-level-chain", Rates(1, 0, 0), n=n)
    row, = enhancement_vs_cooperativity(spec, [C], "omega", kappa_over_gamma=1 / math.sqrt(n))
    rates = Rates.from_cooperativity(C, 1 / math.sqrt(n))
    bound = limit_efficiency(n, rates.kappa, rates.gamma)
    print(f"{n:3d} {row.best_params['omega']:9.4f} {row.result.best_value:8.4f} {bound:8.4f} "
          f"{100 * row.enhancement:8.3f} {100 * (1 - 2 / (1 + math.sqrt(n))):15.3f}")
