"""Where does the photon go?

The emission budget splits the initial excitation into the fraction that
leaves through the cavity mirrors (eta_ext) and the fraction lost to free
space (eta_free). Two independent routes give it: propagating the state in
time, or one Sylvester solve for the time-integrated populations. For the
resonant two-level atom there is also a closed form.
"""
from purcellsim import (Rates, analytic_two_level_efficiency, build_two_level,
                        emission_budget_steady, emission_budget_timedomain)

for g, kappa, gamma in [(1, 1, 1), (1, 0.1, 0.1), (5, 2, 0.3), (0.3, 1, 1)]:
    h = build_two_level(Rates(g, kappa, gamma))
    t = emission_budget_timedomain(h)
    s = emission_budget_steady(h)
    exact = analytic_two_level_efficiency(g, kappa, gamma)
    print(f"g={g:<4} kappa={kappa:<4} gamma={gamma:<4} C={g * g / (2 * kappa * gamma):7.2f}  "
          f"closed form {exact:.10f}  steady {s.eta_ext:.10f}  time {t.eta_ext:.10f}  "
          f"eta_free {t.eta_free:.4f}  residual {t.residual:.1e}")

# critical damping kappa = g is the best one can do for fixed g and gamma
g, gamma = 1.0, 0.2
best = max((analytic_two_level_efficiency(g, k / 100, gamma), k / 100) for k in range(1, 400))
print("best kappa on a grid:", best[1], "eta =", round(best[0], 6), "g^2/(g+gamma)^2 =",
      round(g * g / (g + gamma) ** 2, 6))
