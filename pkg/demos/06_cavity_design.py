"""Trading birefringence for cavity length.

A longer cavity has weaker coupling (g ~ L^-1/2) and slower decay
(kappa ~ 1/L). For an ion-cavity system with {g0, kappa0, gamma}/2pi =
{12.3, 4.1, 11.5} MHz at 370 um, how long can the cavity be made while
keeping the efficiency it has today, once birefringence is allowed?
"""
import numpy as np

from purcellsim import (best_birefringence, efficiency_at, iso_efficiency_max_length,
                        strong_coupling_geometry, sweep_length_birefringence, takahashi_preset)

geom = takahashi_preset()
eta0, _ = efficiency_at(geom, geom.l0, 0.0)
d, eta = best_birefringence(geom, geom.l0, box=(0, 40))
print(f"at {geom.l0:.0f} um: eta = {100 * eta0:.2f}% without birefringence, "
      f"{100 * eta:.2f}% at delta_p/2pi = {d:.2f} MHz")

# hold the rounded present-day value of 20.0%
l_fixed, _ = iso_efficiency_max_length(geom, 0.200, delta_p=18.4)
l_free, d_free = iso_efficiency_max_length(geom, 0.200, delta_p_box=(0, 40))
print(f"eta >= 20.0% at 18.4 MHz up to {l_fixed:.0f} um; "
      f"with the splitting re-tuned at each length up to {l_free:.0f} um ({d_free:.1f} MHz)")

print("\neta_ext (%) on a coarse grid; rows are lengths in um, columns delta_p/2pi in MHz")
dps = np.arange(0, 41, 8.0)
rows = sweep_length_birefringence(geom, [300, 400, 500, 600, 700], dps)
print("       " + "".join(f"{d:7.0f}" for d in dps))
for i in range(0, len(rows), len(dps)):
    chunk = rows[i:i + len(dps)]
    print(f"{chunk[0].l:6.0f} " + "".join(f"{100 * r.eta_ext:7.2f}" for r in chunk))

syn = strong_coupling_geometry()
l_syn, d_syn = iso_efficiency_max_length(syn, 0.5, delta_p_box=(0, 4))
print(f"\nstrong-coupling geometry (kappa0 = gamma = 0.1 g0): eta = 0.5 holds to "
      f"{l_syn:.2f} l0 at delta_p = {d_syn:.2f} g0")
