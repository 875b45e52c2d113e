import math

import numpy as np
import pytest
import scipy.linalg as sla
from scipy.integrate import trapezoid
from hypothesis import given, settings, strategies as st

from purcellsim.dynamics import (
    IntegrationError,
    NoDecayChannelError,
    StabilityError,
    UndefinedPurityError,
    analytic_two_level_efficiency,
    emission_budget,
    emission_budget_steady,
    emission_budget_timedomain,
    evolve,
    finite_window_cavity_population,
    lossless_time_average,
    limit_efficiency,
    polarization_purity,
)
from purcellsim.design import rates_at_length, takahashi_preset
from purcellsim.model import (
    Rates,
    build_n_level_chain,
    build_three_level,
    build_two_level,
    build_two_level_birefringent,
    excited_state,
)

S2 = math.sqrt(2)
rate = st.floats(0.1, 10.0)
split = st.floats(-5.0, 5.0)


def brute_average(h, t_end, n, mask=None):
    """Trapezoid mean of a mask population using exact matrix exponentials."""
    mask = h.cavity_mask if mask is None else mask
    t = np.linspace(0, t_end, n)
    step = sla.expm(-1j * h.matrix * (t[1] - t[0]))
    psi = excited_state(h)
    pops = np.empty(n)
    for i in range(n):
        pops[i] = (np.abs(psi[mask]) ** 2).sum()
        psi = step @ psi
    return trapezoid(pops, t) / t_end


def models(g, k, y, dp, dz, om):
    return [
        (build_two_level(Rates(g, k, y)), 1),
        (build_two_level_birefringent(Rates(g, k, y, delta_p=dp)), 2),
        (build_three_level(Rates(g, k, y, delta_p=dp, delta_z=dz)), 4),
        (build_n_level_chain(Rates(g, k, y, omega=om), 3), 3),
    ]


class TestEvolve:
    def test_vacuum_rabi(self):
        traj = evolve(build_two_level(Rates(1.3, 0, 0)), t_max=10, rel_tol=1e-12)
        np.testing.assert_allclose(traj.populations[:, 0], np.cos(1.3 * traj.times) ** 2, atol=1e-9)
        np.testing.assert_allclose(traj.populations[:, 1], np.sin(1.3 * traj.times) ** 2, atol=1e-9)

    def test_detuned_rabi(self):
        g, d = 1.0, 1.5
        traj = evolve(build_two_level(Rates(g, 0, 0, delta_c=d)), t_max=12, rel_tol=1e-12)
        w = math.sqrt(d * d + 4 * g * g)
        expected = 4 * g * g / w ** 2 * np.sin(w * traj.times / 2) ** 2
        np.testing.assert_allclose(traj.populations[:, 1], expected, atol=1e-9)

    def test_matches_matrix_exponential(self):
        h = build_three_level(Rates(1, 0.3, 0.2, delta_p=0.7, delta_z=1.1))
        traj = evolve(h, t_max=5, n_samples=11, rel_tol=1e-12)
        for t, amp in zip(traj.times, traj.amplitudes):
            np.testing.assert_allclose(amp, sla.expm(-1j * h.matrix * t) @ excited_state(h), atol=1e-9)

    def test_sampling_resolves_fast_oscillation(self):
        traj = evolve(build_two_level(Rates(20.0, 0, 0)), t_max=10)
        period = 2 * math.pi / 40
        assert traj.times[1] - traj.times[0] <= period / 20 + 1e-12
        assert len(traj.times) >= 201

    def test_lossless_norm_conserved(self):
        traj = evolve(build_three_level(Rates(1, 0, 0, delta_p=2)), t_max=50, rel_tol=1e-10)
        np.testing.assert_allclose(traj.norm, 1.0, atol=1e-8)

    def test_rejects_bad_duration(self):
        with pytest.raises(ValueError):
            evolve(build_two_level(Rates(1, 0, 0)), t_max=0)

    def test_rejects_unnormalised_state(self):
        with pytest.raises(ValueError):
            evolve(build_two_level(Rates(1, 0, 0)), psi0=[1, 1])

    @given(g=rate, k=rate, y=rate, dp=split, dz=split, om=split)
    @settings(max_examples=20, deadline=None)
    def test_norm_monotone(self, g, k, y, dp, dz, om):
        for h, _ in models(g, k, y, dp, dz, om):
            traj = evolve(h, t_max=3 / min(k, y), n_samples=400)
            assert np.all(np.diff(traj.norm) <= 1e-9)


class TestEfficiency:
    @pytest.mark.parametrize("g,k,y", [(1, 1, 1), (1, 0.1, 0.1), (0.3, 2.0, 0.05), (5, 0.2, 3)])
    def test_analytic_two_level(self, g, k, y):
        h = build_two_level(Rates(g, k, y))
        exact = analytic_two_level_efficiency(g, k, y)
        assert emission_budget_steady(h).eta_ext == pytest.approx(exact, abs=1e-12)
        assert emission_budget_timedomain(h).eta_ext == pytest.approx(exact, abs=1e-8)

    def test_quarter_at_unit_rates(self):
        assert emission_budget_steady(build_two_level(Rates(1, 1, 1))).eta_ext == pytest.approx(0.25)

    @given(g=rate, k=rate, y=rate, dp=split, dz=split, om=split)
    @settings(max_examples=15, deadline=None)
    def test_methods_agree_and_conserve(self, g, k, y, dp, dz, om):
        for h, _ in models(g, k, y, dp, dz, om):
            t = emission_budget_timedomain(h)
            s = emission_budget_steady(h)
            assert t.converged
            assert t.eta_ext + t.eta_free + t.residual == pytest.approx(1.0, abs=1e-8)
            assert s.eta_ext + s.eta_free == pytest.approx(1.0, abs=1e-10)
            assert t.eta_ext == pytest.approx(s.eta_ext, abs=1e-7)

    @given(g=rate, k=rate, y=rate, dp=split, dz=split, om=split, s=st.floats(0.01, 100))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, g, k, y, dp, dz, om, s):
        for (h, _), (hs, _) in zip(models(g, k, y, dp, dz, om),
                                   models(s * g, s * k, s * y, s * dp, s * dz, s * om)):
            assert emission_budget_steady(hs).eta_ext == pytest.approx(
                emission_budget_steady(h).eta_ext, abs=1e-9)

    @given(g=rate, k=rate, y=rate, dp=split, dz=split, om=split)
    @settings(max_examples=40, deadline=None)
    def test_parity(self, g, k, y, dp, dz, om):
        base = [emission_budget_steady(h).eta_ext for h, _ in models(g, k, y, dp, dz, om)]
        for flipped in (models(g, k, y, -dp, dz, -om), models(g, k, y, dp, -dz, om)):
            for eta, (h, _) in zip(base, flipped):
                assert emission_budget_steady(h).eta_ext == pytest.approx(eta, abs=1e-11)

    @given(g=st.floats(0.1, 100.0), k=rate, y=rate, dp=split, dz=split, om=split)
    @settings(max_examples=60, deadline=None)
    def test_multiplicity_bound(self, g, k, y, dp, dz, om):
        for h, m in models(g, k, y, dp, dz, om):
            assert emission_budget_steady(h).eta_ext <= limit_efficiency(m, k, y) + 1e-6

    def test_detuning_lowers_efficiency(self):
        on = emission_budget_steady(build_two_level(Rates(1, 1, 0.1))).eta_ext
        off = emission_budget_steady(build_two_level(Rates(1, 1, 0.1, delta_c=2))).eta_ext
        assert off < on

    def test_birefringence_helps_strong_coupling(self):
        r = Rates(1, 0.05, 0.05)
        plain = emission_budget_steady(build_two_level_birefringent(r)).eta_ext
        biref = emission_budget_steady(build_two_level_birefringent(r.with_(delta_p=S2))).eta_ext
        assert biref > plain + 0.1

    def test_pure_cavity_loss(self):
        b = emission_budget_steady(build_two_level(Rates(1, 0.5, 0)))
        assert b.eta_ext == pytest.approx(1.0, abs=1e-12)

    def test_no_decay_channel(self):
        h = build_two_level(Rates(1, 0, 0))
        with pytest.raises(NoDecayChannelError):
            emission_budget_steady(h)
        with pytest.raises(NoDecayChannelError):
            emission_budget_timedomain(h)

    def test_undamped_mode_is_unstable(self):
        # the minus mode is uncoupled without birefringence and kappa = 0
        h = build_two_level_birefringent(Rates(1, 0, 0.5))
        with pytest.raises(StabilityError):
            emission_budget_steady(h, psi0=h.basis_state("u,0,1-"))

    def test_truncated_run_reports_residual(self):
        h = build_two_level(Rates(1, 0.01, 0.01))
        b = emission_budget_timedomain(h, t_ceiling=50.0)
        assert not b.converged
        assert b.residual > 1e-3
        assert b.eta_ext + b.eta_free + b.residual == pytest.approx(1.0, abs=1e-8)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            emission_budget(build_two_level(Rates(1, 1, 1)), method="magic")

    @pytest.mark.parametrize("m,k,y,expected", [(1, 1, 1, 0.5), (2, 1, 1, 2 / 3), (4, 0.5, 1, 2 / 3)])
    def test_limit_efficiency(self, m, k, y, expected):
        assert limit_efficiency(m, k, y) == pytest.approx(expected)

    def test_limit_efficiency_errors(self):
        with pytest.raises(ValueError):
            limit_efficiency(0, 1, 1)
        with pytest.raises(ValueError):
            limit_efficiency(1, 0, 0)


class TestEquivalences:
    def test_three_level_splittings_interchangeable(self):
        for k, y in [(0.3, 0.2), (1.0, 0.5)]:
            a = build_three_level(Rates(1, k, y, delta_p=1.7))
            b = build_three_level(Rates(1, k, y, delta_z=1.7))
            assert emission_budget_steady(a).eta_ext == pytest.approx(
                emission_budget_steady(b).eta_ext, abs=1e-12)

    @pytest.mark.parametrize("k,y", [(0.0, 0.0), (0.3, 0.2), (1.0, 0.5)])
    def test_three_level_reduces_to_birefringent(self, k, y):
        # equivalent once rates and time are expressed in units of the bright
        # coupling, which is sqrt(2) g for the three-level model
        h3 = build_three_level(Rates(1, k, y, delta_p=2.0))
        hb = build_two_level_birefringent(Rates(1, k / S2, y / S2, delta_p=S2))
        a = evolve(h3, t_max=20, n_samples=801, rel_tol=1e-12)
        b = evolve(hb, t_max=20 * S2, n_samples=801, rel_tol=1e-12)
        for ma, mb in [(h3.cavity_mask, hb.cavity_mask), (h3.excited_mask, hb.excited_mask)]:
            np.testing.assert_allclose(a.population(ma), b.population(mb), rtol=0, atol=1e-9)

    def test_same_rates_reduction_with_doubled_coupling(self):
        h3 = build_three_level(Rates(1, 0.3, 0.2, delta_p=1.1))
        hb = build_two_level_birefringent(Rates(S2, 0.3, 0.2, delta_p=1.1))
        assert emission_budget_steady(h3).eta_ext == pytest.approx(
            emission_budget_steady(hb).eta_ext, abs=1e-12)


class TestPurity:
    def test_no_birefringence_is_pure(self):
        h = build_two_level_birefringent(Rates(1, 0.3, 0.2))
        assert polarization_purity(h) == pytest.approx(1.0, abs=1e-12)

    def test_takahashi_at_optimum_is_mixed(self):
        h = build_two_level_birefringent(rates_at_length(takahashi_preset(), 370.0, 19.3))
        p_s = polarization_purity(h)
        p_t = polarization_purity(h, method="time")
        assert 0.5 < p_s < 1.0
        assert p_t == pytest.approx(p_s, abs=1e-7)

    def test_linear_basis_has_no_purity(self):
        h = build_two_level_birefringent(Rates(1, 0.3, 0.2, delta_p=1), basis="linear")
        with pytest.raises(ValueError):
            polarization_purity(h)

    def test_no_cavity_emission(self):
        h = build_two_level_birefringent(Rates(0, 0.3, 0.2))
        with pytest.raises(UndefinedPurityError):
            polarization_purity(h)


class TestLosslessAverages:
    def test_two_level_half(self):
        assert lossless_time_average(build_two_level(Rates(1, 0, 0))) == pytest.approx(0.5, abs=1e-12)

    def test_birefringent_two_thirds(self):
        h = build_two_level_birefringent(Rates(1, 0, 0, delta_p=S2))
        assert lossless_time_average(h) == pytest.approx(2 / 3, abs=1e-12)

    @pytest.mark.parametrize("dp", [0.5, 1.0, 2.5])
    def test_matches_long_time_average(self, dp):
        h = build_two_level_birefringent(Rates(1, 0, 0, delta_p=dp))
        assert lossless_time_average(h) == pytest.approx(brute_average(h, 3000.0, 60001), abs=5e-3)

    def test_degenerate_cluster_keeps_cross_terms(self):
        # without splittings the extra photon modes are dark and stay empty
        h = build_two_level_birefringent(Rates(1, 0, 0))
        assert lossless_time_average(h) == pytest.approx(0.5, abs=1e-12)
        h3 = build_three_level(Rates(1, 0, 0))
        assert lossless_time_average(h3) == pytest.approx(0.5, abs=1e-12)

    def test_requires_hermitian(self):
        with pytest.raises(ValueError):
            lossless_time_average(build_two_level(Rates(1, 0.1, 0)))


class TestFiniteWindow:
    def test_no_splitting_is_about_half(self):
        h = build_three_level(Rates(1, 0, 0))
        assert finite_window_cavity_population(h, window=8 * math.pi) == pytest.approx(0.5, abs=0.05)

    @pytest.mark.parametrize("rates", [Rates(1, 0, 0, delta_p=2.1, delta_z=1.0),
                                       Rates(1, 0.2, 0.1, delta_p=0.4, delta_z=1.3)])
    def test_methods_agree_with_brute_force(self, rates):
        h = build_three_level(rates)
        w = 8 * math.pi
        quad = finite_window_cavity_population(h, window=w)
        lin = finite_window_cavity_population(h, window=w, method="linear")
        assert lin == pytest.approx(quad, abs=1e-9)
        assert quad == pytest.approx(brute_average(h, w, 20001), abs=1e-6)

    def test_marginally_stable_falls_back(self):
        # with kappa = 0 and no birefringence the minus mode never decays
        h = build_two_level_birefringent(Rates(1, 0, 0.3))
        lin = finite_window_cavity_population(h, window=5.0, method="linear")
        assert lin == pytest.approx(brute_average(h, 5.0, 20001), abs=1e-6)

    def test_bad_window(self):
        with pytest.raises(ValueError):
            finite_window_cavity_population(build_two_level(Rates(1, 0, 0)), window=-1)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            finite_window_cavity_population(build_two_level(Rates(1, 0, 0)), method="fast")


def test_integration_error_carries_time():
    err = IntegrationError("boom", 3.5)
    assert err.t_reached == 3.5
