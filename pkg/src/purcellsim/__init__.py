"""Purcell-enhanced photon extraction with birefringent cavities and coupled ground states."""
from .model import (
    ConfigurationError,
    DegenerateRatesError,
    EffectiveHamiltonian,
    ModelSpec,
    Rates,
    Scheme,
    photon_block_rotation,
    build,
    build_n_level_chain,
    build_three_level,
    build_two_level,
    build_two_level_birefringent,
    transform_basis,
)
from .dynamics import (
    EmissionBudget,
    Trajectory,
    analytic_two_level_efficiency,
    emission_budget,
    emission_budget_steady,
    emission_budget_timedomain,
    evolve,
    finite_window_cavity_population,
    limit_efficiency,
    lossless_time_average,
    polarization_purity,
)
from .optimize import (
    OptimizationResult,
    enhancement_vs_cooperativity,
    maximize_1d,
    maximize_2d,
    optimal_kappa,
    optimize_efficiency,
    optimize_lossless_average,
    optimize_window,
)
from .design import (
    CavityGeometry,
    best_birefringence,
    efficiency_at,
    iso_efficiency_max_length,
    rates_at_length,
    strong_coupling_geometry,
    sweep_length_birefringence,
    takahashi_preset,
)

__version__ = "0.1.0"
