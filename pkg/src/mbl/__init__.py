"""Steady-state quantum correlations of a driven, damped coupled mode.

A two-level system exchange-coupled to a bosonic mode, with weak coherent
drives and Lindblad damping. The package computes the equal-time
second-order correlation g²(0) of the mode two ways (closed-form
perturbative amplitudes and a full master-equation steady state), the
dressed level ladder, time evolution, and parameter sweeps for a bundled
set of figure presets.
"""

__version__ = "0.1.0"

from .analytic import (
    AmplitudeSet,
    AmplitudeTrajectory,
    amplitude_g2,
    analytic_g2,
    closed_form_amplitudes,
    evolve_amplitudes,
    optimal_detuning,
    solve_steady_linear,
)
from .core import Space, annihilation, dagger, expectation, identity, ket, projector, qubit_ops, tensor
from .errors import NumericalError, ParameterError
from .lindblad import (
    build_liouvillian,
    density_diagnostics,
    evolve,
    fock_populations,
    g2_zero,
    mean_occupation,
    steady_state,
)
from .model import (
    DressedLevel,
    LabFrameParams,
    SystemParams,
    build_h_eff,
    build_h_nonhermitian,
    dressed_spectrum,
    lab_to_detunings,
)
from .sweep import (
    FIGURE_NAMES,
    EvolutionJob,
    ResultGrid,
    SweepAxis,
    SweepSpec,
    TimeSeries,
    figure_preset,
    find_minimum,
    run_evolution,
    run_sweep,
)

__all__ = [
    "__version__",
    "AmplitudeSet",
    "AmplitudeTrajectory",
    "DressedLevel",
    "EvolutionJob",
    "FIGURE_NAMES",
    "LabFrameParams",
    "NumericalError",
    "ParameterError",
    "ResultGrid",
    "Space",
    "SweepAxis",
    "SweepSpec",
    "SystemParams",
    "TimeSeries",
    "amplitude_g2",
    "analytic_g2",
    "annihilation",
    "build_h_eff",
    "build_h_nonhermitian",
    "build_liouvillian",
    "closed_form_amplitudes",
    "dagger",
    "density_diagnostics",
    "dressed_spectrum",
    "evolve",
    "evolve_amplitudes",
    "expectation",
    "figure_preset",
    "find_minimum",
    "fock_populations",
    "g2_zero",
    "identity",
    "ket",
    "lab_to_detunings",
    "mean_occupation",
    "optimal_detuning",
    "projector",
    "qubit_ops",
    "run_evolution",
    "run_sweep",
    "solve_steady_linear",
    "steady_state",
    "tensor",
]
