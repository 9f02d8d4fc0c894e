"""Transverse-mode OPO toolkit.

Models mode-selective parametric down-conversion in a type II OPO:
Hermite-Gauss coupling coefficients, oscillation thresholds, two-mode
entanglement (inseparability) spectra under loss, optimal pump
superpositions, and a stochastic Langevin cross-check of the analytic
spectra.
"""

from .hg_modes import HGMode, amplitude, hermite_polynomial
from .langevin import (
    ConvergenceError,
    JointSpectra,
    NumericalInstabilityError,
    SimConfig,
    SpectrumEstimate,
    SteadyState,
    simulate_joint_spectra,
    simulate_spectrum,
    steady_state,
)
from .opo_model import (
    AMPLIFICATION,
    DEAMPLIFICATION,
    AboveThresholdError,
    CavityParams,
    EfficiencyChain,
    NoOscillationError,
    SpectrumPoint,
    UnphysicalInputError,
    apply_detection_loss,
    correlation_spectrum,
    enhancement_percent,
    infer_source_inseparability,
    inseparability,
    inseparability_from_db,
    pump_parameter_threshold,
    reduction_percent,
    squeezed_variance,
    threshold,
)
from .overlap import (
    CouplingResult,
    InvalidModeConfigError,
    ProfileExpansion,
    PumpSuperposition,
    QuadratureError,
    coupling_coefficient,
    default_pump_waist,
    expand_profile,
    raw_overlap,
)
from .pump_optimizer import (
    CompetitionReport,
    NoCouplingError,
    OptimizationResult,
    competing_mode_analysis,
    optimize_pump,
)

__version__ = "0.1.0"

__all__ = [
    "AMPLIFICATION",
    "DEAMPLIFICATION",
    "AboveThresholdError",
    "CavityParams",
    "CompetitionReport",
    "ConvergenceError",
    "CouplingResult",
    "EfficiencyChain",
    "HGMode",
    "InvalidModeConfigError",
    "JointSpectra",
    "NoCouplingError",
    "NoOscillationError",
    "NumericalInstabilityError",
    "OptimizationResult",
    "ProfileExpansion",
    "PumpSuperposition",
    "QuadratureError",
    "SimConfig",
    "SpectrumEstimate",
    "SpectrumPoint",
    "SteadyState",
    "UnphysicalInputError",
    "amplitude",
    "apply_detection_loss",
    "competing_mode_analysis",
    "correlation_spectrum",
    "coupling_coefficient",
    "default_pump_waist",
    "enhancement_percent",
    "expand_profile",
    "hermite_polynomial",
    "infer_source_inseparability",
    "inseparability",
    "inseparability_from_db",
    "optimize_pump",
    "pump_parameter_threshold",
    "raw_overlap",
    "reduction_percent",
    "simulate_joint_spectra",
    "simulate_spectrum",
    "squeezed_variance",
    "steady_state",
    "threshold",
]
