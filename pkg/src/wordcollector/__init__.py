"""Expected waiting time to collect every word of a weighted language.

Four estimates are available for one spectrum: the exact integral
(:func:`waiting_time_exact`), the asymptotic estimator
(:func:`asymptotic_waiting_time`), the U2 approximation (:func:`u2`) and
Monte Carlo simulation (:func:`run_trials`).
"""

from .approximations import ApproxReport, BoundUndefinedError, check_bounds, harmonic, log_u2, u2, u2_naive
from .asymptotics import (
    AsymptoticEstimate,
    Exponents,
    NoRootError,
    ParameterPack,
    TStarConvergenceError,
    UnsupportedConfigurationError,
    asymptotic_waiting_time,
    eta_theta,
    m_scale_exponents,
    parameter_pack,
    rho_theta,
    smallest_positive_root,
    t_star,
)
from .exact import (
    ConvergenceError,
    QuadratureSettings,
    log_waiting_time_exact,
    psi_curve,
    psi_value,
    waiting_time_exact,
    waiting_time_inclusion_exclusion,
)
from .languages import Kind, LanguageModel, enumerate_words, spectrum, spectrum_from_words, word_count
from .simulate import SimulationConfig, SimulationResult, build_sampler, run_trials, simulate_once
from .spectrum import (
    ClassSpectrum,
    EmptyLanguageError,
    InvalidAssignmentError,
    SpectrumError,
    SubComposition,
    WeightAssignment,
    WeightClass,
    WeightCollisionWarning,
    build_spectrum,
    normalize,
    spectrum_from_weights,
    uniform_spectrum,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
