"""Bloch-Redfield dynamics of a V-type three-level system driven by polarized
or isotropic incoherent light, and its stationary Fano coherence."""

from .analysis import (
    NoExcitedPopulation,
    NotConverged,
    PositivityReport,
    RegimeLabel,
    SweepResult,
    classify_regime,
    coherence_lifetime,
    coherence_magnitude,
    coherence_ratio,
    oscillation_frequency,
    positivity_report,
    sweep_steady,
)
from .dynamics import (
    MethodDisagreement,
    SteadyResult,
    TimeSeries,
    propagate,
    propagate_optical,
    rk4_oracle,
    simulate,
    steady_state,
    time_series,
)
from .generators import build_optical_generator, build_population_generator
from .linalg import DegenerateKernel, hermitian3_eigenvalues, matrix_exponential, steady_nullspace
from .model import (
    GROUND_STATE,
    POLARIZED_FRACTION,
    DerivedRates,
    FieldMode,
    InvalidParameters,
    SystemParams,
    density_from_state,
    derive_rates,
    mean_photon_number,
)
from .presets import preset

__version__ = "0.1.0"
