"""Vibronic two-photon absorption: closed-form perturbation theory for
uncorrelated and frequency-entangled photon pairs, an exact
discretized-field benchmark solver, and scan/figure tooling."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    CoverageError,
    CrossCheckError,
    DomainError,
    GridMismatchError,
    NearSingularError,
    ResolutionError,
    StepSizeError,
    VibronicTpaError,
)
from .molecule import MolecularSystem, MorsePotentialParams, build_system, na2_system
from .photons import (
    JsaGrid,
    PhotonFieldConfig,
    SchmidtSpectrum,
    build_jsa_grid,
    schmidt_decompose,
)
from .pt_engine import (
    AmplitudeResult,
    InteractionParams,
    TransitionMatrix,
    population_trace,
    population_traces,
    selectivity,
    transition_matrix,
)

__all__ = [
    "__version__",
    "VibronicTpaError",
    "ConfigError",
    "ConvergenceError",
    "CoverageError",
    "CrossCheckError",
    "DomainError",
    "GridMismatchError",
    "NearSingularError",
    "ResolutionError",
    "StepSizeError",
    "MolecularSystem",
    "MorsePotentialParams",
    "build_system",
    "na2_system",
    "PhotonFieldConfig",
    "JsaGrid",
    "SchmidtSpectrum",
    "build_jsa_grid",
    "schmidt_decompose",
    "InteractionParams",
    "AmplitudeResult",
    "TransitionMatrix",
    "population_trace",
    "population_traces",
    "transition_matrix",
    "selectivity",
]
