"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical failures (convergence, coverage, resolution, step size)
with 3, and cross-check violations with 4.
"""


class VibronicTpaError(Exception):
    """Base class for all package errors."""


class DomainError(VibronicTpaError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(VibronicTpaError):
    """A run specification or molecule description is invalid."""


class ConvergenceError(VibronicTpaError):
    """A series or quadrature failed to reach its tolerance."""


class NearSingularError(ConvergenceError):
    """An argument came too close to a singular point (e.g. the 2F1 branch cut)."""


class CoverageError(VibronicTpaError):
    """A finite grid fails to capture the required fraction of a distribution."""


class ResolutionError(VibronicTpaError):
    """A sampled function is under-resolved on its grid."""


class StepSizeError(VibronicTpaError):
    """Time integration drifted beyond tolerance; carries a suggested step."""

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class CrossCheckError(VibronicTpaError):
    """Engine cross-comparison exceeded the configured error bound."""


class GridMismatchError(VibronicTpaError):
    """Two sampled functions do not share a quadrature grid."""
