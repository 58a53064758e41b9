from typing import Final, Literal

EXIT_SUCCESS: Final[int] = 0
EXIT_CONFIG_ERROR: Final[int] = 2
EXIT_HYPOTHESIS_VIOLATION: Final[int] = 3
EXIT_NUMERICAL_FAILURE: Final[int] = 4

Subsystem = Literal[
    "prox",
    "nutrient",
    "pressure",
    "cahn_hilliard_p",
    "cahn_hilliard_d",
    "smoothing",
    "transport",
    "linear_solve",
]


class TumorPhasefieldError(Exception):
    """Base class for all library errors. Carries the CLI exit code."""

    exit_code: int = EXIT_NUMERICAL_FAILURE


class ConfigurationError(TumorPhasefieldError):
    """Raised for invalid configurations and initial data."""

    exit_code = EXIT_CONFIG_ERROR


class RegionError(ConfigurationError):
    """Raised when an admissible region is not contained in the open simplex."""


class HypothesisViolation(TumorPhasefieldError):
    """Raised when the source model fails the inward-pointing check."""

    exit_code = EXIT_HYPOTHESIS_VIOLATION


class NumericalFailure(TumorPhasefieldError):
    """Raised when a solver fails. `subsystem` names the failing part of the step."""

    exit_code = EXIT_NUMERICAL_FAILURE

    def __init__(self, subsystem: Subsystem, message: str) -> None:
        super().__init__(f"[{subsystem}] {message}")
        self.subsystem: Subsystem = subsystem


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""
