"""
Exception hierarchy for adiabatic-cover.

Every error carries the exit code the command line maps it to:
- 2: invalid input (instances, parameters, states, files)
- 3: numerical accuracy or search failure
- 4: instance generation failure
"""
from __future__ import annotations

from typing import Any


class AdiabaticCoverError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInstanceError(AdiabaticCoverError, ValueError):
    """Malformed clause, instance or instance file."""

    exit_code = 2


class InvalidParameterError(AdiabaticCoverError, ValueError):
    """A numeric parameter or flag violates its constraint."""

    exit_code = 2

    def __init__(self, flag: str, constraint: str, value: Any = None):
        self.flag = flag
        self.constraint = constraint
        self.value = value
        detail = f" (got {value!r})" if value is not None else ""
        super().__init__(f"{flag}: must satisfy {constraint}{detail}")


class InvalidStateError(AdiabaticCoverError, ValueError):
    """State vector or target set does not fit the Hamiltonian."""

    exit_code = 2


class CapacityError(AdiabaticCoverError):
    """Requested bit count exceeds what the operation supports."""

    exit_code = 2

    def __init__(self, n: int, limit: int, what: str):
        self.n = n
        self.limit = limit
        super().__init__(f"{what} supports at most {limit} bits, got n={n}")


class UnderdeterminedFitError(AdiabaticCoverError, ValueError):
    """Too few distinct abscissae for a quadratic fit."""

    exit_code = 2


class IntegrationAccuracyError(AdiabaticCoverError):
    """Norm drift of an evolution exceeded the configured tolerance."""

    exit_code = 3

    def __init__(self, drift: float, tolerance: float, stats: dict[str, Any] | None = None):
        self.drift = drift
        self.tolerance = tolerance
        self.stats = stats or {}
        # (T, p) pairs completed before the failure when raised during a run-time search
        self.probes: list[tuple[float, float]] = []
        steps = self.stats.get("steps")
        dt = self.stats.get("dt")
        super().__init__(
            f"norm drift {drift:.3e} exceeds tolerance {tolerance:.1e} "
            f"(steps={steps}, dt={dt})"
        )


class SearchFailedError(AdiabaticCoverError):
    """Run-time search could not reach the probability band."""

    exit_code = 3

    def __init__(self, message: str, probes: list[tuple[float, float]]):
        self.probes = list(probes)
        super().__init__(f"{message}; probes={self.probes}")


class GenerationError(AdiabaticCoverError):
    """Random instance generation gave up after its retry limit."""

    exit_code = 4
