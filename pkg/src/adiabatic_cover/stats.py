"""
Ensemble statistics: medians with distribution-free confidence limits,
quadratic run-time fits and success-probability histograms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.stats import binom

from .errors import InvalidParameterError, UnderdeterminedFitError

HISTOGRAM_BIN_WIDTH = 0.01


def sample_median(values: Sequence[float]) -> float:
    """Median, midpoint of the two central values for even counts."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    if x.size == 0:
        raise InvalidParameterError("samples", "at least one sample")
    mid = x.size // 2
    if x.size % 2:
        return float(x[mid])
    return float(0.5 * (x[mid - 1] + x[mid]))


def order_statistic_ranks(m: int, level: float = 0.95) -> tuple[int, int]:
    """
    1-based ranks (l, u) of the binomial order-statistic interval.

    l is the largest rank with P(B < l) <= (1 - level) / 2 for
    B ~ Binomial(m, 1/2), u = m + 1 - l. When no rank qualifies (tiny m)
    l = 1 and the interval spans the whole sample.
    """
    if m < 1:
        raise InvalidParameterError("samples", "at least one sample", m)
    if not 0.0 < level < 1.0:
        raise InvalidParameterError("level", "0 < level < 1", level)
    tail = (1.0 - level) / 2.0
    # P(B < l) = cdf(l - 1); cdf is increasing, so count qualifying ranks
    ranks = np.arange(1, m + 1)
    qualifying = ranks[binom.cdf(ranks - 1, m, 0.5) <= tail]
    lower = int(qualifying[-1]) if qualifying.size else 1
    return lower, m + 1 - lower


def median_with_ci(samples: Sequence[float], level: float = 0.95) -> tuple[float, float, float]:
    """
    Sample median and its distribution-free confidence interval.

    Args:
        samples: At least two values
        level: Confidence level (default 0.95)

    Returns:
        (median, lower, upper); the endpoints are sample values
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size < 2:
        raise InvalidParameterError("samples", "at least two samples", int(x.size))
    lower, upper = order_statistic_ranks(int(x.size), level)
    return sample_median(x), float(x[lower - 1]), float(x[upper - 1])


def ci_coverage(m: int, level: float = 0.95) -> float:
    """Exact coverage probability of the interval built for m samples."""
    lower, _ = order_statistic_ranks(m, level)
    return float(1.0 - 2.0 * binom.cdf(lower - 1, m, 0.5))


@dataclass(frozen=True)
class QuadraticFit:
    """
    Least-squares fit T(n) = a0 + a1 n + a2 n^2.

    Attributes:
        coefficients: (a0, a1, a2)
        points: Fitted (n, T) pairs
        residuals: T - T(n) at each point
    """

    coefficients: tuple[float, float, float]
    points: tuple[tuple[float, float], ...] = ()
    residuals: tuple[float, ...] = ()

    def __call__(self, n: float) -> float:
        a0, a1, a2 = self.coefficients
        return float(a0 + a1 * n + a2 * n * n)

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": list(self.coefficients),
            "points": [list(p) for p in self.points],
            "residuals": list(self.residuals),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> QuadraticFit:
        coefficients = data.get("coefficients")
        if not isinstance(coefficients, list) or len(coefficients) != 3:
            raise InvalidParameterError("fit", "'coefficients' must be [a0, a1, a2]", coefficients)
        return cls(
            coefficients=tuple(float(c) for c in coefficients),
            points=tuple((float(n), float(t)) for n, t in data.get("points", [])),
            residuals=tuple(float(r) for r in data.get("residuals", [])),
        )


def fit_quadratic(points: Sequence[tuple[float, float]]) -> QuadraticFit:
    """
    Unweighted least-squares quadratic through (n, T) points.

    Raises:
        UnderdeterminedFitError: fewer than 3 distinct n values
    """
    data = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if np.unique(data[:, 0]).size < 3:
        raise UnderdeterminedFitError(
            f"a quadratic fit needs at least 3 distinct n values, got {np.unique(data[:, 0]).size}"
        )
    n, t = data[:, 0], data[:, 1]
    coefficients = P.polyfit(n, t, 2)
    residuals = t - P.polyval(n, coefficients)
    return QuadraticFit(
        coefficients=tuple(float(c) for c in coefficients),
        points=tuple((float(a), float(b)) for a, b in data),
        residuals=tuple(float(r) for r in residuals),
    )


def success_histogram(probabilities: Sequence[float], bin_width: float = HISTOGRAM_BIN_WIDTH) -> list[int]:
    """Counts of probabilities in bins of bin_width covering [0, 1]."""
    if not 0.0 < bin_width <= 1.0:
        raise InvalidParameterError("bin_width", "0 < bin_width <= 1", bin_width)
    bins = int(round(1.0 / bin_width))
    counts, _ = np.histogram(np.asarray(probabilities, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    return [int(c) for c in counts]


def low_tail(values: Sequence[float]) -> dict[str, float | None]:
    """Median, tenth-lowest and lowest of a set of probabilities."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    if x.size == 0:
        return {"median": None, "tenth_lowest": None, "lowest": None}
    return {
        "median": sample_median(x),
        "tenth_lowest": float(x[9]) if x.size >= 10 else None,
        "lowest": float(x[0]),
    }
