"""
Hamiltonians of the adiabatic Exact Cover algorithm.

H(s) = (1 - s) H_B + s H_P with s = t / T, where
- H_P is diagonal: H_P|z> = h(z)|z>, h the violation count
- H_B = sum_i d_i (1 - sigma_x^(i)) / 2, d_i the number of clauses on bit i

H_B has ground energy exactly 0 with the uniform superposition as ground
state. The operator is applied matrix-free on 2^n amplitudes; explicit
matrices exist only as small-n verification oracles.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import CapacityError, InvalidParameterError, InvalidStateError
from .instance import MAX_BITS, ExactCoverInstance, cost_table

logger = logging.getLogger("adiabatic-cover")

# Largest n for which explicit 2^n x 2^n matrices are built
MAX_DENSE_BITS = 10

InterpolationPoint = float


def interpolation_point(t: float, total_time: float) -> InterpolationPoint:
    """Schedule parameter s = t / T, validated to lie in [0, 1]."""
    if not total_time > 0:
        raise InvalidParameterError("T", "T > 0", total_time)
    return check_s(t / total_time)


def check_s(s: float) -> InterpolationPoint:
    if not 0.0 <= s <= 1.0:
        raise InvalidParameterError("s", "0 <= s <= 1", s)
    return float(s)


@dataclass(frozen=True, eq=False)
class HamiltonianData:
    """
    Precomputed pieces of H(s) for one instance.

    Attributes:
        n: Bit count
        cost: int32 table of length 2^n, cost[z] = h(z)
        field_strengths: int64 table of length n, d_i
    """

    n: int
    cost: np.ndarray
    field_strengths: np.ndarray

    def __post_init__(self):
        if self.cost.shape != (1 << self.n,) or self.field_strengths.shape != (self.n,):
            raise InvalidStateError(f"tables do not match n={self.n}")
        self.cost.setflags(write=False)
        self.field_strengths.setflags(write=False)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def total_field(self) -> int:
        """Sum of d_i; also the largest eigenvalue of H_B."""
        return int(self.field_strengths.sum())


def build(inst: ExactCoverInstance) -> HamiltonianData:
    """Cost table and field strengths for an instance."""
    if inst.n > MAX_BITS:
        raise CapacityError(inst.n, MAX_BITS, "hamiltonian.build")
    return HamiltonianData(
        n=inst.n,
        cost=cost_table(inst),
        field_strengths=inst.field_strengths(),
    )


def _apply(hd: HamiltonianData, s: float, psi: np.ndarray) -> np.ndarray:
    """H(s) psi without validation; returns a new array."""
    out = (s * hd.cost + 0.5 * (1.0 - s) * hd.total_field) * psi
    if s < 1.0:
        half = 0.5 * (1.0 - s)
        for i, d in enumerate(hd.field_strengths):
            if d == 0:
                continue
            # Axis 1 of this view is bit i; reversing it flips the bit
            src = psi.reshape(-1, 2, 1 << i)
            dst = out.reshape(-1, 2, 1 << i)
            dst -= (half * d) * src[:, ::-1, :]
    return out


def apply_h_of_t(hd: HamiltonianData, s: InterpolationPoint, psi: np.ndarray) -> np.ndarray:
    """
    Apply the interpolated Hamiltonian to a state, matrix-free.

    output[z] = s cost[z] psi[z] + (1 - s) sum_i (d_i / 2) (psi[z] - psi[z ^ 2^i])

    Args:
        hd: Hamiltonian tables
        s: Schedule parameter in [0, 1]
        psi: Complex amplitudes, length 2^n

    Returns:
        New array H(s) psi

    Raises:
        InvalidStateError: psi has the wrong dimension
    """
    s = check_s(s)
    psi = np.asarray(psi)
    if psi.shape != (hd.dim,):
        raise InvalidStateError(f"state has shape {psi.shape}, expected ({hd.dim},)")
    return _apply(hd, s, psi.astype(np.complex128, copy=False))


def spectral_radius_bound(hd: HamiltonianData) -> float:
    """Upper bound on the largest eigenvalue of H(s) over all s."""
    return float(max(int(hd.cost.max()), hd.total_field))


# ==================== Dense oracles (small n) ====================


def _check_dense(hd: HamiltonianData) -> None:
    if hd.n > MAX_DENSE_BITS:
        raise CapacityError(hd.n, MAX_DENSE_BITS, "dense Hamiltonian")


def dense_matrix(hd: HamiltonianData, s: InterpolationPoint) -> np.ndarray:
    """
    Explicit real symmetric matrix of H(s).

    Only for verification; n is capped at MAX_DENSE_BITS.
    """
    _check_dense(hd)
    s = check_s(s)
    diagonal = s * hd.cost + 0.5 * (1.0 - s) * hd.total_field
    h = np.diag(diagonal.astype(np.float64))
    idx = np.arange(hd.dim)
    for i, d in enumerate(hd.field_strengths):
        if d:
            h[idx, idx ^ (1 << i)] -= 0.5 * (1.0 - s) * d
    return h


def low_spectrum(hd: HamiltonianData, s: InterpolationPoint, k: int) -> tuple[np.ndarray, np.ndarray]:
    """
    The k lowest eigenpairs of H(s).

    Returns:
        (energies ascending, eigenvectors as columns)
    """
    _check_dense(hd)
    if not 1 <= k <= hd.dim:
        raise InvalidParameterError("k", f"1 <= k <= {hd.dim}", k)
    energies, states = eigh(dense_matrix(hd, s), subset_by_index=[0, k - 1])
    return energies, states


@dataclass(frozen=True, eq=False)
class GapProfile:
    """Two lowest levels of H(s) along the schedule."""

    s_values: np.ndarray
    ground: np.ndarray
    first_excited: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        return self.first_excited - self.ground

    @property
    def s_min(self) -> float:
        return float(self.s_values[int(np.argmin(self.gaps))])

    @property
    def g_min(self) -> float:
        return float(self.gaps.min())


def gap_scan(hd: HamiltonianData, num_points: int = 101) -> GapProfile:
    """
    Scan the ground/first-excited gap on a uniform s-grid.

    Degenerate final ground spaces show up as a gap closing at s = 1.
    """
    _check_dense(hd)
    if num_points < 2:
        raise InvalidParameterError("num_points", "num_points >= 2", num_points)
    s_values = np.linspace(0.0, 1.0, num_points)
    h0 = dense_matrix(hd, 0.0)
    h1 = dense_matrix(hd, 1.0)
    levels = np.empty((num_points, 2))
    for row, s in enumerate(s_values):
        levels[row] = eigh((1.0 - s) * h0 + s * h1, eigvals_only=True, subset_by_index=[0, 1])
    profile = GapProfile(s_values, levels[:, 0], levels[:, 1])
    logger.debug("gap scan n=%s: g_min=%.4g at s=%.3f", hd.n, profile.g_min, profile.s_min)
    return profile
