"""
Schrodinger evolution under the interpolated Hamiltonian and its readout.

Integrates i dpsi/dt = H(t/T) psi from the uniform superposition:
- fixed step: classical 4th-order Runge-Kutta on a uniform grid
- adaptive: SciPy's 8th-order Dormand-Prince (DOP853) with local error control

The state is never renormalized; norm drift at t = T is the accuracy
diagnostic and a drift beyond tolerance raises IntegrationAccuracyError.
Measurement is not sampled: success probabilities are read off amplitudes.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import CapacityError, IntegrationAccuracyError, InvalidParameterError, InvalidStateError
from .hamiltonian import MAX_DENSE_BITS, HamiltonianData, _apply, dense_matrix
from .instance import MAX_BITS

logger = logging.getLogger("adiabatic-cover")

# Upper cap on the default fixed step
MAX_STEP = 0.01
DEFAULT_NORM_TOLERANCE = 1e-6
DEFAULT_ORACLE_TOLERANCE = 1e-6
# Gauss-Legendre nodes and weights of the 4th-order commutator-free exponential
_GL_NODES = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)
_CF_EARLY = (3 + 2 * math.sqrt(3)) / 12
_CF_LATE = (3 - 2 * math.sqrt(3)) / 12


@dataclass(frozen=True)
class StepControl:
    """
    How the integrator picks its steps.

    Attributes:
        kind: "fixed" (RK4 on a uniform grid) or "adaptive" (DOP853)
        dt: Fixed step size; None uses default_step
        refinement: Halvings applied to default_step when dt is None
        max_halvings: Halvings calibrate_step may try
        rtol, atol: Local error targets of the adaptive method
    """

    kind: Literal["fixed", "adaptive"] = "fixed"
    dt: float | None = None
    refinement: int = 0
    max_halvings: int = 8
    rtol: float = 1e-10
    atol: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("fixed", "adaptive"):
            raise InvalidParameterError("step_control", "'fixed' or 'adaptive'", self.kind)
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParameterError("dt", "dt > 0", self.dt)
        if self.refinement < 0:
            raise InvalidParameterError("refinement", "refinement >= 0", self.refinement)
        if self.max_halvings < 0:
            raise InvalidParameterError("max_halvings", "max_halvings >= 0", self.max_halvings)
        if not (self.rtol > 0 and self.atol > 0):
            raise InvalidParameterError("rtol/atol", "positive tolerances", (self.rtol, self.atol))


@dataclass(frozen=True)
class EvolutionConfig:
    """
    Run time and accuracy contract of one evolution.

    Attributes:
        total_time: Run time T (dimensionless, hbar = 1)
        step_control: Integrator step policy
        norm_tolerance: Largest accepted | ||psi(T)|| - 1 |
        oracle_tolerance: Largest accepted deviation from a reference propagator
    """

    total_time: float
    step_control: StepControl = field(default_factory=StepControl)
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE
    oracle_tolerance: float = DEFAULT_ORACLE_TOLERANCE

    def __post_init__(self):
        if not (math.isfinite(self.total_time) and self.total_time >= 0):
            raise InvalidParameterError("T", "finite T >= 0", self.total_time)
        if not self.norm_tolerance > 0:
            raise InvalidParameterError("norm_tolerance", "> 0", self.norm_tolerance)
        if not self.oracle_tolerance > 0:
            raise InvalidParameterError("oracle_tolerance", "> 0", self.oracle_tolerance)

    def with_time(self, total_time: float) -> EvolutionConfig:
        return replace(self, total_time=float(total_time))

    def with_step(self, dt: float) -> EvolutionConfig:
        return replace(self, step_control=replace(self.step_control, dt=dt))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EvolutionStats:
    """Integrator bookkeeping for one run."""

    method: str
    steps: int
    evaluations: int
    dt: float | None
    drift: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Amplitudes over the 2^n assignments, index z <-> assignment z.

    The amplitude array is read-only.
    """

    n: int
    amplitudes: np.ndarray
    stats: EvolutionStats | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise InvalidStateError(f"state has shape {amps.shape}, expected ({1 << self.n},)")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def initial_state(n: int) -> StateVector:
    """Uniform superposition, every amplitude 2^(-n/2)."""
    if n < 1:
        raise InvalidParameterError("n", "n >= 1", n)
    if n > MAX_BITS:
        raise CapacityError(n, MAX_BITS, "initial_state")
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def default_step(hd: HamiltonianData) -> float:
    """dt = min(0.01, 1 / (4 E_max)), E_max = max cost + max d_i."""
    e_max = int(hd.cost.max()) + int(hd.field_strengths.max(initial=0))
    if e_max == 0:
        return MAX_STEP
    return min(MAX_STEP, 1.0 / (4.0 * e_max))


def fixed_step(hd: HamiltonianData, control: StepControl) -> float:
    """The RK4 step used for this instance under a step policy."""
    if control.dt is not None:
        return control.dt
    return default_step(hd) / (1 << control.refinement)


# ==================== Integrators ====================


def _start(hd: HamiltonianData, psi0: np.ndarray | None) -> np.ndarray:
    if psi0 is None:
        return initial_state(hd.n).amplitudes.copy()
    return np.array(psi0, dtype=np.complex128)


def _rk4(
    hd: HamiltonianData, total_time: float, dt: float, psi0: np.ndarray | None = None,
) -> tuple[np.ndarray, EvolutionStats]:
    steps = max(1, math.ceil(total_time / dt - 1e-12))
    h = total_time / steps
    psi = _start(hd, psi0)
    start_norm = float(np.linalg.norm(psi))
    for m in range(steps):
        s0, s_mid, s1 = m / steps, (m + 0.5) / steps, (m + 1) / steps
        k1 = _apply(hd, s0, psi)
        k2 = _apply(hd, s_mid, psi - 0.5j * h * k1)
        k3 = _apply(hd, s_mid, psi - 0.5j * h * k2)
        k4 = _apply(hd, s1, psi - 1j * h * k3)
        psi = psi - (1j * h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    drift = abs(float(np.linalg.norm(psi)) - start_norm)
    return psi, EvolutionStats("rk4", steps, 4 * steps, h, drift)


def _dop853(
    hd: HamiltonianData, total_time: float, control: StepControl, psi0: np.ndarray | None = None,
) -> tuple[np.ndarray, EvolutionStats]:
    y0 = _start(hd, psi0)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return -1j * _apply(hd, min(t / total_time, 1.0), y)

    sol = solve_ivp(
        rhs,
        (0.0, total_time),
        y0,
        method="DOP853",
        rtol=control.rtol,
        atol=control.atol,
    )
    psi = sol.y[:, -1]
    drift = abs(float(np.linalg.norm(psi)) - float(np.linalg.norm(y0)))
    stats = EvolutionStats("dop853", len(sol.t) - 1, int(sol.nfev), None, drift)
    if not sol.success:
        raise IntegrationAccuracyError(drift, control.rtol, {**stats.to_dict(), "message": sol.message})
    return psi, stats


def _integrate(
    hd: HamiltonianData, cfg: EvolutionConfig, psi0: np.ndarray | None = None,
) -> tuple[np.ndarray, EvolutionStats]:
    control = cfg.step_control
    if control.kind == "adaptive":
        return _dop853(hd, cfg.total_time, control, psi0)
    return _rk4(hd, cfg.total_time, fixed_step(hd, control), psi0)


def evolve(hd: HamiltonianData, cfg: EvolutionConfig, initial: StateVector | None = None) -> StateVector:
    """
    Evolve a state to time T under H(t/T).

    Args:
        hd: Hamiltonian tables of the instance
        cfg: Run time and accuracy contract
        initial: State at t = 0 (default: the uniform superposition).
            Drift is measured against its norm.

    Returns:
        psi(T), with integrator statistics attached

    Raises:
        IntegrationAccuracyError: final norm drift exceeds cfg.norm_tolerance
        InvalidStateError: initial is on a different number of bits
    """
    if hd.n > MAX_BITS:
        raise CapacityError(hd.n, MAX_BITS, "evolve")
    if initial is not None and initial.n != hd.n:
        raise InvalidStateError(f"initial state has n={initial.n}, Hamiltonian has n={hd.n}")
    if cfg.total_time == 0:
        start = initial if initial is not None else initial_state(hd.n)
        return replace(start, stats=EvolutionStats(cfg.step_control.kind, 0, 0, None, 0.0))

    psi, stats = _integrate(hd, cfg, None if initial is None else initial.amplitudes)
    logger.debug(
        "evolve n=%s T=%s: %s steps (%s), drift %.2e",
        hd.n, cfg.total_time, stats.steps, stats.method, stats.drift,
    )
    if not stats.drift <= cfg.norm_tolerance:
        raise IntegrationAccuracyError(stats.drift, cfg.norm_tolerance, stats.to_dict())
    return StateVector(hd.n, psi, stats)


def calibrate_step(hd: HamiltonianData, cfg: EvolutionConfig) -> EvolutionConfig:
    """
    Convergence self-check for the fixed-step integrator.

    Starting from the configured step, runs at dt and dt/2 and halves dt
    until the two final states agree within oracle_tolerance and both
    drifts are within norm_tolerance. The step-doubling difference is
    scaled by 16/15, the 4th-order estimate of the coarse run's error.

    Returns:
        cfg with the accepted step recorded: a pinned dt when one was
        configured, otherwise a refinement of default_step so the result
        carries over to instances with other energy scales. Adaptive
        configs are returned as is.

    Raises:
        IntegrationAccuracyError: no accepted dt within max_halvings
    """
    control = cfg.step_control
    if control.kind != "fixed" or cfg.total_time == 0:
        return cfg

    dt = fixed_step(hd, control)
    coarse, coarse_stats = _rk4(hd, cfg.total_time, dt)
    for halving in range(control.max_halvings + 1):
        fine, fine_stats = _rk4(hd, cfg.total_time, dt / 2)
        error = 16.0 / 15.0 * float(np.linalg.norm(coarse - fine))
        drift = max(coarse_stats.drift, fine_stats.drift)
        logger.debug("calibrate dt=%.3g: error %.2e, drift %.2e", dt, error, drift)
        if error <= cfg.oracle_tolerance and drift <= cfg.norm_tolerance:
            logger.info("Calibrated step dt=%.4g after %s halvings (T=%s)", dt, halving, cfg.total_time)
            if control.dt is not None:
                return cfg.with_step(dt)
            return replace(cfg, step_control=replace(control, refinement=control.refinement + halving))
        dt /= 2
        coarse, coarse_stats = fine, fine_stats

    raise IntegrationAccuracyError(
        drift, cfg.norm_tolerance,
        {"steps": coarse_stats.steps, "dt": dt * 2, "difference": error, "halvings": control.max_halvings},
    )


def dense_propagate(hd: HamiltonianData, total_time: float, steps: int | None = None) -> StateVector:
    """
    Reference propagation with explicit matrix exponentials.

    Each step applies two exponentials of H at the Gauss-Legendre nodes
    (4th-order commutator-free scheme); for H linear in t this converges
    far faster than the error budgets it checks. Small n only.

    Args:
        hd: Hamiltonian tables (n <= MAX_DENSE_BITS)
        total_time: Run time T
        steps: Number of steps (default: max(1000, ceil(200 T)))
    """
    if hd.n > MAX_DENSE_BITS:
        raise CapacityError(hd.n, MAX_DENSE_BITS, "dense_propagate")
    if not total_time >= 0:
        raise InvalidParameterError("T", "T >= 0", total_time)
    psi = initial_state(hd.n).amplitudes.copy()
    if total_time == 0:
        return StateVector(hd.n, psi)

    steps = steps or max(1000, math.ceil(200 * total_time))
    h = total_time / steps
    h_start = dense_matrix(hd, 0.0)
    h_end = dense_matrix(hd, 1.0)

    def h_at(s: float) -> np.ndarray:
        return (1.0 - s) * h_start + s * h_end

    for m in range(steps):
        early = h_at((m + _GL_NODES[0]) / steps)
        late = h_at((m + _GL_NODES[1]) / steps)
        psi = expm(-1j * h * (_CF_EARLY * early + _CF_LATE * late)) @ psi
        psi = expm(-1j * h * (_CF_LATE * early + _CF_EARLY * late)) @ psi
    return StateVector(hd.n, psi)


# ==================== Readout ====================


def success_probability(psi: StateVector, targets: Iterable[int] | np.ndarray) -> float:
    """
    Probability that measuring psi yields one of the target assignments.

    Args:
        psi: Final state
        targets: Satisfying (or minimal-violation) assignments

    Returns:
        Sum of |amplitude|^2 over the targets, clipped to [0, 1]

    Raises:
        InvalidStateError: empty target set or index outside [0, 2^n)
    """
    if not isinstance(targets, np.ndarray):
        targets = list(targets)
    idx = np.unique(np.asarray(targets, dtype=np.int64))
    if idx.size == 0:
        raise InvalidStateError("target set is empty")
    if idx[0] < 0 or idx[-1] >= (1 << psi.n):
        raise InvalidStateError(f"target index outside [0, {1 << psi.n})")
    p = float(np.sum(np.abs(psi.amplitudes[idx]) ** 2))
    return min(max(p, 0.0), 1.0)


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("p", "0 <= p <= 1", p)


def amplified_success(p: float, k: int) -> float:
    """Success probability of k independent repetitions, 1 - (1 - p)^k."""
    _check_probability(p)
    if k < 1:
        raise InvalidParameterError("k", "k >= 1", k)
    return 1.0 - (1.0 - p) ** k


def expected_repetitions(p: float) -> float:
    """Expected runs until the target is first observed."""
    _check_probability(p)
    return math.inf if p == 0 else 1.0 / p


def repetitions_for(p: float, target: float) -> int:
    """Smallest k with amplified_success(p, k) >= target."""
    _check_probability(p)
    if not 0.0 < target < 1.0:
        raise InvalidParameterError("target", "0 < target < 1", target)
    if p == 0:
        raise InvalidParameterError("p", "p > 0 to reach a positive target", p)
    if p == 1 or p >= target:
        return 1
    k = max(1, math.ceil(math.log1p(-target) / math.log1p(-p)))
    while amplified_success(p, k) < target:
        k += 1
    while k > 1 and amplified_success(p, k - 1) >= target:
        k -= 1
    return k


# ==================== State dumps ====================


def dump_state(psi: StateVector, path: str | Path) -> Path:
    """Write amplitudes as a JSON list of [re, im] pairs in index order."""
    if psi.n > MAX_DENSE_BITS:
        raise CapacityError(psi.n, MAX_DENSE_BITS, "dump_state")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pairs = [[float(a.real), float(a.imag)] for a in psi.amplitudes]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(pairs, f)
        f.write("\n")
    return path


def load_state(path: str | Path) -> StateVector:
    """Read a state dump written by dump_state."""
    with open(path, encoding="utf-8") as f:
        try:
            pairs = json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise InvalidStateError(f"{path}: not valid UTF-8 JSON ({exc})") from None
    size = len(pairs)
    if size < 2 or size & (size - 1):
        raise InvalidStateError(f"{path}: {size} amplitudes is not a power of two")
    amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return StateVector(size.bit_length() - 1, amps)
