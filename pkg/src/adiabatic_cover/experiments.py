"""
Experiment harness for adiabatic Exact Cover ensembles.

Features:
- Run-time search: double T until the success probability reaches the band,
  then bisect until it lands inside [p_lo, p_hi]
- Median-time sweep over GUSA ensembles with distribution-free confidence limits
- Fixed-T sweep of fresh instances at T = fit(n), with optional histograms
- Clause-count sweep split into satisfiable / unsatisfiable categories
- Phase-transition scan of unsatisfiable and unique-assignment fractions

Every instance gets its own seed derived from (master seed, stream, keys),
so results do not depend on worker count or execution order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import (
    GenerationError,
    IntegrationAccuracyError,
    InvalidParameterError,
    SearchFailedError,
)
from .evolution import EvolutionConfig, calibrate_step, evolve, success_probability
from .hamiltonian import HamiltonianData, build
from .instance import (
    GUSA_MAX_RESTARTS,
    ExactCoverInstance,
    free_bits,
    generate_fixed_clauses,
    generate_gusa,
    minimal_violation_set,
)
from .runtime import worker_pool
from .stats import QuadraticFit, fit_quadratic, low_tail, median_with_ci, success_histogram

logger = logging.getLogger("adiabatic-cover")

# ==================== Constants ====================

BAND_LO = 0.12
BAND_HI = 0.13
T_START = 1.0
T_MAX = float(2**20)
MAX_BISECTIONS = 60
# Success probabilities at or below this count as "very unlikely" misses
LOW_PROBABILITY = 0.04
# Clause-sweep generation attempts per requested instance
ATTEMPTS_PER_INSTANCE = 20

# Seed streams keep the ensembles of different sweeps disjoint
STREAM_MEDIAN_TIME = 1
STREAM_FIXED_T = 2
STREAM_CLAUSES = 3
STREAM_PHASE = 4

# Record flags
FLAG_ACCURACY = "integration-accuracy"
FLAG_SEARCH_FAILED = "search-failed"
FLAG_STALLED = "bisection-stalled"
FLAG_GENERATION = "generation-failed"

SATISFIABLE = "satisfiable"
UNSATISFIABLE = "unsatisfiable"

TaskT = TypeVar("TaskT")
ResultT = TypeVar("ResultT")


def derive_seed(master_seed: int, *keys: int) -> int:
    """32-bit seed for one instance, a pure function of the master seed and keys."""
    if master_seed < 0:
        raise InvalidParameterError("seed", "seed >= 0", master_seed)
    state = np.random.SeedSequence([master_seed, *keys]).generate_state(1)
    return int(state[0])


def success_targets(inst: ExactCoverInstance) -> tuple[np.ndarray, int]:
    """
    Assignments that count as success, with the violation count they attain.

    Satisfiable instances: the satisfying set (min violations 0).
    Unsatisfiable instances: every assignment of minimal violation count.
    """
    min_violations, targets = minimal_violation_set(inst)
    return targets, min_violations


def probability_at(inst: ExactCoverInstance, total_time: float, cfg: EvolutionConfig | None = None) -> float:
    """Success probability of one full evolution of inst at run time T."""
    cfg = (cfg or EvolutionConfig(total_time=total_time)).with_time(total_time)
    targets, _ = success_targets(inst)
    return success_probability(evolve(build(inst), cfg), targets)


# ==================== Run-time search ====================


@dataclass(frozen=True)
class BandSearch:
    """
    Outcome of a run-time search.

    Attributes:
        total_time: Accepted T
        probability: Success probability at that T
        probes: Every (T, p) evaluated, in evaluation order
        flag: "" when p is in band, else "bisection-stalled"
    """

    total_time: float
    probability: float
    probes: tuple[tuple[float, float], ...]
    flag: str = ""

    @property
    def in_band(self) -> bool:
        return self.flag == ""


def _check_band(p_lo: float, p_hi: float) -> None:
    if not 0.0 < p_lo <= p_hi < 1.0:
        raise InvalidParameterError("band", "0 < band-lo <= band-hi < 1", (p_lo, p_hi))


def _search_band(
    hd: HamiltonianData,
    targets: np.ndarray,
    cfg: EvolutionConfig,
    p_lo: float,
    p_hi: float,
    t_start: float,
    t_max: float,
    max_bisections: int,
) -> BandSearch:
    probes: list[tuple[float, float]] = []

    def probe(t: float) -> float:
        try:
            psi = evolve(hd, cfg.with_time(t))
        except IntegrationAccuracyError as exc:
            exc.probes = list(probes)
            raise
        p = success_probability(psi, targets)
        probes.append((t, p))
        logger.debug("probe T=%s: p=%.6f", t, p)
        return p

    def done(t: float, p: float, flag: str = "") -> BandSearch:
        return BandSearch(t, p, tuple(probes), flag)

    t = t_start
    p = probe(t)
    if p_lo <= p <= p_hi:
        return done(t, p)

    t_prev = 0.0
    while p < p_lo:
        t_prev, t = t, 2.0 * t
        if t > t_max:
            raise SearchFailedError(f"success probability stayed below {p_lo} up to T={t_prev}", probes)
        p = probe(t)
        if p_lo <= p <= p_hi:
            return done(t, p)

    # p(hi) > p_hi here; p(lo) < p_lo unless lo is 0 and never probed
    first_above = (t, p)
    lo, hi = t_prev, t
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        p = probe(mid)
        if p_lo <= p <= p_hi:
            return done(mid, p)
        if p < p_lo:
            lo = mid
        else:
            hi = mid

    logger.warning("Bisection stalled after %s steps; keeping T=%s", max_bisections, first_above[0])
    return done(*first_above, flag=FLAG_STALLED)


def find_time_for_band(
    inst: ExactCoverInstance,
    p_lo: float = BAND_LO,
    p_hi: float = BAND_HI,
    cfg: EvolutionConfig | None = None,
    t_start: float = T_START,
    t_max: float = T_MAX,
    max_bisections: int = MAX_BISECTIONS,
) -> BandSearch:
    """
    Find a run time whose success probability lies in [p_lo, p_hi].

    Starts at T = t_start and doubles until p(T) >= p_lo, then bisects the
    last doubling interval, accepting the first probe inside the band.

    Args:
        inst: Instance with at least one target assignment
        p_lo, p_hi: Probability band
        cfg: Step control and tolerances; its total_time is ignored
        t_start: First probed T
        t_max: Largest T doubling may reach
        max_bisections: Bisection budget before the search is flagged

    Returns:
        BandSearch; when bisection stalls, the first probe with p >= p_lo
        flagged "bisection-stalled"

    Raises:
        SearchFailedError: doubling passed t_max
        IntegrationAccuracyError: a probe exceeded the norm tolerance
    """
    _check_band(p_lo, p_hi)
    if not 0 < t_start <= t_max:
        raise InvalidParameterError("t-max", "0 < T start <= t-max", (t_start, t_max))
    if max_bisections < 0:
        raise InvalidParameterError("max_bisections", ">= 0", max_bisections)
    targets, _ = success_targets(inst)
    return _search_band(
        build(inst), targets, cfg or EvolutionConfig(total_time=t_start),
        p_lo, p_hi, t_start, t_max, max_bisections,
    )


# ==================== Records ====================


@dataclass(frozen=True)
class EnsembleRecord:
    """
    One instance of an ensemble and what was measured on it.

    run_time and success_probability are None when no measurement exists
    (classification-only scans, failed evolutions).

    probes holds every (T, p) the run-time search evaluated, sorted by T.
    Each T is evaluated once so the times are strictly increasing;
    BandSearch keeps the evaluation order.
    """

    index: int
    seed: int
    n: int
    clause_count: int
    satisfiable: bool
    num_satisfying: int
    min_violations: int
    free_bits: tuple[int, ...] = ()
    run_time: float | None = None
    success_probability: float | None = None
    probes: tuple[tuple[float, float], ...] = ()
    flag: str = ""
    category: str = ""

    def __post_init__(self):
        object.__setattr__(self, "probes", tuple(sorted(tuple(p) for p in self.probes)))

    @property
    def measured(self) -> bool:
        return self.success_probability is not None

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["free_bits"] = list(self.free_bits)
        data["probes"] = [list(p) for p in self.probes]
        return data


def _classified(index: int, seed: int, inst: ExactCoverInstance, category: str = "") -> EnsembleRecord:
    min_violations, argmin = minimal_violation_set(inst)
    return EnsembleRecord(
        index=index,
        seed=seed,
        n=inst.n,
        clause_count=inst.num_clauses,
        satisfiable=min_violations == 0,
        num_satisfying=int(argmin.size) if min_violations == 0 else 0,
        min_violations=min_violations,
        free_bits=free_bits(inst),
        category=category,
    )


def _failed(index: int, seed: int, n: int, flag: str) -> EnsembleRecord:
    return EnsembleRecord(index, seed, n, 0, False, 0, 0, flag=flag)


def _measure(record: EnsembleRecord, inst: ExactCoverInstance, cfg: EvolutionConfig) -> EnsembleRecord:
    """Evolve at cfg.total_time and attach the success probability."""
    targets, _ = success_targets(inst)
    try:
        p = success_probability(evolve(build(inst), cfg), targets)
    except IntegrationAccuracyError as exc:
        logger.warning("Instance %s (seed %s) flagged: %s", record.index, record.seed, exc)
        return replace(record, run_time=cfg.total_time, flag=FLAG_ACCURACY)
    return replace(record, run_time=cfg.total_time, success_probability=p)


# ==================== Worker tasks ====================


@dataclass(frozen=True)
class _TimeTask:
    index: int
    seed: int
    n: int
    cfg: EvolutionConfig
    p_lo: float
    p_hi: float
    t_max: float
    max_restarts: int


@dataclass(frozen=True)
class _FixedTask:
    index: int
    seed: int
    n: int
    cfg: EvolutionConfig
    max_restarts: int


@dataclass(frozen=True)
class _EvolveTask:
    index: int
    seed: int
    inst: ExactCoverInstance
    category: str
    cfg: EvolutionConfig


@dataclass(frozen=True)
class _ClassifyTask:
    index: int
    seed: int
    n: int
    m: int


def _gusa(task: _TimeTask | _FixedTask) -> ExactCoverInstance | None:
    try:
        return generate_gusa(task.n, np.random.default_rng(task.seed), task.max_restarts)
    except GenerationError as exc:
        logger.warning("Instance %s (seed %s) flagged: %s", task.index, task.seed, exc)
        return None


def _run_time_task(task: _TimeTask) -> EnsembleRecord:
    inst = _gusa(task)
    if inst is None:
        return _failed(task.index, task.seed, task.n, FLAG_GENERATION)
    record = _classified(task.index, task.seed, inst)
    targets, _ = success_targets(inst)
    try:
        found = _search_band(
            build(inst), targets, task.cfg, task.p_lo, task.p_hi, T_START, task.t_max, MAX_BISECTIONS,
        )
    except SearchFailedError as exc:
        logger.warning("Instance %s (seed %s) flagged: search failed", task.index, task.seed)
        return replace(record, probes=tuple(exc.probes), flag=FLAG_SEARCH_FAILED)
    except IntegrationAccuracyError as exc:
        logger.warning("Instance %s (seed %s) flagged: %s", task.index, task.seed, exc)
        return replace(record, probes=tuple(exc.probes), flag=FLAG_ACCURACY)
    return replace(
        record,
        run_time=found.total_time,
        success_probability=found.probability,
        probes=found.probes,
        flag=found.flag,
    )


def _run_fixed_task(task: _FixedTask) -> EnsembleRecord:
    inst = _gusa(task)
    if inst is None:
        return _failed(task.index, task.seed, task.n, FLAG_GENERATION)
    return _measure(_classified(task.index, task.seed, inst), inst, task.cfg)


def _run_evolve_task(task: _EvolveTask) -> EnsembleRecord:
    return _measure(_classified(task.index, task.seed, task.inst, task.category), task.inst, task.cfg)


def _run_classify_task(task: _ClassifyTask) -> EnsembleRecord:
    inst = generate_fixed_clauses(task.n, task.m, np.random.default_rng(task.seed))
    return _classified(task.index, task.seed, inst)


def run_tasks(fn: Callable[[TaskT], ResultT], tasks: Sequence[TaskT], workers: int = 1) -> list[ResultT]:
    """Map fn over tasks serially or on a spawn process pool; order is preserved."""
    if workers < 1:
        raise InvalidParameterError("workers", "workers >= 1", workers)
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunksize = max(1, len(tasks) // (4 * workers))
    with worker_pool(workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))


def _sorted(records: Iterable[EnsembleRecord]) -> list[EnsembleRecord]:
    return sorted(records, key=lambda r: r.index)


# ==================== Sweeps ====================


@dataclass
class SweepResult:
    """
    Records and aggregate statistics of one sweep.

    Attributes:
        kind: "median-time", "fixed-T", "clauses" or "phase"
        master_seed: Seed every instance seed derives from
        config: Parameters that determine the output
        statistics: One row per n (or per clause count)
        records: Every instance, sorted by index
        fit: Quadratic fit of median times (median-time sweeps)
    """

    kind: str
    master_seed: int
    config: dict[str, Any]
    statistics: list[dict[str, Any]]
    records: list[EnsembleRecord] = field(default_factory=list)
    fit: QuadraticFit | None = None

    @property
    def flagged(self) -> list[EnsembleRecord]:
        return [r for r in self.records if r.flag]

    def summary(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "master_seed": self.master_seed,
            "config": self.config,
            "statistics": self.statistics,
            "fit": self.fit.to_dict() if self.fit else None,
            "records": [r.to_dict() for r in self.records],
        }


def _check_sizes(n_values: Sequence[int], count: int, what: str) -> None:
    if not n_values:
        raise InvalidParameterError("n", "at least one n")
    for n in n_values:
        if n < 3:
            raise InvalidParameterError("n", "n >= 3", n)
    if count < 1:
        raise InvalidParameterError("instances", f"{what} >= 1", count)


def _calibrated(
    inst: ExactCoverInstance | None, cfg: EvolutionConfig, total_time: float, calibrate: bool,
) -> EvolutionConfig:
    """Run the convergence self-check once on a representative instance."""
    if not calibrate or inst is None or cfg.step_control.kind != "fixed" or total_time <= 0:
        return cfg
    tuned = calibrate_step(build(inst), cfg.with_time(total_time))
    return tuned.with_time(cfg.total_time)


def _first_gusa(n: int, seed: int) -> ExactCoverInstance | None:
    try:
        return generate_gusa(n, np.random.default_rng(seed))
    except GenerationError:
        return None


def median_time_sweep(
    n_values: Sequence[int],
    instances_per_n: int = 75,
    master_seed: int = 0,
    cfg: EvolutionConfig | None = None,
    p_lo: float = BAND_LO,
    p_hi: float = BAND_HI,
    t_max: float = T_MAX,
    workers: int = 1,
    calibrate: bool = True,
    max_restarts: int = GUSA_MAX_RESTARTS,
) -> SweepResult:
    """
    Median run time to reach the probability band, per n.

    For each n, instances_per_n GUSA instances get a run-time search; the
    statistics rows hold the median T and its 95% confidence limits over
    records that produced a run time. A quadratic fit is attached when at
    least three n values have a median.

    The step is calibrated once, on the first instance of the largest n at
    the run time its own search finds.
    """
    _check_sizes(n_values, instances_per_n, "instances per n")
    _check_band(p_lo, p_hi)
    if not t_max >= T_START:
        raise InvalidParameterError("t-max", f"t-max >= {T_START}", t_max)
    cfg = cfg or EvolutionConfig(total_time=0.0)

    if calibrate and cfg.step_control.kind == "fixed":
        n_top = max(n_values)
        probe_inst = _first_gusa(n_top, derive_seed(master_seed, STREAM_MEDIAN_TIME, n_top, 0))
        if probe_inst is not None:
            try:
                t_rep = find_time_for_band(probe_inst, p_lo, p_hi, cfg, t_max=t_max).total_time
            except SearchFailedError:
                t_rep = T_START
            cfg = _calibrated(probe_inst, cfg, t_rep, True)

    logger.info("Median-time sweep: n=%s, %s instances each, seed %s", list(n_values), instances_per_n, master_seed)
    tasks = [
        _TimeTask(index, derive_seed(master_seed, STREAM_MEDIAN_TIME, n, k), n, cfg, p_lo, p_hi, t_max, max_restarts)
        for index, (n, k) in enumerate((n, k) for n in n_values for k in range(instances_per_n))
    ]
    records = _sorted(run_tasks(_run_time_task, tasks, workers))

    statistics = []
    points = []
    for n in n_values:
        group = [r for r in records if r.n == n]
        times = [r.run_time for r in group if r.run_time is not None and r.flag in ("", FLAG_STALLED)]
        row: dict[str, Any] = {
            "n": n,
            "count": len(group),
            "used": len(times),
            "flagged": sum(1 for r in group if r.flag),
            "median": None,
            "lower": None,
            "upper": None,
        }
        if len(times) >= 2:
            row["median"], row["lower"], row["upper"] = median_with_ci(times)
            points.append((n, row["median"]))
        else:
            logger.warning("n=%s: %s usable run times, no median reported", n, len(times))
        statistics.append(row)

    fit = fit_quadratic(points) if len({p[0] for p in points}) >= 3 else None
    config = {
        "n_values": list(n_values),
        "instances_per_n": instances_per_n,
        "band": [p_lo, p_hi],
        "t_max": t_max,
        "evolution": cfg.to_dict(),
    }
    logger.info("Median-time sweep finished: %s records, %s flagged", len(records), sum(1 for r in records if r.flag))
    return SweepResult("median-time", master_seed, config, statistics, records, fit)


def _check_fit(fit: QuadraticFit, n_values: Iterable[int]) -> None:
    for n in n_values:
        if not fit(n) > 0:
            raise InvalidParameterError("fit", f"T(n) > 0 for every swept n (T({n}) = {fit(n)})")


def fixed_time_sweep(
    n_values: Sequence[int],
    fit: QuadraticFit,
    instances_per_n: int = 100,
    master_seed: int = 0,
    cfg: EvolutionConfig | None = None,
    histogram: bool = False,
    workers: int = 1,
    calibrate: bool = True,
    max_restarts: int = GUSA_MAX_RESTARTS,
) -> SweepResult:
    """
    Success probabilities of fresh GUSA instances run at T = fit(n).

    Per n: median, tenth-lowest and lowest probability, plus the fraction at
    or below LOW_PROBABILITY and, in histogram mode, counts in 0.01 bins.
    """
    _check_sizes(n_values, instances_per_n, "instances per n")
    _check_fit(fit, n_values)
    cfg = cfg or EvolutionConfig(total_time=0.0)

    n_top = max(n_values)
    cfg = _calibrated(
        _first_gusa(n_top, derive_seed(master_seed, STREAM_FIXED_T, n_top, 0)) if calibrate else None,
        cfg, fit(n_top), calibrate,
    )

    logger.info("Fixed-T sweep: n=%s, %s instances each, seed %s", list(n_values), instances_per_n, master_seed)
    tasks = [
        _FixedTask(index, derive_seed(master_seed, STREAM_FIXED_T, n, k), n, cfg.with_time(fit(n)), max_restarts)
        for index, (n, k) in enumerate((n, k) for n in n_values for k in range(instances_per_n))
    ]
    records = _sorted(run_tasks(_run_fixed_task, tasks, workers))

    statistics = []
    for n in n_values:
        group = [r for r in records if r.n == n]
        probs = [r.success_probability for r in group if r.measured]
        row: dict[str, Any] = {
            "n": n,
            "T": fit(n),
            "count": len(group),
            "flagged": sum(1 for r in group if r.flag),
            **low_tail(probs),
            "fraction_at_or_below_low": (
                sum(1 for p in probs if p <= LOW_PROBABILITY) / len(probs) if probs else None
            ),
        }
        if histogram:
            row["histogram"] = success_histogram(probs)
        statistics.append(row)

    config = {
        "n_values": list(n_values),
        "instances_per_n": instances_per_n,
        "fit": fit.to_dict(),
        "histogram": histogram,
        "evolution": cfg.to_dict(),
    }
    return SweepResult("fixed-T", master_seed, config, statistics, records, fit)


def _check_clauses(n: int, m_values: Sequence[int], count: int) -> None:
    _check_sizes([n], count, "instances per point")
    if not m_values:
        raise InvalidParameterError("m", "at least one clause count")
    limit = math.comb(n, 3)
    for m in m_values:
        if not 1 <= m <= limit:
            raise InvalidParameterError("m", f"1 <= m <= C({n},3) = {limit}", m)


def _category_stats(records: list[EnsembleRecord]) -> dict[str, Any]:
    probs = [r.success_probability for r in records if r.measured]
    return {"count": len(records), "flagged": sum(1 for r in records if r.flag), **low_tail(probs)}


def clause_sweep(
    n: int,
    m_values: Sequence[int],
    fit: QuadraticFit,
    instances_per_point: int = 100,
    master_seed: int = 0,
    cfg: EvolutionConfig | None = None,
    max_attempts: int | None = None,
    workers: int = 1,
    calibrate: bool = True,
) -> SweepResult:
    """
    Success probabilities at fixed clause counts, split by satisfiability.

    For each m, fixed-clause instances are drawn until both categories hold
    instances_per_point instances or max_attempts draws were made. Every
    instance runs at T = fit(n). Satisfiable instances succeed on any
    satisfying assignment, unsatisfiable ones on a minimal-violation
    assignment. The satisfiable category is further split into
    unique-assignment and multiple-assignment instances.
    """
    _check_clauses(n, m_values, instances_per_point)
    _check_fit(fit, [n])
    max_attempts = max_attempts or ATTEMPTS_PER_INSTANCE * instances_per_point
    if max_attempts < 1:
        raise InvalidParameterError("max_attempts", ">= 1", max_attempts)
    cfg = (cfg or EvolutionConfig(total_time=0.0)).with_time(fit(n))

    tasks: list[_EvolveTask] = []
    attempts: dict[int, int] = {}
    for m in m_values:
        quota = {SATISFIABLE: 0, UNSATISFIABLE: 0}
        attempt = 0
        while attempt < max_attempts and min(quota.values()) < instances_per_point:
            seed = derive_seed(master_seed, STREAM_CLAUSES, n, m, attempt)
            attempt += 1
            inst = generate_fixed_clauses(n, m, np.random.default_rng(seed))
            min_violations, _ = minimal_violation_set(inst)
            category = SATISFIABLE if min_violations == 0 else UNSATISFIABLE
            if quota[category] >= instances_per_point:
                continue
            quota[category] += 1
            tasks.append(_EvolveTask(len(tasks), seed, inst, category, cfg))
        attempts[m] = attempt

    if tasks:
        cfg = _calibrated(tasks[0].inst, cfg, cfg.total_time, calibrate)
        tasks = [_EvolveTask(t.index, t.seed, t.inst, t.category, cfg) for t in tasks]

    logger.info("Clause sweep: n=%s, m=%s, %s instances per category", n, list(m_values), instances_per_point)
    records = _sorted(run_tasks(_run_evolve_task, tasks, workers))

    statistics = []
    for m in m_values:
        group = [r for r in records if r.clause_count == m]
        row: dict[str, Any] = {"m": m, "T": cfg.total_time, "attempts": attempts[m]}
        for category in (SATISFIABLE, UNSATISFIABLE):
            members = [r for r in group if r.category == category]
            if not members:
                logger.warning("m=%s: no %s instances in %s attempts, category skipped", m, category, attempts[m])
                row[category] = {"count": 0, "skipped": True}
                continue
            if len(members) < instances_per_point:
                logger.warning(
                    "m=%s: %s of %s %s instances in %s attempts",
                    m, len(members), instances_per_point, category, attempts[m],
                )
            row[category] = _category_stats(members)
        satisfiable = [r for r in group if r.category == SATISFIABLE]
        row["unique"] = _category_stats([r for r in satisfiable if r.num_satisfying == 1])
        row["multiple"] = _category_stats([r for r in satisfiable if r.num_satisfying > 1])
        statistics.append(row)

    config = {
        "n": n,
        "m_values": list(m_values),
        "instances_per_point": instances_per_point,
        "max_attempts": max_attempts,
        "fit": fit.to_dict(),
        "evolution": cfg.to_dict(),
    }
    return SweepResult("clauses", master_seed, config, statistics, records, fit)


def phase_transition_scan(
    n: int,
    m_values: Sequence[int],
    instances_per_point: int = 100,
    master_seed: int = 0,
    workers: int = 1,
) -> SweepResult:
    """
    Fractions of unsatisfiable and unique-assignment instances per clause count.

    Classification only; no evolution is run.
    """
    _check_clauses(n, m_values, instances_per_point)
    tasks = [
        _ClassifyTask(index, derive_seed(master_seed, STREAM_PHASE, n, m, k), n, m)
        for index, (m, k) in enumerate((m, k) for m in m_values for k in range(instances_per_point))
    ]
    logger.info("Phase scan: n=%s, m=%s, %s instances each", n, list(m_values), instances_per_point)
    records = _sorted(run_tasks(_run_classify_task, tasks, workers))

    statistics = []
    for m in m_values:
        group = [r for r in records if r.clause_count == m]
        unsat = sum(1 for r in group if not r.satisfiable)
        unique = sum(1 for r in group if r.num_satisfying == 1)
        statistics.append({
            "m": m,
            "count": len(group),
            "unsatisfiable": unsat,
            "unique": unique,
            "fraction_unsat": unsat / len(group),
            "fraction_usa": unique / len(group),
        })

    config = {"n": n, "m_values": list(m_values), "instances_per_point": instances_per_point}
    return SweepResult("phase", master_seed, config, statistics, records)
