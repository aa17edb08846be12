"""
Command line for adiabatic Exact Cover experiments.

Commands:
- gen: write a random instance file (GUSA or fixed clause count)
- evolve: evolve one instance to time T and report its success probability
- search: find a run time with success probability in the band
- sweep: median-time, fixed-T, clause-count or phase-transition ensembles
- fit: quadratic fit of median run times

Exit codes: 0 success, 2 invalid input, 3 accuracy or search failure,
4 generation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .config import LOG_LEVELS, Settings
from .errors import AdiabaticCoverError, InvalidParameterError
from .evolution import (
    EvolutionConfig,
    StepControl,
    calibrate_step,
    dump_state,
    evolve,
    expected_repetitions,
    success_probability,
)
from .experiments import (
    BAND_HI,
    BAND_LO,
    T_MAX,
    SweepResult,
    clause_sweep,
    find_time_for_band,
    fixed_time_sweep,
    median_time_sweep,
    phase_transition_scan,
    success_targets,
)
from .hamiltonian import MAX_DENSE_BITS, build
from .instance import (
    MAX_BITS,
    generate_fixed_clauses,
    generate_gusa,
    instance_summary,
    load_instance,
    save_instance,
)
from .reports import (
    load_fit,
    load_points,
    save_fit,
    write_records_csv,
    write_report_json,
    write_summary_json,
)
from .stats import fit_quadratic

logger = logging.getLogger("adiabatic-cover")

SWEEP_KINDS = ("median-time", "fixed-T", "clauses", "phase")
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    """
    Validated parameters of one command.

    Built by from_args before any computation starts; every constraint
    violation names its flag.
    """

    command: str
    seed: int = 0
    n_values: tuple[int, ...] = ()
    m_values: tuple[int, ...] = ()
    mode: str = "gusa"
    instances: int | None = None
    total_time: float | None = None
    t_max: float = T_MAX
    band: tuple[float, float] = (BAND_LO, BAND_HI)
    evolution: EvolutionConfig = field(default_factory=lambda: EvolutionConfig(total_time=0.0))
    workers: int = 1
    out: Path | None = None
    output_dir: Path = Path(".")
    fmt: str = "json"
    instance: Path | None = None
    input: Path | None = None
    fit: Path | None = None
    kind: str | None = None
    histogram: bool = False
    dump_state: Path | None = None

    @property
    def n(self) -> int:
        return self.n_values[0]

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: Settings) -> RunConfig:
        command = args.command
        get = lambda name, default=None: getattr(args, name, default)  # noqa: E731

        seed = get("seed", 0)
        if seed < 0:
            raise InvalidParameterError("--seed", "seed >= 0", seed)

        workers = settings.workers if get("workers") is None else args.workers
        if workers < 1:
            raise InvalidParameterError("--workers", "workers >= 1", workers)

        instances = get("instances")
        if instances is not None and instances < 1:
            raise InvalidParameterError("--instances", "instances >= 1", instances)

        total_time = get("T")
        if total_time is not None and not (math.isfinite(total_time) and total_time >= 0):
            raise InvalidParameterError("--T", "finite T >= 0", total_time)

        t_max = get("t_max", T_MAX)
        if not t_max >= 1:
            raise InvalidParameterError("--t-max", "t-max >= 1", t_max)

        band = (get("band_lo", BAND_LO), get("band_hi", BAND_HI))
        if not 0 < band[0] <= band[1] < 1:
            raise InvalidParameterError("--band-lo/--band-hi", "0 < band-lo <= band-hi < 1", band)

        norm_tol = settings.norm_tolerance if get("norm_tol") is None else args.norm_tol
        if not norm_tol > 0:
            raise InvalidParameterError("--norm-tol", "norm-tol > 0", norm_tol)
        oracle_tol = norm_tol if get("oracle_tol") is None else args.oracle_tol
        if not oracle_tol > 0:
            raise InvalidParameterError("--oracle-tol", "oracle-tol > 0", oracle_tol)
        dt = get("dt")
        if dt is not None and not dt > 0:
            raise InvalidParameterError("--dt", "dt > 0", dt)
        evolution = EvolutionConfig(
            total_time=total_time or 0.0,
            step_control=StepControl(kind=get("step_control", "fixed"), dt=dt),
            norm_tolerance=norm_tol,
            oracle_tolerance=oracle_tol,
        )

        n_values = _values("--n", get("n"), get("n_min"), get("n_max"))
        for n in n_values:
            if not 3 <= n <= MAX_BITS:
                raise InvalidParameterError("--n", f"3 <= n <= {MAX_BITS}", n)
        m_values = _values("--m", get("m"), get("m_min"), get("m_max"))

        config = cls(
            command=command,
            seed=seed,
            n_values=n_values,
            m_values=m_values,
            mode=get("mode", "gusa"),
            instances=instances,
            total_time=total_time,
            t_max=t_max,
            band=band,
            evolution=evolution,
            workers=workers,
            out=Path(args.out) if get("out") else None,
            output_dir=settings.output_dir,
            fmt=get("format", "json"),
            instance=Path(args.instance) if get("instance") else None,
            input=Path(args.input) if get("input") else None,
            fit=Path(args.fit) if get("fit") else None,
            kind=get("kind"),
            histogram=bool(get("histogram", False)),
            dump_state=Path(args.dump_state) if get("dump_state") else None,
        )
        config._check_command()
        return config

    def _check_command(self) -> None:
        if self.command == "gen":
            if len(self.n_values) != 1:
                raise InvalidParameterError("--n", "exactly one bit count")
            if self.mode == "fixed":
                if len(self.m_values) != 1:
                    raise InvalidParameterError("--m", "exactly one clause count in fixed mode")
                limit = math.comb(self.n, 3)
                if not 0 <= self.m_values[0] <= limit:
                    raise InvalidParameterError("--m", f"0 <= m <= C({self.n},3) = {limit}", self.m_values[0])
        elif self.command == "evolve":
            if self.total_time is None:
                raise InvalidParameterError("--T", "a run time is required")
        elif self.command == "sweep":
            if not self.n_values:
                raise InvalidParameterError("--n", "at least one bit count (--n or --n-min/--n-max)")
            if self.kind in ("clauses", "phase"):
                if len(self.n_values) != 1:
                    raise InvalidParameterError("--n", f"exactly one bit count for the {self.kind} sweep")
                if not self.m_values:
                    raise InvalidParameterError("--m", "clause counts (--m or --m-min/--m-max)")
                limit = math.comb(self.n, 3)
                for m in self.m_values:
                    if not 1 <= m <= limit:
                        raise InvalidParameterError("--m", f"1 <= m <= C({self.n},3) = {limit}", m)
            if self.kind in ("fixed-T", "clauses") and self.fit is None:
                raise InvalidParameterError("--fit", f"a fit file is required for the {self.kind} sweep")


def _values(flag: str, listed: Sequence[int] | int | None, low: int | None, high: int | None) -> tuple[int, ...]:
    """Explicit values, or the inclusive range low..high."""
    if listed is not None and (low is not None or high is not None):
        raise InvalidParameterError(flag, f"either {flag} or {flag}-min/{flag}-max, not both")
    if listed is not None:
        return tuple([listed] if isinstance(listed, int) else listed)
    if low is None and high is None:
        return ()
    if low is None or high is None or low > high:
        raise InvalidParameterError(f"{flag}-min/{flag}-max", "both given with min <= max", (low, high))
    return tuple(range(low, high + 1))


# ==================== Output ====================


def _flatten(row: dict[str, Any]) -> dict[str, Any]:
    return {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in row.items()}


def emit(payload: dict[str, Any] | list[dict[str, Any]], fmt: str = "json") -> None:
    """Print a result to stdout as indented JSON or as CSV rows."""
    if fmt == "json":
        print(json.dumps(payload, indent=2))
        return
    rows = payload if isinstance(payload, list) else [payload]
    if not rows:
        return
    buffer = io.StringIO()
    fieldnames = list(dict.fromkeys(k for row in rows for k in row))
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(_flatten(row))
    sys.stdout.write(buffer.getvalue())


# ==================== Commands ====================


def cmd_gen(cfg: RunConfig) -> int:
    """Generate an instance, write it, print its clause and satisfying counts."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.mode == "gusa":
        inst = generate_gusa(cfg.n, rng)
    else:
        inst = generate_fixed_clauses(cfg.n, cfg.m_values[0], rng)
    out = cfg.out or cfg.output_dir / f"instance-{cfg.mode}-n{cfg.n}-seed{cfg.seed}.json"
    save_instance(inst, out)
    summary = instance_summary(inst)
    emit({"path": str(out), "seed": cfg.seed, **summary}, cfg.fmt)
    return 0


def _report(report: dict[str, Any], cfg: RunConfig) -> None:
    if cfg.out is not None:
        write_report_json(report, cfg.out)
    emit(report, cfg.fmt)


def cmd_evolve(cfg: RunConfig) -> int:
    """
    Evolve an instance file to time T and print its success probability.

    The default fixed step is calibrated first; an explicit --dt is used as given.
    """
    inst = load_instance(cfg.instance)
    if cfg.dump_state is not None and inst.n > MAX_DENSE_BITS:
        raise InvalidParameterError("--dump-state", f"n <= {MAX_DENSE_BITS}", inst.n)
    targets, min_violations = success_targets(inst)
    hd = build(inst)
    run_cfg = cfg.evolution.with_time(cfg.total_time)
    if run_cfg.step_control.kind == "fixed" and run_cfg.step_control.dt is None and cfg.total_time > 0:
        run_cfg = calibrate_step(hd, run_cfg)
    psi = evolve(hd, run_cfg)
    p = success_probability(psi, targets)
    report: dict[str, Any] = {
        "instance": str(cfg.instance),
        "n": inst.n,
        "clauses": inst.num_clauses,
        "T": cfg.total_time,
        "probability": p,
        "targets": int(targets.size),
        "satisfiable": min_violations == 0,
        "expected_repetitions": expected_repetitions(p) if p > 0 else None,
    }
    if min_violations:
        report["min_violations"] = min_violations
    if psi.stats is not None:
        report["integrator"] = psi.stats.to_dict()
    if cfg.dump_state is not None:
        report["state"] = str(dump_state(psi, cfg.dump_state))
    _report(report, cfg)
    return 0


def cmd_search(cfg: RunConfig) -> int:
    """Search a run time for one instance and print T, p and the probes."""
    inst = load_instance(cfg.instance)
    found = find_time_for_band(inst, *cfg.band, cfg=cfg.evolution, t_max=cfg.t_max)
    _report({
        "instance": str(cfg.instance),
        "T": found.total_time,
        "probability": found.probability,
        "flag": found.flag,
        "probes": [list(p) for p in found.probes],
    }, cfg)
    return 0


def _run_sweep(cfg: RunConfig) -> SweepResult:
    common = {"master_seed": cfg.seed, "cfg": cfg.evolution, "workers": cfg.workers}
    if cfg.kind == "median-time":
        return median_time_sweep(
            cfg.n_values, instances_per_n=cfg.instances or 75,
            p_lo=cfg.band[0], p_hi=cfg.band[1], t_max=cfg.t_max, **common,
        )
    if cfg.kind == "phase":
        return phase_transition_scan(
            cfg.n, cfg.m_values, instances_per_point=cfg.instances or 100,
            master_seed=cfg.seed, workers=cfg.workers,
        )
    fit = load_fit(cfg.fit)
    if cfg.kind == "fixed-T":
        return fixed_time_sweep(
            cfg.n_values, fit, instances_per_n=cfg.instances or 100, histogram=cfg.histogram, **common,
        )
    return clause_sweep(cfg.n, cfg.m_values, fit, instances_per_point=cfg.instances or 100, **common)


def cmd_sweep(cfg: RunConfig) -> int:
    """Run an ensemble sweep; write the records CSV and the JSON summary."""
    result = _run_sweep(cfg)
    out_dir = cfg.out or cfg.output_dir
    stem = f"{result.kind}-seed{cfg.seed}"
    write_records_csv(result.records, out_dir / f"{stem}.csv")
    write_summary_json(result.summary(), out_dir / f"{stem}.json")
    if result.kind == "median-time" and result.fit is not None:
        save_fit(result.fit, out_dir / f"{stem}.fit.json")
    if result.flagged:
        logger.warning("%s of %s records flagged", len(result.flagged), len(result.records))
    emit(result.statistics, cfg.fmt)
    return 0


def cmd_fit(cfg: RunConfig) -> int:
    """Fit T(n) = a0 + a1 n + a2 n^2 to a median-time summary or (n, T) CSV."""
    fit = fit_quadratic(load_points(cfg.input))
    out = cfg.out or cfg.input.with_suffix(".fit.json")
    save_fit(fit, out)
    emit({"path": str(out), **fit.to_dict()}, cfg.fmt)
    return 0


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "gen": cmd_gen,
    "evolve": cmd_evolve,
    "search": cmd_search,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
}


# ==================== Parser ====================


def _evolution_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--norm-tol", type=float, help="Largest accepted final norm drift")
    parser.add_argument("--oracle-tol", type=float, help="Step calibration tolerance (default: norm-tol)")
    parser.add_argument("--step-control", choices=("fixed", "adaptive"), default="fixed")
    parser.add_argument("--dt", type=float, help="Fixed RK4 step (default: min(0.01, 1/(4 E_max)))")


def _band_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--band-lo", type=float, default=BAND_LO)
    parser.add_argument("--band-hi", type=float, default=BAND_HI)
    parser.add_argument("--t-max", type=float, default=T_MAX, help="Largest T the doubling phase may reach")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", choices=LOG_LEVELS, type=str.upper)
    common.add_argument("--format", choices=FORMATS, default="json", help="stdout format")
    common.add_argument("--out", help="Output file (gen, fit, evolve, search) or directory (sweep)")

    parser = argparse.ArgumentParser(prog="adiabatic-cover", description=__doc__.splitlines()[1])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Generate a random instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--mode", choices=("gusa", "fixed"), default="gusa")
    gen.add_argument("--m", type=int, help="Clause count (fixed mode)")
    gen.add_argument("--seed", type=int, default=0)

    ev = sub.add_parser("evolve", parents=[common], help="Evolve one instance to time T")
    ev.add_argument("instance")
    ev.add_argument("--T", type=float, required=True)
    ev.add_argument("--dump-state", help=f"Write final amplitudes as JSON (n <= {MAX_DENSE_BITS})")
    _evolution_flags(ev)

    search = sub.add_parser("search", parents=[common], help="Find T with success probability in the band")
    search.add_argument("instance")
    _band_flags(search)
    _evolution_flags(search)

    sweep = sub.add_parser("sweep", parents=[common], help="Run an ensemble sweep")
    sweep.add_argument("kind", choices=SWEEP_KINDS)
    sweep.add_argument("--n", type=int, nargs="+")
    sweep.add_argument("--n-min", type=int)
    sweep.add_argument("--n-max", type=int)
    sweep.add_argument("--m", type=int, nargs="+")
    sweep.add_argument("--m-min", type=int)
    sweep.add_argument("--m-max", type=int)
    sweep.add_argument("--instances", type=int, help="Instances per n or per clause count")
    sweep.add_argument("--seed", type=int, default=0, help="Master seed")
    sweep.add_argument("--fit", help="Fit file (fixed-T and clauses sweeps)")
    sweep.add_argument("--histogram", action="store_true", help="Add 0.01-wide probability histograms (fixed-T)")
    sweep.add_argument("--workers", type=int)
    _band_flags(sweep)
    _evolution_flags(sweep)

    fit = sub.add_parser("fit", parents=[common], help="Quadratic fit of median run times")
    fit.add_argument("input", help="Median-time summary JSON or CSV with n and T columns")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
        logging.basicConfig(
            level=args.log_level or settings.log_level,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        cfg = RunConfig.from_args(args, settings)
        return COMMANDS[cfg.command](cfg)
    except AdiabaticCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
