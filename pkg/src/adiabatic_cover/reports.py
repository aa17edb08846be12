"""Result files: records CSV, sweep summaries and fit files."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable

from .errors import InvalidParameterError
from .experiments import EnsembleRecord
from .stats import QuadraticFit

logger = logging.getLogger("adiabatic-cover")

CSV_HEADER = ("seed", "n", "clauses", "satisfiable", "num_sat", "T", "prob", "flag")


def _number(value: float | None) -> str:
    # repr is the shortest text that reads back to the same float
    return "" if value is None else repr(float(value))


def record_row(record: EnsembleRecord) -> list[str]:
    """One CSV row in CSV_HEADER order."""
    return [
        str(record.seed),
        str(record.n),
        str(record.clause_count),
        "true" if record.satisfiable else "false",
        str(record.num_satisfying),
        _number(record.run_time),
        _number(record.success_probability),
        record.flag,
    ]


def write_records_csv(records: Iterable[EnsembleRecord], path: str | Path) -> Path:
    """Write one row per record; equal record lists give equal bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record_row(record))
    logger.info("Wrote %s", path)
    return path


def _save(data: Any, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def _load(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise InvalidParameterError(str(path), "valid UTF-8 JSON", str(exc)) from None


def write_summary_json(summary: dict[str, Any], path: str | Path) -> Path:
    """Write a sweep summary (statistics, fit, config echo, master seed, records)."""
    path = _save(summary, Path(path))
    logger.info("Wrote %s", path)
    return path


def write_report_json(report: dict[str, Any], path: str | Path) -> Path:
    """Write a single-instance result (evolve, search) as it is printed."""
    path = _save(report, Path(path))
    logger.info("Wrote %s", path)
    return path


def save_fit(fit: QuadraticFit, path: str | Path) -> Path:
    return _save(fit.to_dict(), Path(path))


def load_fit(path: str | Path) -> QuadraticFit:
    """
    Read a fit file, or the fit embedded in a sweep summary.

    Raises:
        InvalidParameterError: the file holds no usable fit
    """
    data = _load(path)
    if isinstance(data, dict) and "coefficients" not in data and isinstance(data.get("fit"), dict):
        data = data["fit"]
    if not isinstance(data, dict):
        raise InvalidParameterError("fit", "a JSON object with 'coefficients'", str(path))
    return QuadraticFit.from_dict(data)


def load_points(path: str | Path) -> list[tuple[float, float]]:
    """
    (n, T) points for a quadratic fit.

    Accepts a median-time summary (rows with a median) or a CSV with n and
    T columns; CSV rows with an empty T are skipped.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, encoding="utf-8", newline="") as f:
            try:
                reader = csv.DictReader(f)
                columns = set(reader.fieldnames or ())
                rows = [(row["n"], row["T"]) for row in reader] if {"n", "T"} <= columns else None
            except UnicodeDecodeError as exc:
                raise InvalidParameterError("fit input", "UTF-8 CSV", str(exc)) from None
        if rows is None:
            raise InvalidParameterError("fit input", "CSV with 'n' and 'T' columns", str(path))
        try:
            return [(float(n), float(t)) for n, t in rows if t]
        except (TypeError, ValueError):
            raise InvalidParameterError("fit input", "numeric n and T values", str(path)) from None

    data = _load(path)
    statistics = data.get("statistics") if isinstance(data, dict) else None
    if not isinstance(statistics, list):
        raise InvalidParameterError("fit input", "a median-time summary with 'statistics'", str(path))
    return [(float(r["n"]), float(r["median"])) for r in statistics if r.get("median") is not None]
