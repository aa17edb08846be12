"""Environment-driven settings for the command line and tool server."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidParameterError

ENV_PREFIX = "ADIABATIC_COVER_"
DEFAULT_OUTPUT_DIR = "adiabatic_results"
DEFAULT_NORM_TOLERANCE = 1e-6
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def resolve_output_dir(value: str, *, base_dir: Path) -> Path:
    """Expand ``~`` and anchor relative paths at ``base_dir``."""
    path = Path(value).expanduser()
    if not path.is_absolute():
        path = (base_dir / path).resolve()
    return path


def _env(name: str) -> str | None:
    value = os.environ.get(ENV_PREFIX + name)
    if value is None or value.strip() == "":
        return None
    return value.strip()


@dataclass(frozen=True)
class Settings:
    """
    Process-wide defaults.

    Explicit command line flags override every field.
    """

    output_dir: Path
    workers: int = 1
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE
    log_level: str = "INFO"

    @classmethod
    def from_env(cls, base_dir: Path | None = None) -> Settings:
        """
        Build settings from ``ADIABATIC_COVER_*`` environment variables.

        Args:
            base_dir: Anchor for a relative output directory (default: cwd)

        Raises:
            InvalidParameterError: naming the malformed variable
        """
        base = base_dir or Path.cwd()
        output_dir = resolve_output_dir(_env("OUTPUT_DIR") or DEFAULT_OUTPUT_DIR, base_dir=base)

        workers = 1
        raw = _env("WORKERS")
        if raw is not None:
            try:
                workers = int(raw)
            except ValueError:
                raise InvalidParameterError(ENV_PREFIX + "WORKERS", "integer >= 1", raw) from None
            if workers < 1:
                raise InvalidParameterError(ENV_PREFIX + "WORKERS", "integer >= 1", raw)

        norm_tolerance = DEFAULT_NORM_TOLERANCE
        raw = _env("NORM_TOL")
        if raw is not None:
            try:
                norm_tolerance = float(raw)
            except ValueError:
                raise InvalidParameterError(ENV_PREFIX + "NORM_TOL", "positive float", raw) from None
            if not norm_tolerance > 0:
                raise InvalidParameterError(ENV_PREFIX + "NORM_TOL", "positive float", raw)

        log_level = (_env("LOG_LEVEL") or "INFO").upper()
        if log_level not in LOG_LEVELS:
            raise InvalidParameterError(ENV_PREFIX + "LOG_LEVEL", f"one of {LOG_LEVELS}", log_level)

        return cls(
            output_dir=output_dir,
            workers=workers,
            norm_tolerance=norm_tolerance,
            log_level=log_level,
        )

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level)
