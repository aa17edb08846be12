"""Runtime helpers for native thread pools and worker processes."""

from __future__ import annotations

import logging
import multiprocessing
import os
from concurrent.futures import Executor, ProcessPoolExecutor

logger = logging.getLogger("adiabatic-cover")

# Native pools that numpy/scipy may pull in through BLAS or OpenMP
THREAD_ENV_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def pin_native_threads(threads: int = 1) -> dict[str, str]:
    """
    Cap native thread pools for processes started from here on.

    Existing settings are respected; only unset variables are filled in.
    Spawned workers inherit the environment and read it when they import
    numpy, so a sweep with k workers uses k cores rather than k BLAS pools.

    Returns:
        The variables that were set by this call
    """
    applied = {}
    for name in THREAD_ENV_VARS:
        if name not in os.environ:
            os.environ[name] = str(threads)
            applied[name] = str(threads)
    if applied:
        logger.debug("Pinned native thread pools: %s", applied)
    return applied


def worker_pool(workers: int) -> Executor:
    """
    Create a process pool for sweep evaluations.

    Uses the spawn start method everywhere so workers begin from a clean
    interpreter with the pinned environment.
    """
    pin_native_threads(1)
    return ProcessPoolExecutor(
        max_workers=workers,
        mp_context=multiprocessing.get_context("spawn"),
    )
