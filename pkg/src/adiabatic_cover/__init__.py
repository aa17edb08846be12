"""Adiabatic Cover - quantum adiabatic evolution on random Exact Cover instances."""
from .evolution import EvolutionConfig, StateVector, StepControl, evolve, success_probability
from .experiments import EnsembleRecord, find_time_for_band
from .hamiltonian import HamiltonianData, build
from .instance import Clause, ExactCoverInstance, generate_fixed_clauses, generate_gusa
from .stats import QuadraticFit, fit_quadratic, median_with_ci

__all__ = [
    "Clause",
    "EnsembleRecord",
    "EvolutionConfig",
    "ExactCoverInstance",
    "HamiltonianData",
    "QuadraticFit",
    "StateVector",
    "StepControl",
    "build",
    "evolve",
    "find_time_for_band",
    "fit_quadratic",
    "generate_fixed_clauses",
    "generate_gusa",
    "median_with_ci",
    "success_probability",
]
