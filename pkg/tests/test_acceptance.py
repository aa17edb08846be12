"""End-to-end checks on ensembles; the long ones are marked slow."""

import math

import numpy as np
import pytest

from adiabatic_cover.evolution import (
    EvolutionConfig,
    StepControl,
    amplified_success,
    calibrate_step,
    dense_propagate,
    evolve,
)
from adiabatic_cover.experiments import (
    LOW_PROBABILITY,
    clause_sweep,
    find_time_for_band,
    fixed_time_sweep,
    median_time_sweep,
    phase_transition_scan,
    probability_at,
)
from adiabatic_cover.hamiltonian import build, low_spectrum
from adiabatic_cover.instance import (
    enumerate_satisfying,
    generate_gusa,
    instance_from_triples,
    minimal_violation_set,
    prefix_satisfying_counts,
)
from adiabatic_cover.reports import write_records_csv

ADAPTIVE = EvolutionConfig(total_time=0.0, step_control=StepControl(kind="adaptive"))


class TestHardNumbers:
    """Test the exact figures the model is built around."""

    def test_single_clause_has_three_solutions(self):
        """One clause on three bits: 3 of 8 assignments satisfy it."""
        inst = instance_from_triples(3, [(0, 1, 2)])
        assert enumerate_satisfying(inst).tolist() == [1, 2, 4]

    def test_two_hundred_repetitions(self):
        """200 runs at p = 0.04 succeed with probability above 0.9997."""
        assert amplified_success(0.04, 200) > 0.9997


class TestDeterminism:
    """Test that worker count does not reach the output."""

    def test_median_time_csv(self, tmp_path):
        """Same master seed: byte-identical records CSV at 1 and 3 workers."""
        paths = []
        for workers in (1, 3):
            result = median_time_sweep([5, 6], instances_per_n=3, master_seed=17, cfg=ADAPTIVE, workers=workers)
            paths.append(write_records_csv(result.records, tmp_path / f"w{workers}.csv"))
        assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.slow
class TestEnsembleContracts:
    """Test generator and integrator contracts at ensemble size."""

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_gusa_two_hundred(self, n):
        """200 instances per n: unique solution, prefix counts never hit 0."""
        rng = np.random.default_rng(1000 + n)
        for _ in range(200):
            inst = generate_gusa(n, rng)
            counts = prefix_satisfying_counts(inst)
            assert counts[-1] == 1
            assert min(counts) >= 1
            assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_oracle_equivalence(self):
        """20 instances with n <= 6 at T in {1, 10, 100} match the dense propagator."""
        rng = np.random.default_rng(44)
        for _ in range(20):
            inst = generate_gusa(int(rng.integers(4, 7)), rng)
            hd = build(inst)
            for total_time in (1.0, 10.0, 100.0):
                cfg = calibrate_step(hd, EvolutionConfig(total_time=total_time, oracle_tolerance=1e-7))
                psi = evolve(hd, cfg)
                reference = dense_propagate(hd, total_time)
                assert np.linalg.norm(psi.amplitudes - reference.amplitudes) <= 1e-6
                assert psi.stats.drift <= 1e-6

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_spectral_anchoring(self, n):
        """Uniform ground state at s = 0; satisfying basis vector at s = 1."""
        inst = generate_gusa(n, np.random.default_rng(n))
        hd = build(inst)
        energies, states = low_spectrum(hd, 0.0, 1)
        assert abs(energies[0]) < 1e-10
        assert abs(abs(states[:, 0].sum()) / math.sqrt(hd.dim) - 1.0) < 1e-10
        best, argmin = minimal_violation_set(inst)
        energies, states = low_spectrum(hd, 1.0, 1)
        assert abs(energies[0] - best) < 1e-10
        assert abs(abs(states[argmin[0], 0]) - 1.0) < 1e-10

    def test_adiabatic_limit(self):
        """At 8x the band time the success probability exceeds 1/2."""
        rng = np.random.default_rng(6)
        for _ in range(10):
            inst = generate_gusa(6, rng)
            found = find_time_for_band(inst, cfg=ADAPTIVE)
            assert probability_at(inst, 8 * found.total_time, ADAPTIVE) > 0.5

    def test_band_contract(self):
        """Every unflagged n = 8 record lands in [0.12, 0.13]."""
        result = median_time_sweep([8], instances_per_n=30, master_seed=8, cfg=ADAPTIVE, workers=2)
        unflagged = [r for r in result.records if not r.flag]
        assert unflagged
        for record in unflagged:
            assert 0.12 <= record.success_probability <= 0.13


@pytest.mark.slow
class TestTwoStageProtocol:
    """Test the fit-then-run protocol and clause-count ensembles."""

    @pytest.fixture(scope="class")
    def fit(self):
        result = median_time_sweep([8, 9, 10, 11], instances_per_n=25, master_seed=1, cfg=ADAPTIVE, workers=4)
        assert result.fit is not None
        return result.fit

    def test_fixed_time_near_one_eighth(self, fit):
        """Fresh instances at T(n): median in [0.10, 0.16], at most 4% at or below 0.04."""
        result = fixed_time_sweep([8, 9, 10, 11], fit, instances_per_n=50, master_seed=2, cfg=ADAPTIVE, workers=4)
        for row in result.statistics:
            assert 0.10 <= row["median"] <= 0.16
            assert row["fraction_at_or_below_low"] <= LOW_PROBABILITY

    def test_multiple_assignments_easier(self, fit):
        """Non-unique satisfiable instances do at least as well as unique ones."""
        result = clause_sweep(10, [7, 8, 9], fit, instances_per_point=100, master_seed=3, cfg=ADAPTIVE, workers=4)
        compared = 0
        for row in result.statistics:
            unique, multiple = row["unique"], row["multiple"]
            if unique["count"] and multiple["count"]:
                assert multiple["median"] >= unique["median"]
                compared += 1
        assert compared > 0


@pytest.mark.slow
class TestPhaseTransition:
    """Test the satisfiability transition at n = 12."""

    def test_shape(self):
        """Unsatisfiable fraction rises from < 0.1 to > 0.9; USA fraction peaks inside."""
        result = phase_transition_scan(12, list(range(1, 21)), instances_per_point=500, master_seed=12, workers=4)
        rows = result.statistics
        slack = 2 / math.sqrt(500)
        unsat = [row["fraction_unsat"] for row in rows]
        assert unsat[0] < 0.1 and unsat[-1] > 0.9
        assert all(b >= a - slack for a, b in zip(unsat, unsat[1:]))
        peak = max(rows, key=lambda row: row["fraction_usa"])
        assert 0.1 < peak["fraction_unsat"] < 0.9
