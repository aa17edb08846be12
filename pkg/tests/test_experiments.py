"""Tests for the run-time search and ensemble sweeps."""

import numpy as np
import pytest

from adiabatic_cover import experiments
from adiabatic_cover.errors import IntegrationAccuracyError, InvalidParameterError, SearchFailedError
from adiabatic_cover.evolution import EvolutionConfig, StepControl, dense_propagate, success_probability
from adiabatic_cover.experiments import (
    FLAG_ACCURACY,
    FLAG_STALLED,
    SATISFIABLE,
    UNSATISFIABLE,
    EnsembleRecord,
    clause_sweep,
    derive_seed,
    find_time_for_band,
    fixed_time_sweep,
    median_time_sweep,
    phase_transition_scan,
    probability_at,
    success_targets,
)
from adiabatic_cover.hamiltonian import build
from adiabatic_cover.instance import generate_fixed_clauses, generate_gusa
from adiabatic_cover.stats import QuadraticFit

ADAPTIVE = EvolutionConfig(total_time=0.0, step_control=StepControl(kind="adaptive"))


@pytest.fixture
def gusa5():
    """A seeded unique-assignment instance on 5 bits."""
    return generate_gusa(5, np.random.default_rng(21))


class TestSeeds:
    """Test per-instance seed derivation."""

    def test_deterministic(self):
        """Same keys, same seed."""
        assert derive_seed(42, 1, 8, 3) == derive_seed(42, 1, 8, 3)

    def test_keys_matter(self):
        """Different instance indices give different seeds."""
        seeds = {derive_seed(42, 1, 8, k) for k in range(50)}
        assert len(seeds) == 50

    def test_negative_master_seed(self):
        """Master seeds are non-negative."""
        with pytest.raises(InvalidParameterError):
            derive_seed(-1, 0)


class TestTargets:
    """Test success target selection."""

    def test_satisfiable(self, two_clause_instance):
        """Satisfying set with zero violations."""
        targets, best = success_targets(two_clause_instance)
        assert targets.tolist() == [1, 2, 12]
        assert best == 0

    def test_unsatisfiable(self, unsatisfiable_instance):
        """Minimal-violation set otherwise."""
        targets, best = success_targets(unsatisfiable_instance)
        assert targets.tolist() == [1, 2, 4, 8]
        assert best == 1

    def test_probability_at_zero(self, single_clause_instance):
        """At T = 0 the probability is the target fraction."""
        assert probability_at(single_clause_instance, 0.0) == pytest.approx(3 / 8)


class TestFindTimeForBand:
    """Test the doubling/bisection run-time search."""

    def test_lands_in_band(self, gusa5):
        """The returned T has probability in [0.12, 0.13]."""
        found = find_time_for_band(gusa5, cfg=ADAPTIVE)
        assert found.flag == ""
        assert 0.12 <= found.probability <= 0.13
        assert found.probes[-1] == (found.total_time, found.probability)
        assert found.probes[0][0] == 1.0

    def test_probe_order(self, gusa5):
        """Doubling probes increase; bisection probes stay inside the last bracket."""
        found = find_time_for_band(gusa5, cfg=ADAPTIVE)
        times = [t for t, _ in found.probes]
        doubling = [times[0]]
        for t in times[1:]:
            if t != 2 * doubling[-1]:
                break
            doubling.append(t)
        assert all(a < b for a, b in zip(doubling, doubling[1:]))
        lo = doubling[-2] if len(doubling) > 1 else 0.0
        hi = doubling[-1]
        for t in times[len(doubling):]:
            assert lo < t < hi

    def test_matches_dense_propagation(self, gusa5):
        """The reported probability matches the dense propagator at the found T."""
        found = find_time_for_band(gusa5, cfg=ADAPTIVE)
        targets, _ = success_targets(gusa5)
        reference = success_probability(dense_propagate(build(gusa5), found.total_time), targets)
        assert abs(reference - found.probability) < 1e-6

    def test_deterministic(self, gusa5):
        """Same instance and config, same probe list."""
        assert find_time_for_band(gusa5, cfg=ADAPTIVE).probes == find_time_for_band(gusa5, cfg=ADAPTIVE).probes

    def test_already_in_band(self, gusa5):
        """A band around p(1) returns T = 1 after one probe."""
        p1 = probability_at(gusa5, 1.0, ADAPTIVE)
        found = find_time_for_band(gusa5, p_lo=p1 - 1e-3, p_hi=p1 + 1e-3, cfg=ADAPTIVE)
        assert found.total_time == 1.0
        assert len(found.probes) == 1

    def test_search_failure_keeps_probes(self, gusa5):
        """Doubling past t_max raises with the probe trace."""
        with pytest.raises(SearchFailedError) as info:
            find_time_for_band(gusa5, p_lo=0.98, p_hi=0.99, cfg=ADAPTIVE, t_max=4.0)
        assert [t for t, _ in info.value.probes] == [1.0, 2.0, 4.0]
        assert info.value.exit_code == 3

    def test_accuracy_failure_keeps_history(self, gusa5, monkeypatch):
        """An accuracy failure mid-search carries the evaluations made before it."""
        real_evolve = experiments.evolve

        def coarse_after_one(hd, cfg, initial=None):
            if cfg.total_time > 1.0:
                raise IntegrationAccuracyError(1e-3, cfg.norm_tolerance, {"steps": 1, "dt": 1.0})
            return real_evolve(hd, cfg, initial)

        monkeypatch.setattr(experiments, "evolve", coarse_after_one)
        with pytest.raises(IntegrationAccuracyError) as info:
            find_time_for_band(gusa5, p_lo=0.98, p_hi=0.99, cfg=ADAPTIVE)
        assert [t for t, _ in info.value.probes] == [1.0]

        result = median_time_sweep([5], instances_per_n=2, master_seed=1, cfg=ADAPTIVE, p_lo=0.98, p_hi=0.99)
        for record in result.records:
            assert record.flag == FLAG_ACCURACY
            assert [t for t, _ in record.probes] == [1.0]
            assert 0.0 < record.probes[0][1] < 0.98
            assert record.run_time is None

    def test_stalled_bisection_flagged(self, single_clause_instance):
        """A band below p(0) is never entered; the first probe above is kept and flagged."""
        found = find_time_for_band(single_clause_instance, cfg=ADAPTIVE, max_bisections=5)
        assert found.flag == FLAG_STALLED
        assert found.total_time == 1.0
        assert len(found.probes) == 6

    def test_invalid_band(self, gusa5):
        """band-lo must not exceed band-hi."""
        with pytest.raises(InvalidParameterError):
            find_time_for_band(gusa5, p_lo=0.2, p_hi=0.1)


class TestMedianTimeSweep:
    """Test the median-time ensemble."""

    @pytest.fixture(scope="class")
    def result(self):
        return median_time_sweep([5, 6, 7], instances_per_n=4, master_seed=3, cfg=ADAPTIVE)

    def test_rows(self, result):
        """One row per n with a median and limits."""
        assert [row["n"] for row in result.statistics] == [5, 6, 7]
        for row in result.statistics:
            assert row["count"] == 4
            assert row["lower"] <= row["median"] <= row["upper"]

    def test_records_in_band(self, result):
        """Unflagged records end inside the band."""
        assert len(result.records) == 12
        for record in result.records:
            if not record.flag:
                assert 0.12 <= record.success_probability <= 0.13
                assert record.num_satisfying == 1

    def test_record_history_sorted(self, result):
        """Record history is strictly increasing in T and holds the accepted pair."""
        for record in result.records:
            times = [t for t, _ in record.probes]
            assert all(a < b for a, b in zip(times, times[1:]))
            if not record.flag:
                assert (record.run_time, record.success_probability) in record.probes

    def test_record_sorts_history(self):
        """Records order (T, p) pairs by T whatever order they arrive in."""
        record = EnsembleRecord(
            index=0, seed=1, n=5, clause_count=4, satisfiable=True, num_satisfying=1, min_violations=0,
            probes=((4.0, 0.2), (1.0, 0.05), (3.0, 0.125), (2.0, 0.09)),
        )
        assert [t for t, _ in record.probes] == [1.0, 2.0, 3.0, 4.0]
        assert record.to_dict()["probes"][2] == [3.0, 0.125]

    def test_fit_attached(self, result):
        """Three n values give a quadratic fit through the medians."""
        assert result.fit is not None
        assert len(result.fit.points) == 3

    def test_summary(self, result):
        """Summary echoes seed and config."""
        summary = result.summary()
        assert summary["kind"] == "median-time"
        assert summary["master_seed"] == 3
        assert summary["config"]["instances_per_n"] == 4
        assert len(summary["records"]) == 12

    def test_reproducible(self, result):
        """Same master seed, same table."""
        again = median_time_sweep([5, 6, 7], instances_per_n=4, master_seed=3, cfg=ADAPTIVE)
        assert again.statistics == result.statistics


class TestFixedTimeSweep:
    """Test runs at the fitted time."""

    def test_statistics_and_histogram(self):
        """Per-n statistics and a 100-bin histogram."""
        fit = QuadraticFit((2.0, 0.0, 0.0))
        result = fixed_time_sweep([5, 6], fit, instances_per_n=5, master_seed=1, cfg=ADAPTIVE, histogram=True)
        assert len(result.records) == 10
        for record in result.records:
            assert record.run_time == 2.0
            assert 0.0 <= record.success_probability <= 1.0
        for row in result.statistics:
            assert row["T"] == 2.0
            assert len(row["histogram"]) == 100
            assert sum(row["histogram"]) == 5
            assert row["lowest"] <= row["median"]

    def test_fresh_instances(self):
        """Fixed-T instances differ from the median-time ensemble."""
        fit = QuadraticFit((2.0, 0.0, 0.0))
        fixed = fixed_time_sweep([5], fit, instances_per_n=3, master_seed=1, cfg=ADAPTIVE)
        median = median_time_sweep([5], instances_per_n=3, master_seed=1, cfg=ADAPTIVE)
        assert {r.seed for r in fixed.records}.isdisjoint({r.seed for r in median.records})

    def test_nonpositive_fit(self):
        """T(n) must be positive over the swept range."""
        with pytest.raises(InvalidParameterError):
            fixed_time_sweep([5], QuadraticFit((-1.0, 0.0, 0.0)), instances_per_n=1)


class TestClauseSweep:
    """Test fixed clause-count ensembles."""

    def test_single_clause_point(self):
        """m = 1 is always satisfiable and matches a direct evolution."""
        fit = QuadraticFit((1.5, 0.0, 0.0))
        result = clause_sweep(5, [1], fit, instances_per_point=3, master_seed=2, cfg=ADAPTIVE)
        row = result.statistics[0]
        assert row[SATISFIABLE]["count"] == 3
        assert row[UNSATISFIABLE] == {"count": 0, "skipped": True}
        assert row["attempts"] == 60
        for record in result.records:
            inst = generate_fixed_clauses(5, 1, np.random.default_rng(record.seed))
            direct = probability_at(inst, 1.5, ADAPTIVE)
            assert record.success_probability == pytest.approx(direct, abs=1e-12)

    def test_categories_match_oracle(self):
        """Records are filed by satisfiability with the matching targets."""
        fit = QuadraticFit((1.0, 0.0, 0.0))
        result = clause_sweep(5, [6], fit, instances_per_point=3, master_seed=4, cfg=ADAPTIVE, max_attempts=200)
        for record in result.records:
            assert record.category == (SATISFIABLE if record.satisfiable else UNSATISFIABLE)
            assert (record.min_violations == 0) == record.satisfiable
        row = result.statistics[0]
        assert row["unique"]["count"] + row["multiple"]["count"] == row[SATISFIABLE]["count"]

    def test_zero_clauses_rejected(self):
        """m = 0 is outside the sweep."""
        with pytest.raises(InvalidParameterError):
            clause_sweep(5, [0], QuadraticFit((1.0, 0.0, 0.0)), instances_per_point=1)


class TestPhaseTransitionScan:
    """Test the satisfiability fractions."""

    def test_fractions(self):
        """One clause is always satisfiable; fractions lie in [0, 1]."""
        result = phase_transition_scan(6, [1, 4, 8], instances_per_point=30, master_seed=5)
        first = result.statistics[0]
        assert first["fraction_unsat"] == 0.0
        for row in result.statistics:
            assert row["count"] == 30
            assert 0.0 <= row["fraction_unsat"] <= 1.0
            assert 0.0 <= row["fraction_usa"] <= 1.0 - row["fraction_unsat"] + 1e-12
        assert all(r.success_probability is None for r in result.records)

    def test_parallel_matches_serial(self):
        """Worker count does not change the records."""
        serial = phase_transition_scan(6, [2, 6], instances_per_point=10, master_seed=9, workers=1)
        parallel = phase_transition_scan(6, [2, 6], instances_per_point=10, master_seed=9, workers=2)
        assert serial.records == parallel.records
        assert serial.statistics == parallel.statistics
