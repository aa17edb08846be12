"""Tests for the command line."""

import json

import pytest

from adiabatic_cover.cli import build_parser, main


@pytest.fixture(autouse=True)
def output_dir(tmp_path, monkeypatch):
    """Route default outputs into the test directory."""
    out = tmp_path / "results"
    monkeypatch.setenv("ADIABATIC_COVER_OUTPUT_DIR", str(out))
    monkeypatch.delenv("ADIABATIC_COVER_WORKERS", raising=False)
    monkeypatch.delenv("ADIABATIC_COVER_NORM_TOL", raising=False)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    """Test instance generation."""

    def test_default_path(self, capsys, output_dir):
        """Instances land in the output directory under a seed-tagged name."""
        code, out, _ = run(capsys, "gen", "--n", "6", "--seed", "4")
        assert code == 0
        report = json.loads(out)
        assert report["path"] == str(output_dir / "instance-gusa-n6-seed4.json")
        assert report["num_satisfying"] == 1
        assert report["seed"] == 4

    def test_byte_identical(self, capsys, tmp_path):
        """Same seed, same file bytes."""
        run(capsys, "gen", "--n", "8", "--seed", "11", "--out", str(tmp_path / "a.json"))
        run(capsys, "gen", "--n", "8", "--seed", "11", "--out", str(tmp_path / "b.json"))
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_fixed_mode(self, capsys, tmp_path):
        """One clause on three bits."""
        code, out, _ = run(capsys, "gen", "--n", "3", "--mode", "fixed", "--m", "1", "--out", str(tmp_path / "c.json"))
        assert code == 0
        report = json.loads(out)
        assert report["clauses"] == 1
        assert report["num_satisfying"] == 3

    def test_csv_format(self, capsys, tmp_path):
        """CSV output has a header and one row."""
        code, out, _ = run(capsys, "gen", "--n", "5", "--format", "csv", "--out", str(tmp_path / "d.json"))
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("path,seed,n,clauses")
        assert len(lines) == 2

    @pytest.mark.parametrize(
        "argv, flag",
        [
            (["gen", "--n", "2"], "--n"),
            (["gen", "--n", "25"], "--n"),
            (["gen", "--n", "6", "--seed", "-1"], "--seed"),
            (["gen", "--n", "5", "--mode", "fixed"], "--m"),
            (["gen", "--n", "5", "--mode", "fixed", "--m", "11"], "--m"),
        ],
    )
    def test_invalid_flags(self, capsys, argv, flag):
        """Constraint violations exit 2 naming the flag."""
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert flag in err


class TestEvolve:
    """Test single-instance evolution."""

    @pytest.fixture
    def single_clause_file(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        run(capsys, "gen", "--n", "3", "--mode", "fixed", "--m", "1", "--out", str(path))
        return path

    @pytest.fixture
    def gusa_file(self, capsys, tmp_path):
        path = tmp_path / "gusa.json"
        run(capsys, "gen", "--n", "6", "--seed", "2", "--out", str(path))
        return path

    def test_zero_time(self, capsys, single_clause_file):
        """T = 0 reports the uniform success probability 3/8."""
        code, out, _ = run(capsys, "evolve", str(single_clause_file), "--T", "0")
        assert code == 0
        report = json.loads(out)
        assert report["probability"] == pytest.approx(3 / 8)
        assert report["targets"] == 3
        assert report["satisfiable"] is True

    def test_out_file(self, capsys, single_clause_file, tmp_path):
        """--out writes the printed report as JSON."""
        target = tmp_path / "reports" / "evolve.json"
        code, out, _ = run(capsys, "evolve", str(single_clause_file), "--T", "0", "--out", str(target))
        assert code == 0
        assert json.loads(target.read_text()) == json.loads(out)

    def test_adaptive_with_dump(self, capsys, gusa_file, tmp_path):
        """Adaptive evolution reports integrator statistics and dumps the state."""
        state = tmp_path / "state.json"
        code, out, _ = run(
            capsys, "evolve", str(gusa_file), "--T", "5", "--step-control", "adaptive", "--dump-state", str(state),
        )
        assert code == 0
        report = json.loads(out)
        assert 0.0 < report["probability"] < 1.0
        assert report["integrator"]["method"] == "dop853"
        assert len(json.loads(state.read_text())) == 64

    def test_coarse_step_exit_3(self, capsys, gusa_file):
        """Norm drift beyond tolerance exits 3 with the drift in the message."""
        code, _, err = run(capsys, "evolve", str(gusa_file), "--T", "20", "--dt", "1.0")
        assert code == 3
        assert "norm drift" in err

    def test_negative_time(self, capsys, gusa_file):
        """--T must be non-negative."""
        code, _, err = run(capsys, "evolve", str(gusa_file), "--T", "-1")
        assert code == 2
        assert "--T" in err

    def test_not_utf8(self, capsys, tmp_path):
        """An instance file with undecodable bytes exits 2 with a diagnostic."""
        path = tmp_path / "binary.json"
        path.write_bytes(b'{"n": 4, "clauses": [[0, 1, 2]]}\xff\xfe')
        code, _, err = run(capsys, "evolve", str(path), "--T", "0")
        assert code == 2
        assert "UTF-8" in err

    def test_missing_file(self, capsys, tmp_path):
        """An unreadable instance file exits 2."""
        code, _, err = run(capsys, "evolve", str(tmp_path / "nope.json"), "--T", "1")
        assert code == 2
        assert err.startswith("error:")


class TestSearch:
    """Test the run-time search command."""

    def test_band(self, capsys, tmp_path):
        """The reported probability lies in the band."""
        path = tmp_path / "g.json"
        run(capsys, "gen", "--n", "5", "--seed", "3", "--out", str(path))
        code, out, _ = run(capsys, "search", str(path), "--step-control", "adaptive")
        assert code == 0
        report = json.loads(out)
        assert 0.12 <= report["probability"] <= 0.13
        assert report["probes"][-1] == [report["T"], report["probability"]]

    def test_out_file(self, capsys, tmp_path):
        """--out writes the search report, including the evaluation history."""
        path = tmp_path / "g.json"
        run(capsys, "gen", "--n", "5", "--seed", "3", "--out", str(path))
        target = tmp_path / "search.json"
        code, out, _ = run(capsys, "search", str(path), "--step-control", "adaptive", "--out", str(target))
        assert code == 0
        saved = json.loads(target.read_text())
        assert saved == json.loads(out)
        assert saved["probes"][-1] == [saved["T"], saved["probability"]]

    def test_inverted_band(self, capsys, tmp_path):
        """band-lo above band-hi exits 2."""
        path = tmp_path / "g.json"
        run(capsys, "gen", "--n", "5", "--out", str(path))
        code, _, err = run(capsys, "search", str(path), "--band-lo", "0.2", "--band-hi", "0.1")
        assert code == 2
        assert "--band-lo" in err


class TestSweep:
    """Test sweep outputs."""

    def test_phase_files(self, capsys, tmp_path):
        """Records CSV and summary JSON are written under the seed-tagged stem."""
        out_dir = tmp_path / "phase"
        code, out, _ = run(
            capsys, "sweep", "phase", "--n", "6", "--m", "1", "4", "--instances", "5", "--seed", "3", "--out", str(out_dir),
        )
        assert code == 0
        rows = json.loads(out)
        assert [row["m"] for row in rows] == [1, 4]
        assert (out_dir / "phase-seed3.csv").read_text().startswith("seed,n,clauses,")
        summary = json.loads((out_dir / "phase-seed3.json").read_text())
        assert summary["master_seed"] == 3
        assert len(summary["records"]) == 10

    def test_workers_do_not_change_output(self, capsys, tmp_path):
        """1 and 2 workers write identical files."""
        for workers in ("1", "2"):
            run(
                capsys, "sweep", "phase", "--n", "6", "--m-min", "2", "--m-max", "4", "--instances", "6",
                "--seed", "8", "--workers", workers, "--out", str(tmp_path / workers),
            )
        for name in ("phase-seed8.csv", "phase-seed8.json"):
            assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()

    def test_median_time_writes_fit(self, capsys, tmp_path):
        """A median-time sweep over three sizes writes a fit file usable by fixed-T."""
        out_dir = tmp_path / "mt"
        code, _, _ = run(
            capsys, "sweep", "median-time", "--n", "5", "6", "7", "--instances", "3",
            "--step-control", "adaptive", "--out", str(out_dir),
        )
        assert code == 0
        fit_file = out_dir / "median-time-seed0.fit.json"
        assert fit_file.exists()
        code, out, _ = run(
            capsys, "sweep", "fixed-T", "--n", "5", "--instances", "2", "--fit", str(fit_file),
            "--step-control", "adaptive", "--out", str(out_dir),
        )
        assert code == 0
        assert json.loads(out)[0]["count"] == 2

    @pytest.mark.parametrize(
        "argv, flag",
        [
            (["sweep", "median-time", "--n", "5", "--workers", "0"], "--workers"),
            (["sweep", "fixed-T", "--n", "5"], "--fit"),
            (["sweep", "phase", "--n", "5", "6", "--m", "2"], "--n"),
            (["sweep", "phase", "--n", "5", "--m", "0"], "--m"),
            (["sweep", "phase", "--n", "5", "--m", "2", "--instances", "0"], "--instances"),
            (["sweep", "median-time", "--n", "5", "--n-min", "5", "--n-max", "6"], "--n"),
            (["sweep", "median-time", "--n", "5", "--norm-tol", "0"], "--norm-tol"),
        ],
    )
    def test_invalid_flags(self, capsys, argv, flag):
        """Constraint violations exit 2 naming the flag."""
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert flag in err


class TestFit:
    """Test the fit command."""

    def test_fit_from_summary(self, capsys, tmp_path):
        """Fits the medians of a summary and writes the fit next to it."""
        summary = tmp_path / "median.json"
        rows = [{"n": n, "median": 1.0 + 2.0 * n + 0.5 * n * n} for n in (6, 7, 8, 9)]
        summary.write_text(json.dumps({"kind": "median-time", "statistics": rows}))
        code, out, _ = run(capsys, "fit", str(summary))
        assert code == 0
        report = json.loads(out)
        assert report["coefficients"] == pytest.approx([1.0, 2.0, 0.5], abs=1e-8)
        assert (tmp_path / "median.fit.json").exists()

    def test_underdetermined(self, capsys, tmp_path):
        """Two sizes cannot fix a quadratic."""
        path = tmp_path / "points.csv"
        path.write_text("n,T\n6,10\n7,12\n")
        code, _, _ = run(capsys, "fit", str(path))
        assert code == 2


class TestParser:
    """Test argument parsing."""

    def test_unknown_kind(self):
        """Sweep kinds are fixed."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep", "nonsense", "--n", "5"])

    def test_range_flags(self):
        """--n-min/--n-max parse as integers."""
        args = build_parser().parse_args(["sweep", "median-time", "--n-min", "8", "--n-max", "10"])
        assert (args.n_min, args.n_max) == (8, 10)
