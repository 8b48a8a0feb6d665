import json
import math

import numpy as np
import pytest

from polydyn.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run_cli(capsys, *argv)
    return code, json.loads(out)


class TestClassify:
    def test_boundary_parabolic(self, capsys):
        code, rep = run_json(
            capsys, "classify", "-p", "0.25,0,1", "--period", "1"
        )
        assert code == 0
        assert len(rep["orbits"]) == 1
        orbit = rep["orbits"][0]
        assert orbit["class"] == "rationally neutral(1)"
        assert orbit["points"][0][0] == pytest.approx(0.5, abs=1e-6)
        assert rep["census"]["ok"]

    def test_superattracting_two_cycle(self, capsys):
        code, rep = run_json(capsys, "classify", "-p", "-1,0,1", "--period", "2")
        assert code == 0
        two = [o for o in rep["orbits"] if o["period"] == 2]
        assert len(two) == 1
        assert two[0]["class"] == "superattracting"
        pts = sorted(p[0] for p in two[0]["points"])
        assert pts == pytest.approx([-1.0, 0.0], abs=1e-9)

    def test_square_fixed_points(self, capsys):
        code, rep = run_json(capsys, "classify", "-p", "0,0,1", "--period", "1")
        assert code == 0
        classes = sorted(o["class"] for o in rep["orbits"])
        assert classes == ["repelling", "superattracting"]

    def test_parse_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["classify", "-p", "not-a-poly", "--period", "1"])
        assert exc.value.code == 2


class TestJulia:
    def test_roots_of_unity(self, capsys, tmp_path):
        out = tmp_path / "cloud.csv"
        code, rep = run_json(
            capsys,
            "julia", "-p", "0,0,1", "-n", "12", "--budget", "65536",
            "-z", "1", "-o", str(out),
        )
        assert code == 0
        assert rep["mode"] == "exact"
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        z = rows[:, 0] + 1j * rows[:, 1]
        assert len(z) == 4096
        assert np.abs(np.abs(z) - 1).max() < 1e-6
        assert rows[:, 2].sum() == pytest.approx(1.0, abs=1e-9)

    def test_default_basepoint_near_circle(self, capsys, tmp_path):
        # default basepoint is escape_radius + 1 = 3; the depth-12 tree
        # sits 3^(1/4096) - 1 = 2.7e-4 from the circle (oracle value)
        out = tmp_path / "cloud.csv"
        code, rep = run_json(
            capsys, "julia", "-p", "0,0,1", "-n", "12", "-o", str(out)
        )
        assert code == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        z = rows[:, 0] + 1j * rows[:, 1]
        gap = np.abs(np.abs(z) - 1).max()
        assert gap == pytest.approx(3 ** (1 / 4096) - 1, abs=1e-6)

    def test_chebyshev_sampled(self, capsys, tmp_path):
        out = tmp_path / "cheb.csv"
        code, rep = run_json(
            capsys,
            "julia", "-p", "-2,0,1", "-n", "14", "--samples", "10000",
            "--seed", "7", "-o", str(out),
        )
        assert code == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        z = rows[:, 0] + 1j * rows[:, 1]
        dist = np.abs(z - np.clip(z.real, -2, 2))
        assert dist.max() < 1e-3

    def test_seed_required_for_sampling(self, capsys):
        code, out, err = run_cli(
            capsys, "julia", "-p", "0,0,1", "-n", "20", "--samples", "100"
        )
        assert code == 2

    def test_exceptional_basepoint_exit_4(self, capsys, tmp_path):
        code, out, err = run_cli(
            capsys,
            "julia", "-p", "0,0,1", "-n", "4", "-z", "0",
            "-o", str(tmp_path / "x.csv"),
        )
        assert code == 4

    def test_raster_output(self, capsys, tmp_path):
        out = tmp_path / "cloud.csv"
        pgm = tmp_path / "img.pgm"
        code, rep = run_json(
            capsys,
            "julia", "-p", "0,0,1", "-n", "10", "-z", "1", "-o", str(out),
            "--raster", str(pgm), "--bbox", "-1.5,1.5,-1.5,1.5",
            "--width", "64", "--height", "48",
        )
        assert code == 0
        blob = pgm.read_bytes()
        assert blob.startswith(b"P5\n64 48\n255\n")
        assert len(blob) == len(b"P5\n64 48\n255\n") + 64 * 48


class TestMeasure:
    def test_gap(self, capsys):
        code, rep = run_json(
            capsys,
            "measure", "gap", "-p", "0,0,1", "-x", "2", "-y", "3",
            "-n", "12", "--threshold", "0.02",
        )
        assert code == 0
        assert rep["gap"] < 0.02
        assert rep["exact"]

    def test_gap_exceptional_exit_4(self, capsys):
        code, out, err = run_cli(
            capsys,
            "measure", "gap", "-p", "0,0,1", "-x", "0", "-y", "3", "-n", "4",
        )
        assert code == 4

    def test_cesaro_massgap(self, capsys):
        code, rep = run_json(
            capsys, "measure", "cesaro-massgap", "-p", "0,0,1", "-n", "4"
        )
        assert code == 0
        assert rep["bound"] == pytest.approx(0.4)
        assert rep["observed_tv"] <= rep["bound"] + 1e-9

    def test_duality(self, capsys):
        code, rep = run_json(
            capsys,
            "measure", "duality", "-p", "0.5,0,1,1", "--cases", "25",
            "--seed", "11",
        )
        assert code == 0
        assert rep["max_residual"] < 1e-8

    def test_mixing(self, capsys):
        code, rep = run_json(
            capsys,
            "measure", "mixing", "-p", "0,0,1", "-x", "1", "--depth", "12",
            "--nmax", "6", "--threshold", "0.02",
        )
        assert code == 0
        assert rep["max_correlation"] < 0.02

    def test_lyubich(self, capsys):
        code, rep = run_json(
            capsys,
            "measure", "lyubich", "-p", "-1,0,1", "--center", "3",
            "--radius", "0.05", "--nmax", "12", "--branches", "400",
            "--seed", "1",
        )
        assert code == 0
        fitted = rep["fitted"]
        assert abs(fitted["slope_log10"] - (-0.5 * math.log(2))) < 0.15
        assert fitted["fraction_within"] >= 0.9


class TestLinearize:
    def test_koenigs_series_csv(self, capsys, tmp_path):
        out = tmp_path / "series.csv"
        code, rep = run_json(
            capsys,
            "linearize", "-p", "0,0.5,1", "-N", "12", "--series-out", str(out),
        )
        assert code == 0
        assert rep["command"] == "linearize koenigs"
        assert rep["residual"] < 1e-8
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "k,re,im"
        k2 = rows[3].split(",")
        assert float(k2[1]) == pytest.approx(4.0, abs=1e-9)

    def test_siegel_golden_quadratic(self, capsys):
        code, rep = run_json(
            capsys, "linearize", "--siegel", "golden", "-p", "quad", "-N", "40"
        )
        assert code == 0
        assert rep["residual"] < 1e-6
        assert rep["denominators_min"] > 0

    def test_cremer_certificates(self, capsys):
        code, rep = run_json(capsys, "linearize", "--cremer", "2,4")
        assert code == 0
        cert = rep["certificates"][0]
        assert cert["observed"] <= cert["bound"] <= math.pi + 1e-12

    def test_diophantine_golden(self, capsys):
        code, rep = run_json(
            capsys,
            "linearize", "--diophantine", "0.5,2,10000", "--theta", "golden",
        )
        assert code == 0
        assert rep["margin"] >= 0.5

    def test_petal(self, capsys):
        code, rep = run_json(
            capsys, "linearize", "-p", "0,1,1", "--petal", "--eps", "0.05"
        )
        assert code == 0
        assert rep["boundary_ok"]
        assert rep["eps_prime"] <= 0.05

    def test_resonance_exit_5(self, capsys):
        # multiplier 1 at the fixed point 0 cannot be linearized this way
        code, out, err = run_cli(capsys, "linearize", "-p", "0,1,1", "-N", "10")
        assert code == 5


class TestDisc:
    def test_denjoy_wolff_mobius(self, capsys):
        code, rep = run_json(capsys, "disc", "denjoy-wolff", "--mobius", "0.5")
        assert code == 0
        assert rep["kind"] == "boundary"
        assert rep["statistic"][0] == pytest.approx(1.0, abs=1e-6)

    def test_area_boundary_case(self, capsys):
        code, rep = run_json(capsys, "disc", "area", "--tail", "0,1")
        assert code == 0
        assert rep["statistic"] == pytest.approx(1.0)
        assert rep["pass"]

    def test_area_violator_fails(self, capsys):
        code, rep = run_json(capsys, "disc", "area", "--tail", "0,2")
        assert code == 1
        assert not rep["pass"]

    def test_koebe_function(self, capsys):
        code, rep = run_json(
            capsys, "disc", "koebe", "--series", "koebe-function", "-N", "30"
        )
        assert code == 0
        assert rep["statistic"] == pytest.approx(2.0, abs=1e-12)
        assert rep["coverage_pass"]

    def test_schwarz_pick_random(self, capsys):
        code, rep = run_json(
            capsys,
            "disc", "schwarz-pick", "--map", "poly:0,0,1", "--pairs", "200",
            "--seed", "3",
        )
        assert code == 0
        assert rep["statistic"] <= 1 + 1e-10

    def test_not_self_map_exit_6(self, capsys):
        code, out, err = run_cli(
            capsys, "disc", "denjoy-wolff", "--map", "poly:0,2"
        )
        assert code == 6


class TestConfig:
    def test_config_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("period=2\n")
        code, rep = run_json(
            capsys, "classify", "--config", str(cfg), "-p", "-1,0,1"
        )
        assert code == 0
        assert rep["period_max"] == 2

    def test_command_line_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("period=2\n")
        code, rep = run_json(
            capsys,
            "classify", "--config", str(cfg), "-p", "-1,0,1", "--period", "1",
        )
        assert code == 0
        assert rep["period_max"] == 1


class TestDeterminism:
    def seeded_commands(self, tmp_path):
        return [
            (
                "julia", "-p", "-1,0,1", "-n", "8", "--samples", "500",
                "--seed", "42", "-o", str(tmp_path / "a.csv"),
            ),
            (
                "julia", "-p", "0,0,1", "-n", "10", "-z", "1",
                "-o", str(tmp_path / "b.csv"),
            ),
            (
                "measure", "lyubich", "-p", "0,0,1", "--center", "2",
                "--radius", "0.1", "--nmax", "6", "--branches", "100",
                "--seed", "9",
            ),
            ("measure", "duality", "-p", "0,0,1", "--cases", "10", "--seed", "5"),
            (
                "disc", "schwarz-pick", "--map", "poly:0,0.5,0.3",
                "--pairs", "50", "--seed", "2",
            ),
        ]

    def test_byte_identical_repeats(self, capsys, tmp_path):
        for argv in self.seeded_commands(tmp_path):
            code1, out1, _ = run_cli(capsys, *argv)
            files1 = {
                p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
            }
            code2, out2, _ = run_cli(capsys, *argv)
            files2 = {
                p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
            }
            assert code1 == code2 == 0
            assert out1 == out2
            assert files1 == files2
