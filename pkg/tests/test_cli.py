"""CLI surface tests: parsing, exit codes, file output determinism."""

import json

import pytest

from nonlocal_lab import cli
from nonlocal_lab.errors import EmptySample
from nonlocal_lab.harnack import CSV_COLUMNS


def run_main(argv):
    return cli.main(argv)


class TestParsing:
    def test_harnack_run_flags(self):
        spec = cli.parse_args(
            "harnack run --x1 -2 --x2 2 --r 1 --R 16 --s 0.5 "
            "--data random --samples 20 --seed 7".split())
        assert spec.subcommand == "harnack"
        a = spec.args
        assert a.action == "run"
        assert (a.x1, a.x2, a.r, a.R) == (-2.0, 2.0, 1.0, 16.0)
        assert a.s == 0.5 and a.data == "random"
        assert a.samples == 20 and a.seed == 7

    def test_missing_s_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            cli.parse_args("harnack run --x1 -2 --x2 2 --r 1".split())
        assert err.value.code == 2

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            cli.parse_args(["frobnicate"])
        assert err.value.code == 2

    def test_sweep_grid_flag(self):
        spec = cli.parse_args(
            "harnack sweep --s-grid 0.5,0.7,0.9,0.95 --normalize-1ms"
            .split())
        assert spec.args.s_grid == "0.5,0.7,0.9,0.95"
        assert spec.args.normalize_1ms

    def test_data_spec_grammar(self):
        assert cli.parse_data("const:2.5")(0.0) == 2.5
        assert cli.parse_data("indicator:1,3")(2.0) == 1.0
        far = cli.parse_data("far:-1,16")
        assert far(17.0) == -1.0 and far(0.0) == 0.0
        pw = cli.parse_data("pieces:0,1,5;2,3,7")
        assert pw(0.5) == 5.0 and pw(2.5) == 7.0 and pw(1.5) == 0.0
        for bad in ("nope:1", "indicator:1", "pieces:a,b,c"):
            with pytest.raises(Exception):
                cli.parse_data(bad)


class TestExitCodes:
    def test_success_is_zero(self, capsys):
        assert run_main(["poisson", "eval", "--s", "0.5"]) == 0
        capsys.readouterr()

    def test_config_violation_is_three(self, capsys):
        code = run_main("harnack run --x1 0 --x2 1 --r 1 --R 16 --s 0.5 "
                        "--N 16 --samples 2".split())
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_experiment_failure_is_one(self, capsys, monkeypatch):
        def boom(spec):
            raise EmptySample("nothing to aggregate")
        monkeypatch.setattr(cli, "execute", boom)
        assert run_main(["selftest"]) == 1
        assert "nothing to aggregate" in capsys.readouterr().err


class TestEvalL:
    def test_json_payload(self, tmp_path):
        out = tmp_path / "L.json"
        code = run_main(["evalL", "--s", "0.25", "--barrier", "w1",
                         "--x", "-2.0", "--out", str(out)])
        assert code == 0
        d = json.loads(out.read_text())
        assert set(d) >= {"value", "error_bound", "remainder_bound",
                          "truncation_radius", "kernel", "barrier"}
        spot = 4.0 * (5.0 ** -0.5 - 3.0 ** -0.5)
        assert d["value"] == pytest.approx(spot, abs=1e-8)


class TestSolve1d:
    def test_json_roundtrip(self, tmp_path):
        out = tmp_path / "u.json"
        code = run_main(["solve1d", "--s", "0.5", "--N", "16",
                         "--domain=-1,1", "--data", "indicator:1,3",
                         "--out", str(out)])
        assert code == 0
        d = json.loads(out.read_text())
        assert len(d["centers"]) == len(d["values"]) == 16
        assert all(v > 0.0 for v in d["values"])

    def test_csv_shape(self, tmp_path):
        out = tmp_path / "u.csv"
        run_main(["solve1d", "--s", "0.5", "--N", "8", "--domain=-1,1",
                  "--data", "indicator:1,3", "--format", "csv",
                  "--out", str(out)])
        lines = out.read_text().splitlines()
        assert lines[0] == "center,value"
        assert len(lines) == 9

    def test_dump_matrix(self, tmp_path):
        out = tmp_path / "sys.json"
        run_main(["solve1d", "--s", "0.5", "--N", "8", "--domain=-1,1",
                  "--data", "indicator:1,3", "--dump-matrix",
                  "--out", str(out)])
        d = json.loads(out.read_text())
        assert len(d["matrix"]) == 8 and len(d["matrix"][0]) == 8
        assert len(d["rhs"]) == 8


class TestHarnackCommands:
    def test_run_json_schema_and_value(self, tmp_path):
        out = tmp_path / "h.json"
        code = run_main("harnack run --s 0.5 --data random --samples 20 "
                        "--seed 7 --N 64".split() + ["--out", str(out)])
        assert code == 0
        d = json.loads(out.read_text())
        assert d["C_max"] == pytest.approx(2.0767064913609086, rel=1e-10)
        assert len(d["reports"]) == 20
        assert set(d["reports"][0]) == {
            "config", "s", "kernel", "sup", "inf", "avg", "tail_term",
            "C_estimate", "seed", "N", "sample_id"}

    def test_run_csv_rows(self, tmp_path):
        out = tmp_path / "h.csv"
        run_main("harnack run --s 0.5 --data random --samples 5 --seed 7 "
                 "--N 16 --format csv".split() + ["--out", str(out)])
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 6

    def test_sweep_csv_one_row_per_sample(self, tmp_path):
        out = tmp_path / "sweep.csv"
        run_main("harnack sweep --s-grid 0.3,0.5 --samples 3 --N 16 "
                 "--grid 11 --format csv".split() + ["--out", str(out)])
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 3
        keys = [tuple(float(v) for v in ln.split(",")[:2])
                for ln in lines[1:]]
        assert keys == [(0.3, 0), (0.3, 1), (0.3, 2),
                        (0.5, 0), (0.5, 1), (0.5, 2)]

    def test_repeat_invocations_are_byte_identical(self, tmp_path):
        argv = ("harnack run --s 0.5 --data random --samples 4 --seed 3 "
                "--N 16".split())
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_main(argv + ["--out", str(a)])
        run_main(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_mp_payload(self, tmp_path):
        out = tmp_path / "mp.json"
        code = run_main("harnack mp --s 0.25 --N 64".split()
                        + ["--out", str(out)])
        assert code == 0
        d = json.loads(out.read_text())
        assert d["min_u"] < 0.0 < d["tail_term"]
        assert d["C_empirical"] == pytest.approx(
            -d["min_u"] / d["tail_term"])

    def test_barrier_payload(self, tmp_path):
        out = tmp_path / "b.json"
        code = run_main("harnack barrier --s 0.25 --grid 11".split()
                        + ["--out", str(out)])
        assert code == 0
        d = json.loads(out.read_text())
        assert d["c0_max"] > 0.0
        assert d["Lw1_min"] < 0.0


class TestConfigFile:
    def test_file_supplies_geometry_and_N(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("n = 1\nx1 = -2\nx2 = 2\nr = 1\nR = 16\nN = 16\n")
        out = tmp_path / "h.json"
        run_main(["harnack", "run", "--config", str(cfg), "--s", "0.5",
                  "--samples", "2", "--out", str(out)])
        d = json.loads(out.read_text())
        assert d["reports"][0]["N"] == 16
        assert d["reports"][0]["config"]["R"] == 16.0

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("n = 1\nx1 = -2\nx2 = 2\nr = 1\nR = 16\nN = 16\n")
        out = tmp_path / "h.json"
        run_main(["harnack", "run", "--config", str(cfg), "--R", "32",
                  "--s", "0.5", "--samples", "2", "--N", "8",
                  "--out", str(out)])
        d = json.loads(out.read_text())
        assert d["reports"][0]["config"]["R"] == 32.0
        assert d["reports"][0]["N"] == 8
