"""End-to-end tests of the command-line client."""

import json

import pytest

from subnyq.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, build_parser, main


@pytest.fixture()
def rd_config(tmp_path):
    cfg = {
        "scenario": "rd",
        "model": {"tone_grid_size": 64, "active_count": 3},
        "sampler": {"rate": 16},
        "trials": 3,
        "seed": 5,
    }
    path = tmp_path / "rd.json"
    path.write_text(json.dumps(cfg))
    return path


class TestSimulate:
    def test_writes_outputs_and_exits_zero(self, rd_config, tmp_path, capsys):
        out = tmp_path / "results"
        code = main(["simulate", "rd", "--config", str(rd_config), "--out", str(out)])
        assert code == EXIT_OK
        trials = (out / "trials.csv").read_text()
        assert trials.splitlines()[0] == "trial,support_exact,support_jaccard,nmse,failure"
        summary = json.loads((out / "summary.json").read_text())
        assert summary["success_rate"] == 1.0
        assert "success_rate" in capsys.readouterr().out

    def test_reruns_are_byte_identical(self, rd_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["simulate", "rd", "--config", str(rd_config), "--out", str(out1)])
        main(["simulate", "rd", "--config", str(rd_config), "--out", str(out2)])
        assert (out1 / "trials.csv").read_bytes() == (out2 / "trials.csv").read_bytes()

    def test_trials_and_seed_overrides(self, rd_config, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "simulate",
                "rd",
                "--config",
                str(rd_config),
                "--trials",
                "5",
                "--seed",
                "9",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert len((out / "trials.csv").read_text().splitlines()) == 6

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        code = main(["simulate", "rd", "--config", str(tmp_path / "nope.json")])
        assert code == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_invalid_json_is_config_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["simulate", "rd", "--config", str(path)]) == EXIT_CONFIG

    def test_schema_violation_is_config_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"scenario": "rd", "model": {"bogus": 1}}))
        code = main(["simulate", "rd", "--config", str(path)])
        assert code == EXIT_CONFIG
        assert "bogus" in capsys.readouterr().err

    def test_scenario_mismatch_is_config_error(self, rd_config):
        assert main(["simulate", "fri", "--config", str(rd_config)]) == EXIT_CONFIG

    def test_unwritable_output_is_io_error(self, rd_config, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code = main(
            ["simulate", "rd", "--config", str(rd_config), "--out", str(blocker / "sub")]
        )
        assert code == EXIT_IO
        assert "i/o error" in capsys.readouterr().err

    def test_usage_error_is_config_error(self, capsys):
        assert main(["simulate", "warp"]) == EXIT_CONFIG
        capsys.readouterr()


class TestBounds:
    def test_prints_record(self, tmp_path, capsys):
        cfg = {
            "scenario": "bounds",
            "model": {"band_count": 6, "band_width": 50e6, "f_max": 5e9},
            "sampler": {"channels": 35, "chips_per_period": 195, "f_p": 51e6},
        }
        path = tmp_path / "bounds.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "out"
        code = main(["bounds", "--config", str(path), "--out", str(out)])
        assert code == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert body["landau"] == pytest.approx(300e6)
        assert (out / "bounds.csv").read_text().splitlines()[0].startswith("nyquist,")

    def test_simulate_config_reusable(self, rd_config):
        # bounds accepts a generic config by keeping only model/sampler
        assert main(["bounds", "--config", str(rd_config)]) == EXIT_CONFIG  # rd model


class TestDensity:
    def test_writes_table(self, tmp_path, capsys):
        out = tmp_path / "d"
        code = main(
            [
                "density",
                "--pattern-seed",
                "3",
                "--chips",
                "9",
                "--densities",
                "1,2,5,10,50,100",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        lines = (out / "density.csv").read_text().splitlines()
        assert lines[0] == "density,max_error"
        assert len(lines) == 7
        capsys.readouterr()

    def test_bad_density_list(self, capsys):
        assert main(["density", "--densities", "1,two"]) == EXIT_CONFIG
        capsys.readouterr()


class TestMismatch:
    def test_writes_table(self, tmp_path, capsys):
        out = tmp_path / "m"
        code = main(["mismatch", "--deltas", "0,0.1,0.25,0.5", "--out", str(out)])
        assert code == EXIT_OK
        lines = (out / "mismatch.csv").read_text().splitlines()
        assert lines[0] == "delta,nmse"
        assert len(lines) == 5
        capsys.readouterr()

    def test_out_of_range_delta(self, capsys):
        assert main(["mismatch", "--deltas", "0.75"]) == EXIT_CONFIG
        capsys.readouterr()


class TestHelp:
    def test_columns_documented(self, capsys):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--help"])
        text = capsys.readouterr().out
        assert "support_jaccard" in text
        assert "density.csv" in text


class TestEntryPoint:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == EXIT_OK
        capsys.readouterr()


class TestConsoleScript:
    def test_cross_process_byte_determinism(self, rd_config, tmp_path):
        # two separate interpreter processes must produce identical bytes
        import subprocess
        import sys

        outs = []
        for name in ("p1", "p2"):
            out = tmp_path / name
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "subnyq.cli",
                    "simulate",
                    "rd",
                    "--config",
                    str(rd_config),
                    "--out",
                    str(out),
                ],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            outs.append((out / "trials.csv").read_bytes())
        assert outs[0] == outs[1]
