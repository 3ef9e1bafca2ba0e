# src/tests/experiment_tests/test_cli.py

import json

import pytest

from scripts.run_experiment import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from src.tests.test_data import CHI_N8
from src.utils.logger import WorkbenchLogger
from src.utils.reporting import ReportUtils


def _write_config(directory, name, payload):
    path = directory / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


@pytest.mark.cli
class TestRunnerExitCodes:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_success_writes_artifacts(self, workdir):
        self.logger.info("=== Testing runner success path ===")
        code = main(["spectrum", "--out", str(workdir), "--quiet"])
        assert code == EXIT_OK
        assert (workdir / "spectrum.csv").is_file()
        summary = json.loads((workdir / "spectrum_summary.json").read_text(encoding="utf-8"))
        assert summary["passed"] is True
        assert summary["config"]["seed"] == 1234
        assert summary["config_sha256"] == ReportUtils.read_csv(workdir / "spectrum.csv")["config_sha256"]

    def test_summary_table_printed(self, workdir, capsys):
        assert main(["spectrum", "--out", str(workdir)]) == EXIT_OK
        assert "spectrum summary" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "payload",
        [
            {"experiment": "gaps", "bogus": 1},
            {"experiment": "gaps", "n": 1},
            {"experiment": "spectrum"},
            {"experiment": "gaps", "dt": 10.0, "steps": 5},
        ],
    )
    def test_config_errors_exit_one(self, workdir, tmp_path, capsys, payload):
        config = _write_config(tmp_path, "gaps.json", payload)
        assert main(["gaps", "--config", config, "--out", str(workdir), "--quiet"]) == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err
        assert not (workdir / "gaps.csv").exists()

    def test_missing_config_file(self, workdir, tmp_path):
        missing = str(tmp_path / "absent.yaml")
        assert main(["kp-check", "--config", missing, "--out", str(workdir)]) == EXIT_CONFIG

    def test_unknown_experiment_rejected_by_parser(self):
        with pytest.raises(SystemExit):
            main(["lyapunov"])

    def test_runaway_trajectory_exits_two(self, workdir, tmp_path, capsys):
        """A quartic coefficient of the wrong sign sends a large state to infinity"""
        config = _write_config(
            tmp_path,
            "simulate.json",
            {"n": 4, "model": "fpu", "beta": -10.0, "amplitude": 5.0, "dt": 0.1, "steps": 2000},
        )
        assert main(["simulate", "--config", config, "--out", str(workdir), "--quiet"]) == EXIT_NUMERICAL
        assert "numerical failure" in capsys.readouterr().err


@pytest.mark.cli
class TestRunnerDeterminism:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_same_seed_same_bytes(self, tmp_path):
        config = _write_config(tmp_path, "gaps.json", {"n": 6, "steps": 300, "gap_every": 30})
        outputs = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert main(["gaps", "--config", config, "--out", str(out), "--seed", "7", "--quiet"]) == EXIT_OK
            outputs.append((out / "gaps.csv").read_bytes())
        assert outputs[0] == outputs[1]
        self.logger.info("✅ identical CSV bytes for identical seeds")

    def test_seed_changes_output(self, tmp_path):
        first, second = tmp_path / "seed1", tmp_path / "seed2"
        assert main(["spectrum", "--out", str(first), "--seed", "1", "--quiet"]) == EXIT_OK
        assert main(["spectrum", "--out", str(second), "--seed", "2", "--quiet"]) == EXIT_OK
        a = ReportUtils.read_csv(first / "spectrum.csv")
        b = ReportUtils.read_csv(second / "spectrum.csv")
        assert a["config_sha256"] != b["config_sha256"]
        assert a["rows"] != b["rows"]


@pytest.mark.cli
@pytest.mark.acceptance
class TestAcceptance:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_kp_check_passes(self, workdir, tmp_path):
        self.logger.info("=== Acceptance: majorant checks ===")
        config = tmp_path / "kp.yaml"
        config.write_text("experiment: kp-check\ntrials: 2\n", encoding="utf-8")
        assert main(["kp-check", "--config", str(config), "--out", str(workdir), "--quiet"]) == EXIT_OK
        summary = json.loads((workdir / "kp-check_summary.json").read_text(encoding="utf-8"))
        assert summary["results"]["passed"]

    def test_scaling_exponent(self, workdir):
        self.logger.info("=== Acceptance: small-divisor scaling ===")
        assert main(["scaling", "--out", str(workdir), "--quiet"]) == EXIT_OK
        summary = json.loads((workdir / "scaling_summary.json").read_text(encoding="utf-8"))
        assert summary["results"]["fitted_exponent"] == pytest.approx(2.0, abs=0.05)
        assert summary["results"]["residual_decreasing"]

        table = ReportUtils.read_csv(workdir / "scaling.csv")
        row_n8 = next(row for row in table["rows"] if row[0] == 8)
        assert row_n8[4] == pytest.approx(CHI_N8, abs=1e-4)

    def test_toda_gaps_conserved(self, workdir, tmp_path):
        self.logger.info("=== Acceptance: Toda gap conservation ===")
        config = _write_config(tmp_path, "gaps.json", {"n": 8, "steps": 2000, "gap_every": 200, "dt": 0.005})
        assert main(["gaps", "--config", config, "--out", str(workdir), "--quiet"]) == EXIT_OK
        summary = json.loads((workdir / "gaps_summary.json").read_text(encoding="utf-8"))
        drift = summary["results"]["max_gap_drift"]
        self.logger.numeric_check("max gap drift", drift, 1e-6)
        assert drift <= 1e-6
