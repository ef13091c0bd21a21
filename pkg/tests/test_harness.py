"""
Tests for the scenario schema, runner and writers
"""

import copy
import json
import logging
import math

import numpy as np
import pandas as pd
import pytest

from config.enums import OutputKind
from config.settings import Settings
from core.spectra import se_gaussian_spectrum, truncate
from harness.runner import (
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    EXIT_SCENARIO_FAILED,
    ScenarioRunner,
    bundled_configs,
    load_config,
)
from harness.schema import parse_run_config
from models.errors import ScenarioConfigError

TINY_SCENARIO = {
    "name": "tiny",
    "kernel": {"kind": "squared_exponential", "lengthscale": 0.3},
    "input": {"kind": "gaussian", "variance": 1.0},
    "spectrum": {"M": 64},
    "task_covariance": {"equicorrelated": {"T": 2, "rho2": [0.0, 0.5, 1.0]}},
    "noise": 0.05,
    "fractions": [0.25, 0.75],
    "n_grid": [1, 2, 5, 10],
    "outputs": ["predict", "simulate"],
    "simulation": {"test_points": 64},
}


def make_config(*scenarios, name="tiny_run", replicas=4, seed=7):
    return {"name": name, "seed": seed, "replicas": replicas, "scenarios": [copy.deepcopy(s) for s in scenarios]}


def write_config(tmp_path, config, filename="config.json"):
    path = tmp_path / filename
    path.write_text(json.dumps(config), encoding="utf-8")
    return str(path)


@pytest.fixture
def runner():
    return ScenarioRunner(Settings())


class TestSchema:
    def test_bundled_configs_parse(self):
        names = set(bundled_configs())
        assert {"fig1_left", "fig1_mid", "fig1_right", "fig2_left_gain", "fig2_right_manytasks"} <= names
        for name in names:
            assert load_config(name).scenarios

    def test_aliases(self):
        assert load_config("fig2_right").name == "fig2_right_manytasks"
        assert load_config("fig2_left").name == "fig2_left_gain"

    def test_correlation_out_of_range(self):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["task_covariance"] = {"equicorrelated": {"T": 2, "rho": 1.2}}
        with pytest.raises(ScenarioConfigError) as info:
            parse_run_config(make_config(scenario))
        assert any("correlation out of range" in v for v in info.value.violations)
        assert any(v.startswith("scenarios.0.task_covariance.equicorrelated") for v in info.value.violations)

    def test_exactly_one_task_covariance(self):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["task_covariance"]["matrix"] = [[1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(ScenarioConfigError) as info:
            parse_run_config(make_config(scenario))
        assert any("exactly one of matrix or equicorrelated" in v for v in info.value.violations)

    def test_unknown_and_missing_keys(self):
        scenario = copy.deepcopy(TINY_SCENARIO)
        del scenario["kernel"]
        scenario["colour"] = "blue"
        with pytest.raises(ScenarioConfigError) as info:
            parse_run_config(make_config(scenario))
        paths = [v.split(":")[0] for v in info.value.violations]
        assert "scenarios.0.kernel" in paths
        assert "scenarios.0.colour" in paths

    def test_missing_sections(self):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["outputs"] = ["gain_sweep"]
        with pytest.raises(ScenarioConfigError) as info:
            parse_run_config(make_config(scenario))
        assert any("gain_sweep section" in v for v in info.value.violations)

    def test_unreadable_config(self, tmp_path):
        with pytest.raises(ScenarioConfigError):
            load_config(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ScenarioConfigError):
            load_config(str(bad))


class TestValidate:
    @pytest.mark.parametrize("name", ["fig1_left", "fig1_mid", "fig1_right", "fig2_left_gain", "fig2_right_manytasks"])
    def test_bundled_configs_are_valid(self, runner, name):
        report = runner.validate(name)
        assert report["valid"]
        assert report["violations"] == []

    def test_fractions_must_sum_to_one(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["fractions"] = [0.5, 0.6]
        report = runner.validate(write_config(tmp_path, make_config(scenario)))
        assert not report["valid"]
        assert any("sum to 1" in v for v in report["violations"])

    def test_semantic_checks(self, runner, tmp_path):
        indefinite = copy.deepcopy(TINY_SCENARIO)
        indefinite["name"] = "indefinite"
        indefinite["task_covariance"] = {"matrix": [[1.0, 2.0], [2.0, 1.0]]}
        unsorted = copy.deepcopy(TINY_SCENARIO)
        unsorted["name"] = "unsorted"
        unsorted["n_grid"] = [1, 5, 5]
        unsorted["noise"] = [0.05, 0.05, 0.05]
        report = runner.validate(write_config(tmp_path, make_config(indefinite, unsorted)))
        violations = report["violations"]
        assert any(v.startswith("scenarios.0.task_covariance") and "negative eigenvalue" in v for v in violations)
        assert any(v.startswith("scenarios.1.n_grid") and "strictly ascending" in v for v in violations)
        assert any(v.startswith("scenarios.1.noise") for v in violations)

    def test_singular_D_must_be_poolable(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        s = 1.0 / math.sqrt(2.0)
        scenario["task_covariance"] = {"matrix": [[1.0, 0.0, s], [0.0, 1.0, s], [s, s, 1.0]]}
        scenario["fractions"] = [0.2, 0.3, 0.5]
        report = runner.validate(write_config(tmp_path, make_config(scenario)))
        assert any("cannot pool" in v for v in report["violations"])

    def test_duplicate_names(self, runner, tmp_path):
        report = runner.validate(write_config(tmp_path, make_config(TINY_SCENARIO, TINY_SCENARIO)))
        assert any("duplicate scenario name 'tiny'" in v for v in report["violations"])

    def test_settings_are_checked(self, tmp_path):
        settings = Settings()
        settings.max_workers = 0
        runner = ScenarioRunner(settings)
        config = write_config(tmp_path, make_config(TINY_SCENARIO))
        report = runner.validate(config)
        assert not report["valid"]
        assert "settings: MTLC_MAX_WORKERS must be at least 1" in report["violations"]
        assert runner.run(config, str(tmp_path / "out"))["status"] == EXIT_INVALID_CONFIG


class TestRun:
    def test_curves_csv(self, runner, tmp_path):
        result = runner.run(write_config(tmp_path, make_config(TINY_SCENARIO)), str(tmp_path / "out"))
        assert result["status"] == EXIT_OK
        csv = tmp_path / "out" / "tiny_run" / "tiny__curves.csv"
        frame = pd.read_csv(csv)
        assert list(frame.columns) == ["n", "rho2", "eps1_pred", "eps1_sim", "eps1_stderr"]
        assert len(frame) == 12
        assert sorted(frame["rho2"].unique()) == [0.0, 0.5, 1.0]
        for _, group in frame.groupby("rho2"):
            assert np.all(np.diff(group["eps1_pred"].to_numpy()) <= 0)
            assert np.all(group["eps1_stderr"] >= 0)

    def test_reruns_are_byte_identical(self, runner, tmp_path):
        config = write_config(tmp_path, make_config(TINY_SCENARIO))
        first = runner.run(config, str(tmp_path / "a"))
        second = runner.run(config, str(tmp_path / "b"))
        from_manifest = runner.run(first["manifest"], str(tmp_path / "c"))
        assert first["status"] == second["status"] == from_manifest["status"] == EXIT_OK
        reference = (tmp_path / "a" / "tiny_run" / "tiny__curves.csv").read_bytes()
        assert (tmp_path / "b" / "tiny_run" / "tiny__curves.csv").read_bytes() == reference
        assert (tmp_path / "c" / "tiny_run" / "tiny__curves.csv").read_bytes() == reference

    def test_manifest_contents(self, runner, tmp_path):
        result = runner.run(write_config(tmp_path, make_config(TINY_SCENARIO)), str(tmp_path), seed=123)
        manifest = json.loads((tmp_path / "tiny_run" / "manifest.json").read_text(encoding="utf-8"))
        scenario = manifest["config"]["scenarios"][0]
        assert scenario["seed"] == 123
        assert scenario["replicas"] == 4
        assert {"numpy", "scipy", "pandas", "pydantic", "python"} <= set(manifest["provenance"]["versions"])
        assert manifest["scenarios"][0]["status"] == "ok"
        assert "spectrum" in manifest["scenarios"][0]["timings"]
        assert result["manifest"].endswith("manifest.json")

    def test_seed_changes_simulation_only(self, runner, tmp_path):
        config = write_config(tmp_path, make_config(TINY_SCENARIO))
        runner.run(config, str(tmp_path / "a"), seed=1)
        runner.run(config, str(tmp_path / "b"), seed=2)
        a = pd.read_csv(tmp_path / "a" / "tiny_run" / "tiny__curves.csv")
        b = pd.read_csv(tmp_path / "b" / "tiny_run" / "tiny__curves.csv")
        np.testing.assert_array_equal(a["eps1_pred"], b["eps1_pred"])
        assert not np.array_equal(a["eps1_sim"], b["eps1_sim"])

    def test_only_filter(self, runner, tmp_path):
        result = runner.run(write_config(tmp_path, make_config(TINY_SCENARIO)), str(tmp_path),
                            only=[OutputKind.PREDICT])
        frame = pd.read_csv(result["files"][0])
        assert list(frame.columns) == ["n", "rho2", "eps1_pred"]

    def test_empty_scenario_list(self, runner, tmp_path):
        out = tmp_path / "out"
        result = runner.run(write_config(tmp_path, make_config()), str(out))
        assert result["status"] == EXIT_OK
        assert result["files"] == []
        assert not out.exists()

    def test_invalid_config_exit_status(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["fractions"] = [0.5, 0.6]
        result = runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path / "out"))
        assert result["status"] == EXIT_INVALID_CONFIG
        assert not (tmp_path / "out").exists()

    def test_failing_scenario_is_isolated(self, runner, tmp_path):
        failing = copy.deepcopy(TINY_SCENARIO)
        failing["name"] = "failing"
        failing["outputs"] = ["predict"]
        failing["tolerances"] = {"max_iter": 1}
        result = runner.run(write_config(tmp_path, make_config(failing, TINY_SCENARIO)), str(tmp_path))
        assert result["status"] == EXIT_SCENARIO_FAILED
        assert result["failed"] == ["failing"]
        assert (tmp_path / "tiny_run" / "tiny__curves.csv").exists()
        assert not (tmp_path / "tiny_run" / "failing__curves.csv").exists()
        manifest = json.loads((tmp_path / "tiny_run" / "manifest.json").read_text(encoding="utf-8"))
        failed = [s for s in manifest["scenarios"] if s["name"] == "failing"][0]
        assert failed["status"] == "failed"
        assert "SolverConvergenceError" in failed["error"]

    def test_asymptotic_output(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["outputs"] = ["asymptotic"]
        scenario["n_grid"] = [10, 1000, 100000]
        runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path))
        frame = pd.read_csv(tmp_path / "tiny_run" / "tiny__asymptotic.csv")
        assert list(frame.columns) == ["n", "rho2", "eps1_solver", "eps1_asym", "eps1_power", "gain1",
                                       "asymptotic_valid"]
        last = frame[frame["n"] == 100000]
        assert last["asymptotic_valid"].all()
        np.testing.assert_allclose(last["eps1_asym"], last["eps1_solver"], rtol=0.05)

    def test_gain_sweep_output(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        del scenario["task_covariance"]
        scenario["outputs"] = ["gain_sweep"]
        scenario["gain_sweep"] = {"n": 10, "rho2": [0.0, 0.5, 1.0], "prediction_n": [100]}
        runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path))
        frame = pd.read_csv(tmp_path / "tiny_run" / "tiny__gain_sweep.csv")
        assert list(frame.columns) == ["n", "rho2", "eps1_pred", "r_pred", "eps1_sim", "eps1_stderr", "r_sim"]
        assert len(frame) == 6
        assert frame.loc[frame["n"] == 100, "eps1_sim"].isna().all()
        assert frame.loc[frame["n"] == 10, "eps1_sim"].notna().all()
        np.testing.assert_allclose(frame.loc[frame["rho2"] == 0.0, "r_pred"], 1.0)

    def test_many_task_output(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        del scenario["task_covariance"]
        scenario["outputs"] = ["many_task"]
        scenario["n_grid"] = [1, 2, 4, 8]
        scenario["many_task"] = {"T": [5], "rho2": 0.8, "simulate_T": 3, "simulate_grid": [1, 2, 4, 8]}
        runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path))
        frame = pd.read_csv(tmp_path / "tiny_run" / "tiny__many_task.csv")
        assert list(frame.columns) == ["T", "n", "eps_pred", "stage1", "stage2", "plateau", "eps_sim", "eps_stderr"]
        assert sorted(frame["T"].unique()) == [3, 5]
        spectrum = truncate(se_gaussian_spectrum(0.3, 1.0, 64), runner.settings.tail_tol)
        expected = (1.0 - math.sqrt(0.8)) * spectrum.trace
        np.testing.assert_allclose(frame["plateau"], expected, rtol=1e-12)
        assert frame.loc[frame["T"] == 3, "eps_sim"].notna().all()
        assert frame.loc[frame["T"] == 5, "eps_sim"].isna().all()

    def test_default_tail_tolerance_truncates(self, runner, tmp_path):
        runner.run(write_config(tmp_path, make_config(TINY_SCENARIO)), str(tmp_path), only=[OutputKind.PREDICT])
        manifest = json.loads((tmp_path / "tiny_run" / "manifest.json").read_text(encoding="utf-8"))
        spectrum = manifest["scenarios"][0]["spectrum"]
        assert spectrum["M"] < 64
        assert spectrum["tail_mass"] < runner.settings.tail_tol * (spectrum["trace"] + spectrum["tail_mass"])

    def test_explicit_tail_tolerance_wins(self, runner, tmp_path):
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["spectrum"] = {"M": 64, "tail_tol": 1e-3}
        runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path), only=[OutputKind.PREDICT])
        manifest = json.loads((tmp_path / "tiny_run" / "manifest.json").read_text(encoding="utf-8"))
        default = truncate(se_gaussian_spectrum(0.3, 1.0, 64), runner.settings.tail_tol)
        assert manifest["scenarios"][0]["spectrum"]["M"] < default.M

    def test_unreachable_default_tolerance_keeps_spectrum(self, runner, tmp_path, caplog, monkeypatch):
        monkeypatch.setattr(logging.getLogger("MTLC"), "propagate", True)
        scenario = copy.deepcopy(TINY_SCENARIO)
        scenario["kernel"] = {"kind": "ornstein_uhlenbeck", "lengthscale": 0.1}
        scenario["input"] = {"kind": "uniform", "lo": 0.0, "hi": 1.0}
        scenario["spectrum"] = {"M": 50}
        with caplog.at_level("WARNING"):
            result = runner.run(write_config(tmp_path, make_config(scenario)), str(tmp_path),
                                only=[OutputKind.PREDICT])
        assert result["status"] == EXIT_OK
        manifest = json.loads((tmp_path / "tiny_run" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["scenarios"][0]["spectrum"]["M"] == 50
        assert "keeping all M=50 eigenvalues" in caplog.text

    def test_list_scenarios(self, runner):
        listing = runner.list_scenarios()
        assert listing["fig2_left_gain"] == ["se_uniform_sweep", "ou_uniform_sweep"]
        assert listing["fig2_right_manytasks"] == ["se_gaussian_many"]
