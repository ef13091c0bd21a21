"""
Scenario runner for MTLC
Loads run configs, orchestrates spectra, predictions and simulations, writes results
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.enums import OutputKind
from config.logging_config import get_logger, log_error, log_scenario_event
from config.settings import Settings, settings as default_settings
from core.asymptotics import asymptotic_errors, many_task_curve, multitask_gain, power_law_errors
from core.simulator import gain_sweep, simulate_curve
from core.solver import learning_curve, pool_tasks
from core.spectra import kernel_spectrum, truncate
from models.errors import LearningCurveError, ScenarioConfigError, SpectrumError
from models.simulation_models import SimulationOptions
from models.spectrum_models import KernelSpectrum
from models.task_models import SolverOptions, equicorrelated
from utils.seeding import scenario_key
from utils.validators import SetupValidator
from .schema import RunConfig, ScenarioConfig, parse_run_config
from .writers import package_versions, write_manifest, write_table

logger = get_logger(__name__)

BUNDLED_DIR = Path(__file__).parent / "configs"

# short names used in docs and on the command line
BUNDLED_ALIASES = {
    "fig2_left": "fig2_left_gain",
    "fig2_right": "fig2_right_manytasks",
}

EXIT_OK = 0
EXIT_SCENARIO_FAILED = 1
EXIT_INVALID_CONFIG = 2


def bundled_configs() -> Dict[str, Path]:
    """Bundled config names mapped to their files"""
    return {path.stem: path for path in sorted(BUNDLED_DIR.glob("*.json"))}


def load_config(source: str) -> RunConfig:
    """Load a config from a bundled name, a JSON file or a run manifest"""
    bundled = bundled_configs()
    name = BUNDLED_ALIASES.get(str(source), str(source))
    path = bundled.get(name, Path(source))
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise ScenarioConfigError(f"config not found: {source}", [f"<root>: no such file or bundled config '{source}'"]) from e
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(f"config is not valid JSON: {source}", [f"<root>: {e}"]) from e

    # a manifest carries the resolved config under "config"
    if isinstance(data, dict) and "config" in data and "provenance" in data:
        data = data["config"]
    return parse_run_config(data)


def _task_matrices(scenario: ScenarioConfig) -> List[Tuple[float, np.ndarray]]:
    """(rho2 label, D) per curve; the label is NaN for an explicit matrix"""
    spec = scenario.task_covariance
    if spec.matrix is not None:
        return [(float("nan"), np.asarray(spec.matrix, dtype=float))]
    equi = spec.equicorrelated
    return [(rho * rho if equi.rho2 is None else rho2, equicorrelated(equi.T, rho))
            for rho, rho2 in zip(equi.rho_values(), equi.rho2 or [None])]


def _noise_vector(scenario: ScenarioConfig, T: int) -> np.ndarray:
    if isinstance(scenario.noise, list):
        return np.asarray(scenario.noise, dtype=float)
    return np.full(T, float(scenario.noise))


def semantic_violations(config: RunConfig) -> List[str]:
    """Checks beyond the schema: D, fractions, noise and grids; no computation"""
    violations = []
    validator = SetupValidator()
    names = [scenario.name for scenario in config.scenarios]
    for name in sorted({n for n in names if names.count(n) > 1}):
        violations.append(f"scenarios: duplicate scenario name '{name}'")

    for i, scenario in enumerate(config.scenarios):
        prefix = f"scenarios.{i}"
        outputs = set(scenario.outputs)

        noise = scenario.noise if isinstance(scenario.noise, list) else [scenario.noise]
        if any(value <= 0 for value in noise):
            violations.append(f"{prefix}.noise: noise variances must be positive")

        if scenario.task_covariance is not None:
            T = scenario.task_covariance.T
            for rho2, D in _task_matrices(scenario):
                result = validator.validate_task_covariance(D)
                where = f"{prefix}.task_covariance" + ("" if np.isnan(rho2) else f" (rho2={rho2:g})")
                violations.extend(f"{where}: {message}" for message in result["errors"])
                if result["valid"] and result["warnings"]:
                    try:
                        pool_tasks(0.5 * (D + D.T), default_settings.pd_tol)
                    except LearningCurveError as e:
                        violations.append(f"{where}: {e}")

            if isinstance(scenario.noise, list) and len(scenario.noise) != T:
                violations.append(f"{prefix}.noise: expected {T} entries, got {len(scenario.noise)}")
            if len(scenario.fractions) != T:
                violations.append(f"{prefix}.fractions: expected {T} entries, got {len(scenario.fractions)}")
            else:
                violations.extend(f"{prefix}.fractions: {m}" for m in validator.validate_fractions(scenario.fractions)["errors"])
            bad_tasks = [t for t in scenario.report_tasks if not 0 <= t < T]
            if bad_tasks:
                violations.append(f"{prefix}.report_tasks: indices {bad_tasks} outside 0..{T - 1}")

        if outputs & {OutputKind.PREDICT, OutputKind.SIMULATE, OutputKind.ASYMPTOTIC, OutputKind.MANY_TASK}:
            violations.extend(f"{prefix}.n_grid: {m}" for m in validator.validate_grid(scenario.n_grid, strict=True)["errors"])
        if OutputKind.SIMULATE in outputs and scenario.simulation.n_grid is not None:
            violations.extend(f"{prefix}.simulation.n_grid: {m}"
                              for m in validator.validate_grid(scenario.simulation.n_grid, strict=True)["errors"])

        if OutputKind.GAIN_SWEEP in outputs:
            if len(scenario.fractions) != 2:
                violations.append(f"{prefix}.fractions: gain_sweep needs two task fractions")
            bad = [value for value in scenario.gain_sweep.rho2 if not 0.0 <= value <= 1.0]
            if bad:
                violations.append(f"{prefix}.gain_sweep.rho2: correlation out of range: {bad}")

        if OutputKind.MANY_TASK in outputs:
            if isinstance(scenario.noise, list):
                violations.append(f"{prefix}.noise: many_task needs a scalar noise level")
            many = scenario.many_task
            if many.simulate_T is not None:
                violations.extend(f"{prefix}.many_task.simulate_grid: {m}"
                                  for m in validator.validate_grid(many.simulate_grid, strict=True)["errors"])

    return violations


class ScenarioRunner:
    """Runs every scenario of a config and records provenance"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or default_settings

    def validate(self, source: str) -> Dict[str, Any]:
        """Schema and semantic checks as a report"""
        try:
            config = load_config(source)
        except ScenarioConfigError as e:
            return {"valid": False, "violations": e.violations or [str(e)]}
        violations = [f"settings: {issue}" for issue in self.settings.validate()["issues"]]
        violations += semantic_violations(config)
        return {"valid": len(violations) == 0, "violations": violations, "scenarios": len(config.scenarios)}

    def resolve(self, config: RunConfig, seed: Optional[int] = None, replicas: Optional[int] = None,
                only: Optional[Sequence[OutputKind]] = None) -> RunConfig:
        """Fill seeds and replica counts per scenario and apply the output filter"""
        scenarios = []
        for scenario in config.scenarios:
            outputs = [kind for kind in scenario.outputs if only is None or kind in set(only)]
            scenarios.append(scenario.model_copy(update={
                "seed": seed if seed is not None else (scenario.seed if scenario.seed is not None
                                                       else config.seed if config.seed is not None
                                                       else self.settings.default_seed),
                "replicas": replicas if replicas is not None else (scenario.replicas or config.replicas
                                                                   or self.settings.default_replicas),
                "outputs": outputs,
            }))
        return config.model_copy(update={"scenarios": scenarios})

    def run(self, source: str, out_dir: Optional[str] = None, seed: Optional[int] = None,
            replicas: Optional[int] = None, only: Optional[Sequence[OutputKind]] = None) -> Dict[str, Any]:
        """Run all scenarios; failures are isolated per scenario"""
        try:
            config = load_config(source)
        except ScenarioConfigError as e:
            log_error(e, f"Loading config {source}")
            return {"status": EXIT_INVALID_CONFIG, "violations": e.violations, "files": []}

        violations = [f"settings: {issue}" for issue in self.settings.validate()["issues"]]
        violations += semantic_violations(config)
        if violations:
            for message in violations:
                logger.error(f"Config violation - {message}")
            return {"status": EXIT_INVALID_CONFIG, "violations": violations, "files": []}

        if not config.scenarios:
            logger.info(f"Config {config.name} has no scenarios; nothing to do")
            return {"status": EXIT_OK, "violations": [], "files": []}

        resolved = self.resolve(config, seed, replicas, only)
        target = Path(out_dir or self.settings.output_dir) / resolved.name
        started = time.perf_counter()

        active = [s for s in resolved.scenarios if s.outputs]
        workers = max(1, min(self.settings.max_workers, len(active) or 1))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(lambda s: self._run_scenario(s, target), active))

        files = [f for report in reports for f in report["files"]]
        failed = [report["name"] for report in reports if report["status"] == "failed"]
        manifest = {
            "config": resolved.model_dump(mode="json"),
            "provenance": {
                "created": datetime.now().isoformat(timespec="seconds"),
                "source": str(source),
                "versions": package_versions(),
                "settings": self.settings.to_dict(),
                "elapsed": time.perf_counter() - started,
            },
            "scenarios": reports,
        }
        manifest_path = write_manifest(manifest, target)

        status = EXIT_SCENARIO_FAILED if failed else EXIT_OK
        logger.info(f"Run {resolved.name} finished: {len(files)} files, {len(failed)} failed scenario(s)")
        return {"status": status, "violations": [], "files": files,
                "manifest": str(manifest_path), "failed": failed}

    def _run_scenario(self, scenario: ScenarioConfig, target: Path) -> Dict[str, Any]:
        report = {"name": scenario.name, "status": "ok", "files": [], "timings": {}, "error": None}
        log_scenario_event(scenario.name, "started", {"outputs": [o.value for o in scenario.outputs]})
        try:
            t0 = time.perf_counter()
            spectrum = self._spectrum(scenario)
            report["timings"]["spectrum"] = time.perf_counter() - t0
            report["spectrum"] = spectrum.to_dict()

            tables = {}
            outputs = set(scenario.outputs)
            if outputs & {OutputKind.PREDICT, OutputKind.SIMULATE}:
                tables["curves"] = self._timed(report, "curves", self._curves, scenario, spectrum)
            if OutputKind.ASYMPTOTIC in outputs:
                tables["asymptotic"] = self._timed(report, "asymptotic", self._asymptotic, scenario, spectrum)
            if OutputKind.GAIN_SWEEP in outputs:
                tables["gain_sweep"] = self._timed(report, "gain_sweep", self._gain_sweep, scenario, spectrum)
            if OutputKind.MANY_TASK in outputs:
                tables["many_task"] = self._timed(report, "many_task", self._many_task, scenario, spectrum)

            for kind, frame in tables.items():
                path = write_table(frame, target / f"{scenario.name}__{kind}.csv")
                report["files"].append(str(path))
            log_scenario_event(scenario.name, "completed", {"files": len(report["files"])})
        except Exception as e:
            log_error(e, f"Scenario {scenario.name}")
            report["status"] = "failed"
            report["error"] = f"{type(e).__name__}: {e}"
        return report

    def _spectrum(self, scenario: ScenarioConfig) -> KernelSpectrum:
        """Scenario spectrum; without an explicit tail_tol the settings default is applied when reachable"""
        spec = scenario.spectrum
        spectrum = kernel_spectrum(scenario.kernel.to_spec(), scenario.input.to_dist(), spec.M,
                                   spec.method, spec.nodes, spec.tail_tol)
        if spec.tail_tol is not None:
            return spectrum
        try:
            return truncate(spectrum, self.settings.tail_tol)
        except SpectrumError as e:
            logger.warning(f"Scenario {scenario.name}: keeping all M={spectrum.M} eigenvalues - {e}")
            return spectrum

    @staticmethod
    def _timed(report, key, fn, *args):
        t0 = time.perf_counter()
        result = fn(*args)
        report["timings"][key] = time.perf_counter() - t0
        return result

    def _solver_opts(self, scenario: ScenarioConfig) -> SolverOptions:
        tol = scenario.tolerances
        return SolverOptions.from_settings(self.settings, tol=tol.solver_tol, max_iter=tol.max_iter,
                                           pd_tol=tol.pd_tol)

    def _sim_opts(self, scenario: ScenarioConfig, replicas: Optional[int] = None) -> SimulationOptions:
        return SimulationOptions.from_settings(
            self.settings,
            replicas=replicas or scenario.replicas,
            seed=scenario.seed,
            scenario_id=scenario_key(scenario.name),
            allocation=scenario.simulation.allocation,
            test_points=scenario.simulation.test_points,
        )

    def _curves(self, scenario: ScenarioConfig, spectrum: KernelSpectrum) -> pd.DataFrame:
        T = scenario.task_covariance.T
        noise = _noise_vector(scenario, T)
        tasks = scenario.report_tasks
        frames = []

        if OutputKind.PREDICT in scenario.outputs:
            rows = []
            for rho2, D in _task_matrices(scenario):
                for n, result in learning_curve(spectrum, D, noise, scenario.fractions, scenario.n_grid,
                                                self._solver_opts(scenario)):
                    row = {"n": n, "rho2": rho2}
                    row.update({f"eps{t + 1}_pred": result.eps[t] for t in tasks})
                    rows.append(row)
            frames.append(pd.DataFrame(rows))

        if OutputKind.SIMULATE in scenario.outputs:
            grid = scenario.simulation.n_grid or scenario.n_grid
            rows = []
            for rho2, D in _task_matrices(scenario):
                for n, estimate in simulate_curve(scenario.kernel.to_spec(), scenario.input.to_dist(), D,
                                                  noise, scenario.fractions, grid,
                                                  self._sim_opts(scenario), tasks):
                    row = {"n": float(n), "rho2": rho2}
                    for k, t in enumerate(tasks):
                        row[f"eps{t + 1}_sim"] = estimate.eps_hat[k]
                        row[f"eps{t + 1}_stderr"] = estimate.stderr[k]
                    rows.append(row)
            frames.append(pd.DataFrame(rows))

        frame = frames[0]
        for other in frames[1:]:
            frame = frame.merge(other, on=["rho2", "n"], how="outer")

        columns = ["n", "rho2"]
        for t in tasks:
            columns += [c for c in (f"eps{t + 1}_pred", f"eps{t + 1}_sim", f"eps{t + 1}_stderr")
                        if c in frame.columns]
        return frame.sort_values(["rho2", "n"], kind="mergesort").reset_index(drop=True)[columns]

    def _asymptotic(self, scenario: ScenarioConfig, spectrum: KernelSpectrum) -> pd.DataFrame:
        T = scenario.task_covariance.T
        noise = _noise_vector(scenario, T)
        tasks = scenario.report_tasks
        rows = []
        outside = 0
        for rho2, D in _task_matrices(scenario):
            report = multitask_gain(spectrum, D, noise, scenario.fractions)
            for n, result in learning_curve(spectrum, D, noise, scenario.fractions, scenario.n_grid,
                                            self._solver_opts(scenario)):
                asym = asymptotic_errors(spectrum, D, noise, scenario.fractions, n, warn=False)
                power = power_law_errors(spectrum, D, noise, scenario.fractions, n)
                valid = bool(np.all(asym[tasks] <= 0.1 * noise[tasks]))
                outside += not valid
                row = {"n": n, "rho2": rho2}
                for t in tasks:
                    row[f"eps{t + 1}_solver"] = result.eps[t]
                    row[f"eps{t + 1}_asym"] = asym[t]
                    row[f"eps{t + 1}_power"] = power[t]
                    row[f"gain{t + 1}"] = report.gains[t]
                row["asymptotic_valid"] = valid
                rows.append(row)
        if outside:
            logger.warning(f"Scenario {scenario.name}: {outside} grid point(s) outside the asymptotic range")
        return pd.DataFrame(rows)

    def _gain_sweep(self, scenario: ScenarioConfig, spectrum: KernelSpectrum) -> pd.DataFrame:
        sweep = scenario.gain_sweep
        noise = _noise_vector(scenario, 2)
        kernel, dist = scenario.kernel.to_spec(), scenario.input.to_dist()
        rows = []
        for n in [sweep.n] + [m for m in sweep.prediction_n if m != sweep.n]:
            simulate = sweep.simulate and n == sweep.n
            for row in gain_sweep(kernel, dist, noise, scenario.fractions, n, sweep.rho2,
                                  replicas=scenario.replicas if simulate else 0, seed=scenario.seed,
                                  spectrum=spectrum, solver_opts=self._solver_opts(scenario),
                                  scenario_id=scenario_key(scenario.name),
                                  workers=self.settings.max_workers):
                rows.append({"n": float(n), "rho2": row.rho2, "eps1_pred": row.eps1_pred,
                             "r_pred": row.r_pred, "eps1_sim": row.eps1_sim,
                             "eps1_stderr": row.eps1_stderr, "r_sim": row.r_sim})
        return pd.DataFrame(rows)

    def _many_task(self, scenario: ScenarioConfig, spectrum: KernelSpectrum) -> pd.DataFrame:
        many = scenario.many_task
        rho = many.rho2 ** 0.5
        noise = float(scenario.noise)
        task_counts = list(dict.fromkeys(many.T + ([many.simulate_T] if many.simulate_T else [])))

        rows = []
        for T in task_counts:
            for point in many_task_curve(spectrum, rho, T, noise, scenario.n_grid, self._solver_opts(scenario)):
                rows.append({"T": T, "n": point.n, "eps_pred": point.eps, "stage1": point.stage1,
                             "stage2": point.stage2, "plateau": point.plateau})
        frame = pd.DataFrame(rows)

        if many.simulate_T:
            T = many.simulate_T
            curve = simulate_curve(scenario.kernel.to_spec(), scenario.input.to_dist(), equicorrelated(T, rho),
                                   np.full(T, noise), np.full(T, 1.0 / T), many.simulate_grid,
                                   self._sim_opts(scenario, many.simulate_replicas), tasks=[0])
            sim = pd.DataFrame([{"T": T, "n": float(n), "eps_sim": e.eps_hat[0], "eps_stderr": e.stderr[0]}
                                for n, e in curve])
            frame = frame.merge(sim, on=["T", "n"], how="outer")
            frame["plateau"] = frame["plateau"].fillna((1.0 - rho) * spectrum.trace)
            frame = frame.sort_values(["T", "n"], kind="mergesort").reset_index(drop=True)
        return frame

    def list_scenarios(self) -> Dict[str, List[str]]:
        """Bundled config names and the scenarios in each"""
        listing = {}
        for name in bundled_configs():
            try:
                listing[name] = [s.name for s in load_config(name).scenarios]
            except ScenarioConfigError as e:
                log_error(e, f"Bundled config {name}")
                listing[name] = []
        return listing

