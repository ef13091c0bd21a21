"""
Scenario config schema for MTLC
Pydantic models for run configs and their validation messages
"""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.enums import AllocationMode, InputKind, KernelKind, OutputKind, SpectrumMethod
from models.errors import ScenarioConfigError
from models.spectrum_models import InputDist, KernelSpec


class KernelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: KernelKind = Field(..., description="Covariance function")
    lengthscale: float = Field(default=1.0, gt=0, description="Kernel lengthscale l")
    smoothness: Optional[float] = Field(default=None, ge=0, description="Override of r")
    eigenvalues: List[float] = Field(default_factory=list, description="Degenerate kernels only")

    def to_spec(self) -> KernelSpec:
        return KernelSpec(self.kind, self.lengthscale, self.smoothness, tuple(self.eigenvalues))


class InputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: InputKind = Field(..., description="Input distribution")
    variance: float = Field(default=1.0, gt=0, description="Gaussian input variance")
    lo: float = Field(default=0.0, description="Uniform interval start")
    hi: float = Field(default=1.0, description="Uniform interval end")

    @model_validator(mode="after")
    def check_interval(self):
        if self.kind == InputKind.UNIFORM and not self.lo < self.hi:
            raise ValueError(f"uniform interval needs lo < hi, got [{self.lo}, {self.hi}]")
        return self

    def to_dist(self) -> InputDist:
        return InputDist(self.kind, self.variance, self.lo, self.hi)


class SpectrumConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    M: int = Field(default=512, ge=1, description="Eigenvalues computed")
    method: SpectrumMethod = Field(default=SpectrumMethod.AUTO)
    nodes: Optional[int] = Field(default=None, ge=1, description="Nystrom quadrature nodes")
    tail_tol: Optional[float] = Field(default=None, gt=0, lt=1, description="Truncation tolerance; MTLC_TAIL_TOL when omitted")


class EquicorrelatedConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    T: int = Field(..., ge=1, description="Number of tasks")
    rho: Optional[float] = Field(default=None, description="Off-diagonal correlation in [-1, 1]")
    rho2: Optional[List[float]] = Field(default=None, description="Sweep over squared correlations")

    @model_validator(mode="after")
    def check_one_correlation(self):
        if (self.rho is None) == (self.rho2 is None):
            raise ValueError("give exactly one of rho or rho2")
        if self.rho is not None and not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"correlation out of range: rho={self.rho} not in [-1, 1]")
        if self.rho2 is not None:
            if not self.rho2:
                raise ValueError("rho2 sweep must not be empty")
            bad = [value for value in self.rho2 if not 0.0 <= value <= 1.0]
            if bad:
                raise ValueError(f"correlation out of range: rho2 values {bad} not in [0, 1]")
        return self

    def rho_values(self) -> List[float]:
        if self.rho is not None:
            return [self.rho]
        return [value ** 0.5 for value in self.rho2]


class TaskCovarianceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: Optional[List[List[float]]] = Field(default=None, description="Explicit D")
    equicorrelated: Optional[EquicorrelatedConfig] = None

    @model_validator(mode="after")
    def check_one_spec(self):
        if (self.matrix is None) == (self.equicorrelated is None):
            raise ValueError("give exactly one of matrix or equicorrelated")
        return self

    @property
    def T(self) -> int:
        return len(self.matrix) if self.matrix is not None else self.equicorrelated.T


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_grid: Optional[List[float]] = Field(default=None, description="Defaults to the scenario grid")
    test_points: Optional[int] = Field(default=None, ge=1)
    allocation: AllocationMode = Field(default=AllocationMode.ORDERED)


class GainSweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: float = Field(..., gt=0, description="Total examples for the simulated sweep")
    rho2: List[float] = Field(..., min_length=1)
    prediction_n: List[float] = Field(default_factory=list, description="Extra prediction-only n values")
    simulate: bool = True


class ManyTaskConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    T: List[int] = Field(..., min_length=1, description="Task counts for predictions")
    rho2: float = Field(..., ge=0, le=1)
    simulate_T: Optional[int] = Field(default=None, ge=1)
    simulate_grid: List[float] = Field(default_factory=list)
    simulate_replicas: Optional[int] = Field(default=None, ge=2)


class ToleranceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    solver_tol: Optional[float] = Field(default=None, gt=0)
    max_iter: Optional[int] = Field(default=None, ge=1)
    pd_tol: Optional[float] = Field(default=None, gt=0)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    description: str = ""
    kernel: KernelConfig
    input: InputConfig
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    task_covariance: Optional[TaskCovarianceConfig] = None
    noise: Union[float, List[float]] = Field(..., description="Scalar broadcasts to all tasks")
    fractions: List[float] = Field(default_factory=list)
    n_grid: List[float] = Field(default_factory=list)
    report_tasks: List[int] = Field(default_factory=lambda: [0], description="0-based task indices")
    outputs: List[OutputKind] = Field(..., min_length=1)
    seed: Optional[int] = Field(default=None, ge=0)
    replicas: Optional[int] = Field(default=None, ge=2)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    gain_sweep: Optional[GainSweepConfig] = None
    many_task: Optional[ManyTaskConfig] = None
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)

    @model_validator(mode="after")
    def check_sections(self):
        needs_D = {OutputKind.PREDICT, OutputKind.SIMULATE, OutputKind.ASYMPTOTIC}
        if needs_D & set(self.outputs) and self.task_covariance is None:
            raise ValueError("task_covariance is required for predict, simulate and asymptotic outputs")
        if OutputKind.GAIN_SWEEP in self.outputs and self.gain_sweep is None:
            raise ValueError("gain_sweep output needs a gain_sweep section")
        if OutputKind.MANY_TASK in self.outputs and self.many_task is None:
            raise ValueError("many_task output needs a many_task section")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    description: str = ""
    seed: Optional[int] = Field(default=None, ge=0)
    replicas: Optional[int] = Field(default=None, ge=2)
    scenarios: List[ScenarioConfig] = Field(default_factory=list)


def format_validation_error(error: ValidationError) -> List[str]:
    """Render pydantic errors as 'dotted.key.path: message'"""
    messages = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        messages.append(f"{path}: {item['msg']}")
    return messages


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a config dict or raise ScenarioConfigError with key paths"""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        violations = format_validation_error(e)
        raise ScenarioConfigError(f"invalid config: {len(violations)} violation(s)", violations) from e
