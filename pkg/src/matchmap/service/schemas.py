"""Request/response models for the matching service.

These mirror the core domain types with plain JSON-friendly payloads. All
indices crossing the wire are 1-based; the core works 0-based. Unknown
fields are rejected so config typos fail loudly.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..estimators import Dataset
from ..genmodel import InstanceParams
from ..harness import (
    CounterexampleSpec,
    Experiment1Spec,
    Experiment2Spec,
    ExplicitParamsSpec,
    Heatmap,
    TrialConfig,
    TrialReport,
)

MethodName = Literal["greedy", "lss", "lsns", "lsl"]
GeneratorName = Literal["exp1", "exp2", "counterexample"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InstanceParamsModel(StrictModel):
    theta_sharp: list[list[float]]
    sigma_sharp: list[float]
    pi_star: list[int] = Field(description="1-based injective map of queries into references")
    n: int | None = None
    m: int | None = None
    d: int | None = None

    def to_params(self) -> InstanceParams:
        params = InstanceParams(
            features=np.asarray(self.theta_sharp, dtype=np.float64),
            noise_levels=np.asarray(self.sigma_sharp, dtype=np.float64),
            true_map=np.asarray(self.pi_star, dtype=np.intp) - 1,
        )
        for name in ("n", "m", "d"):
            declared = getattr(self, name)
            if declared is not None and declared != getattr(params, name):
                raise ValueError(f"declared {name}={declared} does not match arrays")
        return params

    @classmethod
    def from_params(cls, params: InstanceParams) -> "InstanceParamsModel":
        return cls(**params.to_dict())


class DatasetModel(StrictModel):
    x: list[list[float]]
    x_sharp: list[list[float]]
    sigma: list[float] | None = None
    sigma_sharp: list[float] | None = None

    def to_dataset(self) -> Dataset:
        return Dataset(
            query=np.asarray(self.x, dtype=np.float64),
            reference=np.asarray(self.x_sharp, dtype=np.float64),
            query_noise=None if self.sigma is None else np.asarray(self.sigma),
            reference_noise=None if self.sigma_sharp is None else np.asarray(self.sigma_sharp),
        )

    @classmethod
    def from_dataset(cls, data: Dataset) -> "DatasetModel":
        return cls(
            x=data.query.tolist(),
            x_sharp=data.reference.tolist(),
            sigma=None if data.query_noise is None else data.query_noise.tolist(),
            sigma_sharp=None if data.reference_noise is None else data.reference_noise.tolist(),
        )


class MatchRequest(StrictModel):
    x: list[list[float]]
    x_sharp: list[list[float]]
    method: MethodName
    sigma: list[float] | None = None
    sigma_sharp: list[float] | None = None

    def to_dataset(self) -> Dataset:
        return DatasetModel(
            x=self.x, x_sharp=self.x_sharp, sigma=self.sigma, sigma_sharp=self.sigma_sharp
        ).to_dataset()


class MatchResponse(StrictModel):
    method: MethodName
    assignment: list[int] = Field(description="1-based reference index per query")
    objective: float


class GenerateRequest(StrictModel):
    spec: GeneratorName
    n: int
    d: int
    m: int | None = None
    a: float | None = None
    b: float | None = None
    seed: int = 0

    @model_validator(mode="after")
    def _check_spec_args(self):
        if self.spec == "exp2" and (self.a is None or self.b is None):
            raise ValueError("exp2 requires both spacings a and b")
        if self.spec == "counterexample":
            if self.m is not None and self.m != self.n + 1:
                raise ValueError("the counterexample instance fixes m = n + 1")
        elif self.m is None:
            raise ValueError(f"{self.spec} requires an explicit m")
        return self


class GenerateResponse(StrictModel):
    params: InstanceParamsModel
    dataset: DatasetModel
    seed: int


class SeparationRequest(StrictModel):
    params: InstanceParamsModel
    alpha: float = 0.05


class MildThresholdsModel(StrictModel):
    t_in_in: float
    t_in_out: float
    r_sigma: float


class SeparationResponse(StrictModel):
    kappa_in_in: float
    kappa_in_out: float | None
    alpha: float
    threshold_lsns: float
    threshold_lsl: float | None = Field(
        description="absent when alpha >= 1/2, outside this threshold's validity"
    )
    mild: MildThresholdsModel


class EvaluateRequest(StrictModel):
    assignment: list[int] = Field(description="1-based estimated map")
    truth: list[int] = Field(description="1-based true map")


class EvaluateResponse(StrictModel):
    hamming_loss: int
    normalized_loss: float
    exact_match: bool


class ExperimentInstanceModel(StrictModel):
    kind: Literal["exp1", "exp2", "counterexample", "explicit"]
    a: float | None = None
    b: float | None = None
    params: InstanceParamsModel | None = None

    def to_spec(self):
        if self.kind == "exp1":
            return Experiment1Spec()
        if self.kind == "exp2":
            if self.a is None or self.b is None:
                raise ValueError("exp2 instance requires both spacings a and b")
            return Experiment2Spec(a=self.a, b=self.b)
        if self.kind == "counterexample":
            return CounterexampleSpec()
        if self.params is None:
            raise ValueError("explicit instance requires params")
        return ExplicitParamsSpec(params=self.params.to_params())


class ExperimentRequest(StrictModel):
    instance: ExperimentInstanceModel
    methods: list[MethodName]
    n: int
    m: int
    d: int
    reps: int
    alpha: float = 0.05
    seed: int = 0
    a_grid: list[float] | None = None
    b_grid: list[float] | None = None

    @model_validator(mode="after")
    def _check_grid(self):
        if (self.a_grid is None) != (self.b_grid is None):
            raise ValueError("a_grid and b_grid must be given together")
        if self.a_grid is not None and self.instance.kind != "exp2":
            raise ValueError("grid sweeps are defined for the exp2 instance only")
        if self.instance.kind == "exp2" and self.a_grid is None:
            if self.instance.a is None or self.instance.b is None:
                raise ValueError("single exp2 runs require spacings a and b")
        return self

    def to_config(self) -> TrialConfig:
        if self.instance.kind == "exp2" and self.a_grid is not None:
            # grid cells supply (a, b); base spacings are placeholders
            spec = Experiment2Spec(a=self.a_grid[0], b=self.b_grid[0])
        else:
            spec = self.instance.to_spec()
        return TrialConfig(
            instance_spec=spec,
            methods=tuple(self.methods),
            n=self.n,
            m=self.m,
            d=self.d,
            reps=self.reps,
            alpha=self.alpha,
            master_seed=self.seed,
        )


class MethodStatsModel(StrictModel):
    error_count: int
    error_rate: float
    wilson_low: float
    wilson_high: float
    mean_hamming: float


class KappaPairModel(StrictModel):
    kappa_in_in: float
    kappa_in_out: float | None


class TrialReportModel(StrictModel):
    reps: int
    methods: dict[str, MethodStatsModel]
    kappas: list[KappaPairModel] | None = None

    @classmethod
    def from_report(cls, report: TrialReport) -> "TrialReportModel":
        return cls(**report.to_dict())


class HeatmapModel(StrictModel):
    a_grid: list[float]
    b_grid: list[float]
    cells: dict[str, list[list[float]]]

    @classmethod
    def from_heatmap(cls, heatmap: Heatmap) -> "HeatmapModel":
        return cls(**heatmap.to_dict())

    def to_heatmap(self) -> Heatmap:
        return Heatmap(
            a_grid=tuple(self.a_grid),
            b_grid=tuple(self.b_grid),
            cells={name: np.asarray(grid) for name, grid in self.cells.items()},
        )


class ExperimentResponse(StrictModel):
    report: TrialReportModel | None = None
    heatmap: HeatmapModel | None = None
