"""HTTP front-end for the matching toolkit.

Thin endpoint layer: requests are validated by the schemas, converted to
core types, and dispatched to the pure functions in the core package.
Domain violations surface as 422 responses with the core error message.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..estimators import estimate
from ..genmodel import (
    STREAM_DATA,
    STREAM_INSTANCE,
    counterexample_instance,
    experiment1_instance,
    experiment2_instance,
    rep_seed,
    sample_dataset,
)
from ..harness import detection_heatmap, run_trials
from ..separation import compute_separation, threshold_lsl, threshold_lsns, threshold_mild
from .schemas import (
    DatasetModel,
    EvaluateRequest,
    EvaluateResponse,
    ExperimentRequest,
    ExperimentResponse,
    GenerateRequest,
    GenerateResponse,
    HeatmapModel,
    InstanceParamsModel,
    MatchRequest,
    MatchResponse,
    SeparationRequest,
    SeparationResponse,
    MildThresholdsModel,
    TrialReportModel,
)

app = FastAPI(
    title="matchmap",
    version=__version__,
    description="Matching-map estimation: assignment-based matchers, "
    "separation thresholds, and Monte-Carlo detection experiments.",
)


def _domain(call, *args, **kwargs):
    try:
        return call(*args, **kwargs)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/match", response_model=MatchResponse)
def match(request: MatchRequest) -> MatchResponse:
    data = _domain(request.to_dataset)
    result = _domain(estimate, request.method, data)
    return MatchResponse(
        method=request.method,
        assignment=[int(j) + 1 for j in result.assignment],
        objective=result.objective,
    )


# the request seed is a master seed: instance features and observation noise
# draw from separate derived streams (same convention as harness repetition 0)
_GENERATORS = {
    "exp1": lambda r: experiment1_instance(
        r.n, r.m, r.d, rep_seed(r.seed, 0, STREAM_INSTANCE)
    ),
    "exp2": lambda r: experiment2_instance(r.n, r.m, r.d, r.a, r.b),
    "counterexample": lambda r: counterexample_instance(r.n, r.d),
}


@app.post("/generate", response_model=GenerateResponse)
def generate(request: GenerateRequest) -> GenerateResponse:
    params = _domain(_GENERATORS[request.spec], request)
    dataset = _domain(sample_dataset, params, rep_seed(request.seed, 0, STREAM_DATA))
    return GenerateResponse(
        params=InstanceParamsModel.from_params(params),
        dataset=DatasetModel.from_dataset(dataset),
        seed=request.seed,
    )


@app.post("/separation", response_model=SeparationResponse)
def separation(request: SeparationRequest) -> SeparationResponse:
    params = _domain(request.params.to_params)
    report = _domain(compute_separation, params)
    noise = params.noise_levels
    r_sigma = float(noise.max() / noise.min())
    mild = _domain(threshold_mild, params.n, params.m, params.d, request.alpha, r_sigma)
    lsl = None
    if request.alpha < 0.5:
        lsl = _domain(threshold_lsl, params.n, params.m, params.d, request.alpha)
    return SeparationResponse(
        kappa_in_in=report.kappa_in_in,
        kappa_in_out=report.kappa_in_out,
        alpha=request.alpha,
        threshold_lsns=_domain(threshold_lsns, params.n, params.m, params.d, request.alpha),
        threshold_lsl=lsl,
        mild=MildThresholdsModel(t_in_in=mild.t_in_in, t_in_out=mild.t_in_out, r_sigma=r_sigma),
    )


@app.post("/evaluate", response_model=EvaluateResponse)
def evaluate(request: EvaluateRequest) -> EvaluateResponse:
    n = len(request.truth)
    if len(request.assignment) != n:
        raise HTTPException(
            status_code=422,
            detail=f"matching maps have different domains: {len(request.assignment)} != {n}",
        )
    for name, values in (("assignment", request.assignment), ("truth", request.truth)):
        if any(j < 1 for j in values):
            raise HTTPException(status_code=422, detail=f"{name} must use 1-based indices")
        if len(set(values)) != n:
            raise HTTPException(status_code=422, detail=f"{name} is not injective")
    loss = sum(1 for a, b in zip(request.assignment, request.truth) if a != b)
    return EvaluateResponse(
        hamming_loss=loss, normalized_loss=loss / n, exact_match=loss == 0
    )


@app.post("/experiment", response_model=ExperimentResponse)
def experiment(request: ExperimentRequest) -> ExperimentResponse:
    config = _domain(request.to_config)
    if request.a_grid is not None:
        heatmap = _domain(detection_heatmap, config, request.a_grid, request.b_grid)
        return ExperimentResponse(heatmap=HeatmapModel.from_heatmap(heatmap))
    report = _domain(run_trials, config)
    return ExperimentResponse(report=TrialReportModel.from_report(report))
