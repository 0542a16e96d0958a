"""Monte-Carlo experiment runner.

Runs repeated draws from a ground-truth instance, applies the requested
matching estimators, and aggregates 0-1 errors and Hamming losses. Each
repetition derives its own seed from the master seed, so results are
bit-identical no matter how many workers execute the repetitions or in what
order. Grid sweeps over the deterministic collinear instance produce
detection-region heatmaps; all cells share the master seed (common random
numbers), which keeps trends across neighboring cells smooth.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimators import Dataset, Method, estimate
from .genmodel import (
    STREAM_DATA,
    STREAM_INSTANCE,
    InstanceParams,
    counterexample_instance,
    experiment1_instance,
    experiment2_instance,
    rep_seed,
    sample_dataset,
)
from .separation import compute_separation, hamming_loss

WORKERS_ENV = "MATCHMAP_THREADS"
_WILSON_Z95 = 1.959963984540054
# Dimension hypothesis of the hard-instance failure guarantee.
COUNTEREXAMPLE_DIM_FACTOR = 422.0
_MIN_PARALLEL_REPS = 16


@dataclass(frozen=True)
class Experiment1Spec:
    """Random Gaussian features with shifted outliers; fresh instance per rep."""

    kind: str = field(default="exp1", init=False)


@dataclass(frozen=True)
class Experiment2Spec:
    """Deterministic collinear instance with spacings (a, b)."""

    a: float
    b: float
    kind: str = field(default="exp2", init=False)


@dataclass(frozen=True)
class CounterexampleSpec:
    """Hard instance with matched geometric feature gaps and noise decay."""

    kind: str = field(default="counterexample", init=False)


@dataclass(frozen=True)
class ExplicitParamsSpec:
    """A caller-supplied ground-truth instance."""

    params: InstanceParams
    kind: str = field(default="explicit", init=False)


InstanceSpec = Experiment1Spec | Experiment2Spec | CounterexampleSpec | ExplicitParamsSpec


@dataclass(frozen=True)
class TrialConfig:
    instance_spec: InstanceSpec
    methods: tuple[Method, ...]
    n: int
    m: int
    d: int
    reps: int
    alpha: float
    master_seed: int

    def __post_init__(self):
        methods = tuple(Method.parse(m) if isinstance(m, str) else m for m in self.methods)
        if not methods:
            raise ValueError("at least one method is required")
        if len(set(methods)) != len(methods):
            raise ValueError("duplicate methods in config")
        object.__setattr__(self, "methods", methods)
        if self.reps < 1:
            raise ValueError("repetition count must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        spec = self.instance_spec
        if isinstance(spec, ExplicitParamsSpec):
            p = spec.params
            if (self.n, self.m, self.d) != (p.n, p.m, p.d):
                raise ValueError(
                    f"config sizes ({self.n},{self.m},{self.d}) do not match the "
                    f"explicit instance ({p.n},{p.m},{p.d})"
                )
        elif isinstance(spec, CounterexampleSpec):
            if self.m != self.n + 1:
                raise ValueError("the hard instance has exactly one outlier: m must be n + 1")
        elif isinstance(spec, (Experiment1Spec, Experiment2Spec)):
            if not self.m > self.n >= 1:
                raise ValueError(f"need m > n >= 1, got n={self.n}, m={self.m}")
        else:
            raise ValueError(f"unknown instance spec: {spec!r}")


@dataclass(frozen=True)
class MethodStats:
    error_count: int
    error_rate: float
    wilson_low: float
    wilson_high: float
    mean_hamming: float

    def to_dict(self) -> dict:
        return {
            "error_count": self.error_count,
            "error_rate": self.error_rate,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "mean_hamming": self.mean_hamming,
        }


@dataclass(frozen=True)
class TrialReport:
    reps: int
    stats: dict[str, MethodStats]
    kappas: tuple[tuple[float, float | None], ...] | None

    def __post_init__(self):
        for name, s in self.stats.items():
            if not 0 <= s.error_count <= self.reps:
                raise ValueError(f"{name}: error count outside [0, reps]")
            if not s.wilson_low <= s.error_rate <= s.wilson_high:
                raise ValueError(f"{name}: Wilson interval does not contain the error rate")

    def to_dict(self) -> dict:
        out = {
            "reps": self.reps,
            "methods": {name: s.to_dict() for name, s in self.stats.items()},
        }
        if self.kappas is not None:
            out["kappas"] = [
                {"kappa_in_in": a, "kappa_in_out": b} for a, b in self.kappas
            ]
        return out


@dataclass(frozen=True)
class Heatmap:
    a_grid: tuple[float, ...]
    b_grid: tuple[float, ...]
    cells: dict[str, np.ndarray]

    def __post_init__(self):
        shape = (len(self.a_grid), len(self.b_grid))
        for name, grid in self.cells.items():
            grid = np.asarray(grid, dtype=np.float64)
            if grid.shape != shape:
                raise ValueError(f"{name}: cell grid shape {grid.shape} != {shape}")
            if np.any(grid < 0) or np.any(grid > 1):
                raise ValueError(f"{name}: error rates must lie in [0, 1]")
            self.cells[name] = grid

    def to_dict(self) -> dict:
        return {
            "a_grid": list(self.a_grid),
            "b_grid": list(self.b_grid),
            "cells": {name: grid.tolist() for name, grid in self.cells.items()},
        }


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    # clamp against rounding so the interval always contains p
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


def worker_count() -> int:
    """Harness worker cap: MATCHMAP_THREADS, else the available parallelism."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is not None:
        count = int(raw)
        if count < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {count}")
        return count
    return os.cpu_count() or 1


def _instance_for_rep(config: TrialConfig, rep: int) -> InstanceParams:
    spec = config.instance_spec
    if isinstance(spec, Experiment1Spec):
        seed = rep_seed(config.master_seed, rep, STREAM_INSTANCE)
        return experiment1_instance(config.n, config.m, config.d, seed)
    if isinstance(spec, Experiment2Spec):
        return experiment2_instance(config.n, config.m, config.d, spec.a, spec.b)
    if isinstance(spec, CounterexampleSpec):
        return counterexample_instance(config.n, config.d)
    return spec.params


def _run_rep(config: TrialConfig, rep: int, params: InstanceParams | None):
    if params is None:
        params = _instance_for_rep(config, rep)
    data = sample_dataset(params, rep_seed(config.master_seed, rep, STREAM_DATA))
    if any(m is Method.LSNS for m in config.methods) and not data.has_noise_levels():
        raise ValueError("lsns requested but the instance carries no noise levels")
    results = []
    for method in config.methods:
        loss = hamming_loss(estimate(method, data).assignment, params.true_map)
        results.append((loss > 0, loss))
    kappas = None
    if isinstance(config.instance_spec, Experiment1Spec):
        report = compute_separation(params)
        kappas = (report.kappa_in_in, report.kappa_in_out)
    return rep, results, kappas


def _run_rep_block(config: TrialConfig, start: int, stop: int) -> list:
    params = None
    if not isinstance(config.instance_spec, Experiment1Spec):
        params = _instance_for_rep(config, start)
    return [_run_rep(config, rep, params) for rep in range(start, stop)]


def _collect_records(config: TrialConfig) -> list:
    workers = min(worker_count(), config.reps)
    if workers <= 1 or config.reps < _MIN_PARALLEL_REPS:
        return _run_rep_block(config, 0, config.reps)
    bounds = np.linspace(0, config.reps, workers + 1, dtype=int)
    records = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_rep_block, config, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for future in futures:
            records.extend(future.result())
    records.sort(key=lambda record: record[0])
    return records


def run_trials(config: TrialConfig) -> TrialReport:
    """Estimate 0-1 error rates and Hamming losses over seeded repetitions.

    The aggregate is a fold over per-repetition records in repetition order,
    so the report is identical for serial and parallel execution.
    """
    records = _collect_records(config)
    names = [m.value for m in config.methods]
    stats = {}
    for idx, name in enumerate(names):
        errors = sum(1 for _, results, _ in records if results[idx][0])
        mean_ham = sum(results[idx][1] for _, results, _ in records) / config.reps
        low, high = wilson_interval(errors, config.reps)
        stats[name] = MethodStats(
            error_count=errors,
            error_rate=errors / config.reps,
            wilson_low=low,
            wilson_high=high,
            mean_hamming=mean_ham,
        )
    kappas = None
    if isinstance(config.instance_spec, Experiment1Spec):
        kappas = tuple(record[2] for record in records)
    return TrialReport(reps=config.reps, stats=stats, kappas=kappas)


def detection_heatmap(base: TrialConfig, a_grid, b_grid) -> Heatmap:
    """Error-rate heatmap over a grid of collinear-instance spacings.

    Every cell reruns the trials with the same master seed, so cells share
    noise draws and the sweep is deterministic as a whole.
    """
    a_grid = tuple(float(a) for a in a_grid)
    b_grid = tuple(float(b) for b in b_grid)
    for name, grid in (("a_grid", a_grid), ("b_grid", b_grid)):
        if not grid:
            raise ValueError(f"{name} must be non-empty")
        if any(x >= y for x, y in zip(grid, grid[1:])):
            raise ValueError(f"{name} must be strictly increasing")
    cells = {
        m.value: np.zeros((len(a_grid), len(b_grid))) for m in base.methods
    }
    for ai, a in enumerate(a_grid):
        for bi, b in enumerate(b_grid):
            config = TrialConfig(
                instance_spec=Experiment2Spec(a=a, b=b),
                methods=base.methods,
                n=base.n,
                m=base.m,
                d=base.d,
                reps=base.reps,
                alpha=base.alpha,
                master_seed=base.master_seed,
            )
            report = run_trials(config)
            for name, s in report.stats.items():
                cells[name][ai, bi] = s.error_rate
    return Heatmap(a_grid=a_grid, b_grid=b_grid, cells=cells)


def consecutive_domination(data: Dataset) -> bool:
    """True when shifting every query one reference to the right is strictly
    closer than the true pairing, coordinate-wise over all queries.

    Meaningful for identity-mapped instances with one trailing outlier, where
    the shifted pairing is the hard instance's competing injection.
    """
    if data.m < data.n + 1:
        raise ValueError("the shifted pairing needs at least one extra reference vector")
    n = data.n
    true_dists = np.linalg.norm(data.query - data.reference[:n], axis=1)
    shifted_dists = np.linalg.norm(data.query - data.reference[1 : n + 1], axis=1)
    return bool(np.all(shifted_dists < true_dists))


def counterexample_frequency(n: int, d: int, reps: int, seed: int) -> float:
    """Fraction of repetitions in which the shifted pairing dominates the true
    one coordinate-wise on the hard instance.

    On every such repetition any matcher that scores pairings by a
    non-decreasing function of the distances prefers the shifted pairing, so
    this frequency lower-bounds their failure rate. The strict >1/4 guarantee
    needs roughly d >= 422 * log(4n); below that the frequency is still
    computed but a warning is emitted.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if reps < 1:
        raise ValueError("repetition count must be >= 1")
    if d < COUNTEREXAMPLE_DIM_FACTOR * math.log(4 * n):
        warnings.warn(
            f"d={d} is below {COUNTEREXAMPLE_DIM_FACTOR:.0f}*log(4n)="
            f"{COUNTEREXAMPLE_DIM_FACTOR * math.log(4 * n):.0f}; the >1/4 "
            "failure guarantee does not apply",
            RuntimeWarning,
            stacklevel=2,
        )
    params = counterexample_instance(n, d)
    hits = sum(
        consecutive_domination(sample_dataset(params, rep_seed(seed, rep, STREAM_DATA)))
        for rep in range(reps)
    )
    return hits / reps


def heatmap_to_csv(heatmap: Heatmap, method: str) -> str:
    """Grid CSV: header row carries the b values, first column the a values."""
    from .fileio import format_float

    grid = heatmap.cells[method]
    lines = ["," + ",".join(format_float(b) for b in heatmap.b_grid)]
    for ai, a in enumerate(heatmap.a_grid):
        lines.append(
            format_float(a) + "," + ",".join(format_float(v) for v in grid[ai])
        )
    return "\n".join(lines) + "\n"


def heatmap_to_pgm(heatmap: Heatmap, method: str) -> bytes:
    """8-bit binary PGM: error 0 maps to pixel 0, error 1 to 255, rows are
    a-descending so larger spacings sit at the top of the image."""
    grid = heatmap.cells[method]
    pixels = np.rint(grid[::-1] * 255).astype(np.uint8)
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()
