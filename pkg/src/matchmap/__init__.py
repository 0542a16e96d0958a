"""Matching-map estimation toolkit.

Estimates the injective correspondence between two sets of noisy vectors
(the second of which may contain outliers), computes the separation
distances and detection thresholds that govern when recovery is possible,
and runs Monte-Carlo experiments mapping out empirical detection regions.
"""

__version__ = "0.1.0"

from .estimators import (
    Dataset,
    LOG_COST_FLOOR,
    Method,
    cost_lsl,
    cost_lsns,
    cost_lss,
    estimate,
    greedy_match,
    pairwise_sq_dists,
)
from .genmodel import (
    InstanceParams,
    STREAM_DATA,
    STREAM_INSTANCE,
    counterexample_instance,
    experiment1_instance,
    experiment2_instance,
    rep_seed,
    sample_dataset,
)
from .harness import (
    CounterexampleSpec,
    Experiment1Spec,
    Experiment2Spec,
    ExplicitParamsSpec,
    Heatmap,
    MethodStats,
    TrialConfig,
    TrialReport,
    consecutive_domination,
    counterexample_frequency,
    detection_heatmap,
    heatmap_to_csv,
    heatmap_to_pgm,
    run_trials,
    wilson_interval,
)
from .lap import CostMatrix, MatchingMap, brute_force_lap, solve_rectangular_lap
from .separation import (
    Regime,
    SeparationReport,
    Thresholds,
    chi_square_tail,
    compute_separation,
    hamming_loss,
    threshold_lsl,
    threshold_lsns,
    threshold_mild,
)

__all__ = [
    "CostMatrix",
    "CounterexampleSpec",
    "Dataset",
    "Experiment1Spec",
    "Experiment2Spec",
    "ExplicitParamsSpec",
    "Heatmap",
    "InstanceParams",
    "LOG_COST_FLOOR",
    "MatchingMap",
    "Method",
    "MethodStats",
    "Regime",
    "STREAM_DATA",
    "STREAM_INSTANCE",
    "SeparationReport",
    "Thresholds",
    "TrialConfig",
    "TrialReport",
    "brute_force_lap",
    "chi_square_tail",
    "compute_separation",
    "consecutive_domination",
    "cost_lsl",
    "cost_lsns",
    "cost_lss",
    "counterexample_frequency",
    "counterexample_instance",
    "detection_heatmap",
    "estimate",
    "experiment1_instance",
    "experiment2_instance",
    "greedy_match",
    "hamming_loss",
    "heatmap_to_csv",
    "heatmap_to_pgm",
    "pairwise_sq_dists",
    "rep_seed",
    "run_trials",
    "sample_dataset",
    "solve_rectangular_lap",
    "threshold_lsl",
    "threshold_lsns",
    "threshold_mild",
    "wilson_interval",
    "__version__",
]
