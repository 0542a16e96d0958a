"""Separation distances, detection thresholds, and related utilities.

The separation distances are minimum distance-to-noise ratios between true
features: inlier-inlier over distinct matched pairs, inlier-outlier between
matched and unmatched features. The thresholds are the closed-form
sufficient separation levels under which each estimator recovers the true
matching map with probability at least ``1 - alpha``:

* ``threshold_lsns`` -- known noise levels, arbitrary heteroscedasticity;
* ``threshold_lsl``  -- unknown arbitrary noise levels (rate ~ sqrt(d));
* ``threshold_mild`` -- unknown noise levels with bounded ratio r_sigma,
  where the inlier-inlier and inlier-outlier requirements split.

Natural logarithms throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .genmodel import InstanceParams


class Regime(str, enum.Enum):
    KNOWN_VARIANCE = "known_variance"
    UNKNOWN_ARBITRARY = "unknown_arbitrary"
    MILD_HETERO = "mild_hetero"


@dataclass(frozen=True)
class SeparationReport:
    """Minimum distance-to-noise ratios of an instance.

    ``kappa_in_out`` is None when the instance has no outliers (m == n).
    """

    kappa_in_in: float
    kappa_in_out: float | None

    def to_dict(self) -> dict:
        return {"kappa_in_in": self.kappa_in_in, "kappa_in_out": self.kappa_in_out}


@dataclass(frozen=True)
class Thresholds:
    t_in_in: float
    t_in_out: float
    alpha: float
    regime: Regime

    def __post_init__(self):
        if not (self.t_in_in > 0 and self.t_in_out > 0):
            raise ValueError("thresholds must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "t_in_in": self.t_in_in,
            "t_in_out": self.t_in_out,
            "alpha": self.alpha,
            "regime": self.regime.value,
        }


def _pairwise_kappa(params: InstanceParams, left: np.ndarray, right: np.ndarray) -> float:
    diff = params.features[left][:, None, :] - params.features[right][None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    noise_sq = params.noise_levels**2
    denom = np.sqrt(noise_sq[left][:, None] + noise_sq[right][None, :])
    return dist / denom


def compute_separation(params: InstanceParams) -> SeparationReport:
    """Minimum normalized feature distances of an instance.

    Inlier-inlier runs over distinct pairs inside the image of the true map;
    inlier-outlier pairs each matched feature with each unmatched one and is
    absent when there are no outliers.
    """
    inliers = np.sort(params.true_map)
    outliers = params.outlier_indices
    kappa_in = _pairwise_kappa(params, inliers, inliers)
    iu = np.triu_indices(inliers.size, k=1)
    if iu[0].size == 0:
        raise ValueError("inlier-inlier separation needs at least two matched features")
    kappa_in_in = float(kappa_in[iu].min())
    kappa_in_out = None
    if outliers.size:
        kappa_in_out = float(_pairwise_kappa(params, inliers, outliers).min())
    return SeparationReport(kappa_in_in=kappa_in_in, kappa_in_out=kappa_in_out)


def _validate_sizes(n: int, m: int, d: int) -> None:
    if not (1 <= n <= m):
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    if d < 1:
        raise ValueError("dimension must be >= 1")


def threshold_lsns(n: int, m: int, d: int, alpha: float) -> float:
    """Sufficient separation for the noise-normalized criterion (known noise)."""
    _validate_sizes(n, m, d)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return 4.0 * max(
        (d * math.log(4 * n * m / alpha)) ** 0.25,
        (2 * math.log(8 * n * m / alpha)) ** 0.5,
    )


def threshold_lsl(n: int, m: int, d: int, alpha: float) -> float:
    """Sufficient separation for the log criterion with arbitrary unknown noise."""
    _validate_sizes(n, m, d)
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    return math.sqrt(2 * d) + 4.0 * max(
        (2 * d * math.log(4 * n * m / alpha)) ** 0.25,
        (3 * math.log(8 * n * m / alpha)) ** 0.5,
    )


def threshold_mild(n: int, m: int, d: int, alpha: float, r_sigma: float) -> Thresholds:
    """Split thresholds for the log criterion under bounded noise ratio.

    ``r_sigma`` is the largest ratio between any two noise levels; at
    ``r_sigma = 1`` the inlier-outlier requirement collapses to the
    inlier-inlier one.
    """
    _validate_sizes(n, m, d)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if r_sigma < 1:
        raise ValueError("r_sigma is a max/min ratio and must be >= 1")
    log_term = math.log(4 * n * m / alpha)
    t_in_in = 2.0 * (4 * d * log_term) ** 0.25 + 2.0 * (2 * log_term) ** 0.5
    t_in_out = (
        math.sqrt(2 * (r_sigma - 1) * d)
        + 2.0 * (4 * r_sigma**2 * d * log_term) ** 0.25
        + 2.0 * (2 * r_sigma * log_term) ** 0.5
    )
    return Thresholds(t_in_in=t_in_in, t_in_out=t_in_out, alpha=alpha, regime=Regime.MILD_HETERO)


def hamming_loss(estimated, truth) -> int:
    """Number of positions where two matching maps disagree."""
    est = np.asarray(getattr(estimated, "assignment", estimated), dtype=np.intp).ravel()
    ref = np.asarray(getattr(truth, "assignment", truth), dtype=np.intp).ravel()
    if est.size != ref.size:
        raise ValueError(f"matching maps have different domains: {est.size} != {ref.size}")
    return int(np.count_nonzero(est != ref))


def chi_square_tail(degrees: int, x: float) -> tuple[float, float]:
    """Deviation bounds for a chi-squared variable with ``degrees`` d.o.f.

    Returns ``(lower_dev, upper_dev)`` such that the variable undershoots its
    mean by ``lower_dev`` or overshoots it by ``upper_dev`` each with
    probability at most ``exp(-x)``.
    """
    if degrees < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if not x > 0:
        raise ValueError("x must be positive")
    lower = 2.0 * math.sqrt(degrees * x)
    return lower, lower + 2.0 * x
