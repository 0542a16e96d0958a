"""Matching-map estimators over two noisy vector sets.

Four criteria are supported for matching ``n`` query vectors into ``m >= n``
reference vectors:

* ``greedy``  -- sequential nearest-neighbor, no global optimization;
* ``lss``    -- least sum of squared distances;
* ``lsns``   -- least sum of noise-normalized squared distances (needs the
  per-vector noise levels);
* ``lsl``    -- least sum of logarithms of squared distances (noise-level
  free, robust to heteroscedastic noise).

All but greedy build a cost matrix and solve the rectangular assignment
problem exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .lap import CostMatrix, MatchingMap, solve_rectangular_lap

# Squared distances are clamped here before taking logs, so exact matches get
# a large negative but finite cost. Smallest positive normal double.
LOG_COST_FLOOR = float(np.finfo(np.float64).tiny)


class Method(str, enum.Enum):
    GREEDY = "greedy"
    LSS = "lss"
    LSNS = "lsns"
    LSL = "lsl"

    @classmethod
    def parse(cls, name: str) -> "Method":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown method {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class Dataset:
    """Observed query vectors (n x d) and reference vectors (m x d).

    ``query_noise`` / ``reference_noise`` are the per-vector noise standard
    deviations; they are optional and only required by the ``lsns`` criterion.
    """

    query: np.ndarray
    reference: np.ndarray
    query_noise: np.ndarray | None = None
    reference_noise: np.ndarray | None = None

    def __post_init__(self):
        query = np.atleast_2d(np.asarray(self.query, dtype=np.float64))
        reference = np.atleast_2d(np.asarray(self.reference, dtype=np.float64))
        if query.ndim != 2 or reference.ndim != 2:
            raise ValueError("query and reference must be 2-D arrays of vectors")
        if query.shape[1] != reference.shape[1]:
            raise ValueError(
                f"dimension mismatch: query is {query.shape[1]}-dimensional, "
                f"reference is {reference.shape[1]}-dimensional"
            )
        n, m = query.shape[0], reference.shape[0]
        if n < 1:
            raise ValueError("query set is empty")
        if m < n:
            raise ValueError(f"reference set must be at least as large as the query set ({n} > {m})")
        if query.shape[1] < 1:
            raise ValueError("vectors must have dimension >= 1")
        if not (np.all(np.isfinite(query)) and np.all(np.isfinite(reference))):
            raise ValueError("vectors must be finite")
        object.__setattr__(self, "query", query)
        object.__setattr__(self, "reference", reference)
        for name, size in (("query_noise", n), ("reference_noise", m)):
            raw = getattr(self, name)
            if raw is None:
                continue
            arr = np.asarray(raw, dtype=np.float64).ravel()
            if arr.size != size:
                raise ValueError(f"{name} must have length {size}, got {arr.size}")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValueError(f"{name} entries must be finite and strictly positive")
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.query.shape[0]

    @property
    def m(self) -> int:
        return self.reference.shape[0]

    @property
    def d(self) -> int:
        return self.query.shape[1]

    def has_noise_levels(self) -> bool:
        return self.query_noise is not None and self.reference_noise is not None


def pairwise_sq_dists(query: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """n x m matrix of squared Euclidean distances."""
    diff = query[:, None, :] - reference[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def cost_lss(data: Dataset) -> CostMatrix:
    """Cost (i, j) = squared distance between query i and reference j."""
    return CostMatrix(pairwise_sq_dists(data.query, data.reference))


def cost_lsns(data: Dataset) -> CostMatrix:
    """Cost (i, j) = squared distance normalized by the summed noise variances."""
    if not data.has_noise_levels():
        raise ValueError("lsns requires query_noise and reference_noise")
    sq = pairwise_sq_dists(data.query, data.reference)
    denom = data.query_noise[:, None] ** 2 + data.reference_noise[None, :] ** 2
    return CostMatrix(sq / denom)


def cost_lsl(data: Dataset) -> CostMatrix:
    """Cost (i, j) = log of the squared distance, clamped at LOG_COST_FLOOR."""
    sq = pairwise_sq_dists(data.query, data.reference)
    return CostMatrix(np.log(np.maximum(sq, LOG_COST_FLOOR)))


def greedy_match(data: Dataset) -> MatchingMap:
    """Match each query vector, in index order, to the nearest unused reference.

    Ties go to the smallest reference index. The reported objective is the
    sum of squared distances of the chosen pairs, so greedy results are
    directly comparable with the ``lss`` optimum.
    """
    sq = pairwise_sq_dists(data.query, data.reference)
    assignment = np.empty(data.n, dtype=np.intp)
    used = np.zeros(data.m, dtype=bool)
    objective = 0.0
    for i in range(data.n):
        row = np.where(used, np.inf, sq[i])
        j = int(np.argmin(row))  # first minimum = smallest index on ties
        assignment[i] = j
        used[j] = True
        objective += sq[i, j]
    return MatchingMap(assignment=assignment, objective=objective)


_COST_BUILDERS = {
    Method.LSS: cost_lss,
    Method.LSNS: cost_lsns,
    Method.LSL: cost_lsl,
}


def estimate(method: Method | str, data: Dataset) -> MatchingMap:
    """Estimate the matching map with the requested criterion."""
    method = Method.parse(method) if isinstance(method, str) else method
    if method is Method.GREEDY:
        return greedy_match(data)
    return solve_rectangular_lap(_COST_BUILDERS[method](data))
