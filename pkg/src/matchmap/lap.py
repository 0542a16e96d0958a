"""Rectangular linear sum assignment: production solver plus exhaustive oracle.

The solver finds a minimum-cost injective assignment of ``n`` rows into
``m >= n`` columns.  The exhaustive oracle enumerates every injection and is
intended for testing only; it is guarded against factorial blow-up.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .fileio import format_float

# Enumeration guard for the exhaustive oracle.
_ORACLE_MAX_ROWS = 8
_ORACLE_MAX_COLS = 10
# Injection tables up to this many rows are cached; larger ones are streamed.
_CACHE_ROW_LIMIT = 300_000
_CHUNK = 200_000

_OBJECTIVE_RTOL = 1e-9


@dataclass(frozen=True)
class CostMatrix:
    """An ``n x m`` matrix of finite pairwise matching costs, ``m >= n``.

    Rows index the vectors being matched, columns index the candidates they
    are matched into.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {values.shape}")
        n, m = values.shape
        if n < 1:
            raise ValueError("cost matrix needs at least one row")
        if m < n:
            raise ValueError(f"cost matrix needs at least as many columns as rows, got {n}x{m}")
        if not np.all(np.isfinite(values)):
            raise ValueError("cost matrix entries must be finite (no NaN or infinity)")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def to_csv(self) -> str:
        """Debug dump: one row per line, full round-trip float precision."""
        return "\n".join(
            ",".join(format_float(v) for v in row) for row in self.values
        ) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "CostMatrix":
        rows = [
            [float(field) for field in line.split(",")]
            for line in text.splitlines()
            if line.strip()
        ]
        return cls(np.array(rows, dtype=np.float64))


@dataclass(frozen=True)
class MatchingMap:
    """An injective row-to-column assignment with its total cost.

    ``assignment[i]`` is the 0-based column matched to row ``i``.
    """

    assignment: np.ndarray
    objective: float

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.intp)
        if assignment.ndim != 1:
            raise ValueError("assignment must be a 1-D index array")
        if len(np.unique(assignment)) != assignment.size:
            raise ValueError("assignment must be injective (no repeated columns)")
        if assignment.size and assignment.min() < 0:
            raise ValueError("assignment contains negative column indices")
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "objective", float(self.objective))

    @property
    def n(self) -> int:
        return self.assignment.size

    @classmethod
    def from_assignment(cls, cost: CostMatrix, assignment: np.ndarray) -> "MatchingMap":
        assignment = np.asarray(assignment, dtype=np.intp)
        objective = float(cost.values[np.arange(cost.n), assignment].sum())
        return cls(assignment=assignment, objective=objective)

    def verify_objective(self, cost: CostMatrix) -> bool:
        """Check the stored objective against a recomputation from ``cost``."""
        recomputed = float(cost.values[np.arange(cost.n), self.assignment].sum())
        return abs(self.objective - recomputed) <= _OBJECTIVE_RTOL * (1.0 + abs(recomputed))


def solve_rectangular_lap(cost: CostMatrix) -> MatchingMap:
    """Minimum-cost injective assignment of all rows into columns.

    Backed by scipy's rectangular assignment routine (shortest augmenting
    path with dual potentials, no square padding).  Deterministic: identical
    input yields an identical assignment.  Ties between optima are resolved
    by the solver's fixed scan order; callers comparing against other solvers
    should compare objectives, not assignments.
    """
    if not isinstance(cost, CostMatrix):
        cost = CostMatrix(np.asarray(cost))
    rows, cols = linear_sum_assignment(cost.values)
    assignment = np.empty(cost.n, dtype=np.intp)
    assignment[rows] = cols
    return MatchingMap.from_assignment(cost, assignment)


@lru_cache(maxsize=32)
def _cached_injections(n: int, m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m), n)), dtype=np.intp)


def _injection_count(n: int, m: int) -> int:
    count = 1
    for k in range(m, m - n, -1):
        count *= k
    return count


def brute_force_lap(cost: CostMatrix) -> MatchingMap:
    """Exhaustive oracle: enumerate all ``m!/(m-n)!`` injections.

    Returns the lexicographically smallest assignment among those achieving
    the minimum objective (ties decided on exact float equality of the
    summed costs).  Guarded to ``n <= 8`` rows and ``m <= 10`` columns.
    """
    if not isinstance(cost, CostMatrix):
        cost = CostMatrix(np.asarray(cost))
    n, m = cost.n, cost.m
    if n > _ORACLE_MAX_ROWS or m > _ORACLE_MAX_COLS:
        raise ValueError(
            f"brute force limited to {_ORACLE_MAX_ROWS}x{_ORACLE_MAX_COLS}, got {n}x{m}"
        )
    row_index = np.arange(n)

    def chunk_best(injections: np.ndarray):
        totals = cost.values[row_index, injections].sum(axis=1)
        idx = int(np.argmin(totals))  # first minimum = lexicographically smallest
        return float(totals[idx]), injections[idx]

    if _injection_count(n, m) <= _CACHE_ROW_LIMIT:
        best_obj, best_assignment = chunk_best(_cached_injections(n, m))
    else:
        best_obj, best_assignment = np.inf, None
        stream = itertools.permutations(range(m), n)
        while True:
            block = list(itertools.islice(stream, _CHUNK))
            if not block:
                break
            obj, assignment = chunk_best(np.array(block, dtype=np.intp))
            # strict < keeps the earlier (lexicographically smaller) optimum
            if obj < best_obj:
                best_obj, best_assignment = obj, assignment
    return MatchingMap(assignment=best_assignment.copy(), objective=best_obj)
