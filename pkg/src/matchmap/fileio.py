"""CSV formats for vector sets and matching maps.

Vector files are headerless CSV, one vector per line, serialized with the
shortest float representation that round-trips exactly. Mapping files are
two-column ``i,j`` CSV with 1-based indices on both sides.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def format_float(x) -> str:
    """Shortest decimal form of a finite double that parses back bit-exactly."""
    return repr(float(x))


def vectors_to_csv(vectors: np.ndarray) -> str:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if not np.all(np.isfinite(vectors)):
        raise ValueError("vector entries must be finite")
    return "\n".join(",".join(format_float(v) for v in row) for row in vectors) + "\n"


def vectors_from_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(field) for field in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("vector file is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"vector file is ragged: line widths {sorted(widths)}")
    out = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise ValueError("vector file contains non-finite values")
    return out


def write_vectors(path, vectors: np.ndarray) -> None:
    Path(path).write_text(vectors_to_csv(vectors))


def read_vectors(path) -> np.ndarray:
    return vectors_from_csv(Path(path).read_text())


def read_noise_levels(path) -> np.ndarray:
    """Single-column CSV of positive noise levels, one per vector."""
    values = read_vectors(path)
    if values.shape[1] != 1:
        raise ValueError(f"noise-level file must have one column, got {values.shape[1]}")
    values = values.ravel()
    if np.any(values <= 0):
        raise ValueError("noise levels must be strictly positive")
    return values


def write_noise_levels(path, values: np.ndarray) -> None:
    write_vectors(path, np.asarray(values, dtype=np.float64).reshape(-1, 1))


def mapping_to_csv(assignment: np.ndarray) -> str:
    """Serialize a 0-based assignment as 1-based ``i,j`` lines."""
    assignment = np.asarray(assignment, dtype=np.intp)
    return "\n".join(f"{i + 1},{j + 1}" for i, j in enumerate(assignment)) + "\n"


def mapping_from_csv(text: str) -> np.ndarray:
    """Parse a 1-based ``i,j`` mapping file into a 0-based assignment array."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 'i,j', got {line!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise ValueError(f"line {lineno}: indices must be integers, got {line!r}") from None
        pairs.append((i, j))
    if not pairs:
        raise ValueError("mapping file is empty")
    n = len(pairs)
    sources = sorted(i for i, _ in pairs)
    if sources != list(range(1, n + 1)):
        raise ValueError(f"source indices must be exactly 1..{n}")
    assignment = np.empty(n, dtype=np.intp)
    for i, j in pairs:
        if j < 1:
            raise ValueError(f"target index {j} for source {i} is not 1-based")
        assignment[i - 1] = j - 1
    if len(np.unique(assignment)) != n:
        raise ValueError("mapping is not injective: repeated target indices")
    return assignment


def write_mapping(path, assignment: np.ndarray) -> None:
    Path(path).write_text(mapping_to_csv(assignment))


def read_mapping(path) -> np.ndarray:
    return mapping_from_csv(Path(path).read_text())
