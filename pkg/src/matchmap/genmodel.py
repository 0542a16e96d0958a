"""Ground-truth instances and the Gaussian sampling model.

An instance is a set of ``m`` true reference features with per-feature noise
levels and an injective true matching map from the ``n`` query positions into
the reference positions. Observed datasets add isotropic Gaussian noise:
query ``i`` observes ``features[true_map[i]]`` at noise level
``noise_levels[true_map[i]]``, reference ``j`` observes ``features[j]`` at
noise level ``noise_levels[j]``. Reference features outside the image of the
true map are outliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import Dataset

# Sub-streams for per-repetition seed derivation.
STREAM_INSTANCE = 0
STREAM_DATA = 1

_MASK64 = (1 << 64) - 1


def rep_seed(master_seed: int, rep: int, stream: int = STREAM_DATA) -> int:
    """Derive the seed for repetition ``rep`` of a run seeded by ``master_seed``.

    Derivation goes through a seed sequence keyed on (master, rep, stream),
    so repetitions can run in any order, or in parallel, and still reproduce
    bit-identical draws.
    """
    ss = np.random.SeedSequence([int(master_seed) & _MASK64, int(rep), int(stream)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class InstanceParams:
    """Ground truth defining a data-generating distribution.

    ``features``: (m, d) true reference vectors; ``noise_levels``: (m,)
    positive noise standard deviations; ``true_map``: (n,) 0-based injective
    map of query positions into reference positions.
    """

    features: np.ndarray
    noise_levels: np.ndarray
    true_map: np.ndarray

    def __post_init__(self):
        features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        noise = np.asarray(self.noise_levels, dtype=np.float64).ravel()
        true_map = np.asarray(self.true_map, dtype=np.intp).ravel()
        m = features.shape[0]
        if noise.size != m:
            raise ValueError(f"need one noise level per feature: {noise.size} != {m}")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        if not np.all(np.isfinite(noise)) or np.any(noise <= 0):
            raise ValueError("noise levels must be finite and strictly positive")
        n = true_map.size
        if n < 1 or n > m:
            raise ValueError(f"true map must have 1..{m} entries, got {n}")
        if true_map.min() < 0 or true_map.max() >= m:
            raise ValueError("true map indices out of range")
        if len(np.unique(true_map)) != n:
            raise ValueError("true map must be injective")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "noise_levels", noise)
        object.__setattr__(self, "true_map", true_map)

    @property
    def n(self) -> int:
        return self.true_map.size

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def outlier_indices(self) -> np.ndarray:
        """0-based reference indices with no matching query vector."""
        mask = np.ones(self.m, dtype=bool)
        mask[self.true_map] = False
        return np.flatnonzero(mask)

    def to_dict(self) -> dict:
        """JSON-ready dict; the true map is serialized 1-based."""
        return {
            "n": int(self.n),
            "m": int(self.m),
            "d": int(self.d),
            "theta_sharp": self.features.tolist(),
            "sigma_sharp": self.noise_levels.tolist(),
            "pi_star": [int(j) + 1 for j in self.true_map],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "InstanceParams":
        try:
            features = np.asarray(payload["theta_sharp"], dtype=np.float64)
            noise = np.asarray(payload["sigma_sharp"], dtype=np.float64)
            pi = np.asarray(payload["pi_star"], dtype=np.intp)
        except KeyError as exc:
            raise ValueError(f"instance params missing field {exc}") from None
        params = cls(features=features, noise_levels=noise, true_map=pi - 1)
        for field in ("n", "m", "d"):
            if field in payload and int(payload[field]) != getattr(params, field):
                raise ValueError(f"declared {field}={payload[field]} does not match arrays")
        return params


def sample_dataset(params: InstanceParams, seed: int) -> Dataset:
    """Draw one observed dataset from the Gaussian model.

    Query noise is drawn first, then reference noise, from a single PCG64
    stream seeded by ``seed``; identical (params, seed) pairs reproduce the
    dataset bit-exactly. The returned dataset carries the true noise levels
    (query side is the reference levels pulled back through the true map).
    """
    rng = np.random.default_rng(int(seed) & _MASK64)
    query_noise = params.noise_levels[params.true_map]
    query = params.features[params.true_map] + query_noise[:, None] * rng.standard_normal(
        (params.n, params.d)
    )
    reference = params.features + params.noise_levels[:, None] * rng.standard_normal(
        (params.m, params.d)
    )
    return Dataset(
        query=query,
        reference=reference,
        query_noise=query_noise,
        reference_noise=params.noise_levels,
    )


def experiment1_instance(n: int, m: int, d: int, seed: int) -> InstanceParams:
    """Random-feature instance: Gaussian features with shifted outliers.

    Feature coordinate (i, j) is drawn as N(0, tau_ij) with tau_ij uniform on
    [0, 2]; each outlier feature (reference index beyond the matched block)
    has every coordinate incremented by its 1-based index; noise levels are
    uniform on [0.5, 2]. The true map is the identity on the first n indices.
    """
    if not (m > n >= 1):
        raise ValueError(f"need m > n >= 1, got n={n}, m={m}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(int(seed) & _MASK64)
    tau = rng.uniform(0.0, 2.0, size=(m, d))
    features = rng.standard_normal((m, d)) * np.sqrt(tau)
    for i in range(n, m):
        features[i] += i + 1  # shift by the 1-based global index
    noise = rng.uniform(0.5, 2.0, size=m)
    return InstanceParams(features=features, noise_levels=noise, true_map=np.arange(n))


def experiment2_instance(n: int, m: int, d: int, a: float, b: float) -> InstanceParams:
    """Deterministic collinear instance with polynomially decaying noise.

    Matched features sit at (k*a, 0, ..., 0) for k = 1..n; outliers continue
    the line at (n*a + k*b, 0, ..., 0) for k = 1..m-n. Noise level of feature
    k is k^(-3/2). ``a`` scales the inlier-inlier separation, ``b`` the
    inlier-outlier separation.
    """
    if not (m > n >= 1):
        raise ValueError(f"need m > n >= 1, got n={n}, m={m}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not (a > 0 and b > 0):
        raise ValueError("spacings a and b must be positive")
    k = np.arange(1, m + 1, dtype=np.float64)
    positions = np.where(k <= n, k * a, n * a + (k - n) * b)
    features = np.zeros((m, d))
    features[:, 0] = positions
    noise = k ** -1.5
    return InstanceParams(features=features, noise_levels=noise, true_map=np.arange(n))


def counterexample_instance(n: int, d: int) -> InstanceParams:
    """Hard instance on which every distance-based matcher fails often.

    ``m = n + 1`` collinear features with geometrically shrinking spacing
    matched to geometrically shrinking noise: feature k sits at
    sqrt(d) * 2^-k along the first axis and has noise level 2^-(k-1)
    (1-based k). Every consecutive distance-to-noise ratio equals
    sqrt(d/20), which is the minimum over all pairs, so both separation
    distances equal sqrt(d/20) exactly.

    Anchoring the line at the origin keeps each position an exact dyadic
    multiple of sqrt(d), so consecutive differences are exact in double
    precision; an anchor away from zero would wash out the smallest gaps,
    which sit ~15 orders of magnitude below the positions for large n.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    m = n + 1
    k = np.arange(1, m + 1)
    features = np.zeros((m, d))
    features[:, 0] = np.sqrt(d) * np.ldexp(1.0, -k)
    noise = np.ldexp(1.0, -(k - 1)).astype(np.float64)
    return InstanceParams(features=features, noise_levels=noise, true_map=np.arange(n))
