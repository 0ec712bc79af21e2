"""Zipf popularity models for content requests and cache placement.

A library of m files is ranked by popularity; the probability of rank i
is proportional to 1/i**gamma. Both the request side and the caching side
of the simulator use the same model type, just with different exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PopularityModel:
    """Normalized Zipf distribution over file ranks 1..m.

    pmf[i] holds the probability of rank i+1 (arrays are 0-based, ranks
    are 1-based everywhere in the public interface). The cumulative table
    backs inverse-CDF sampling at O(log m) per draw.
    """

    m: int
    gamma: float
    pmf: np.ndarray
    cdf: np.ndarray = field(repr=False)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw 1-based file ranks; scalar when size is None."""
        return sample_indices(self, rng, size)


def _rank_weights(gamma: float, a: int, b: int) -> np.ndarray:
    # Shared by zipf_pmf and harmonic_sum so that normalizer and sum are
    # computed from bitwise-identical arrays.
    ranks = np.arange(a, b + 1, dtype=np.float64)
    return np.power(ranks, -gamma)


def zipf_pmf(m: int, gamma: float) -> PopularityModel:
    """Build the Zipf model p(i) = i**-gamma / sum_j j**-gamma, i = 1..m.

    gamma = 0 degenerates to the uniform distribution. Probabilities are
    computed by exact summation; no zeta-function approximation.
    """
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise ValueError(f"library size m must be an integer, got {m!r}")
    if m < 1:
        raise ValueError(f"library size m must be >= 1, got {m}")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0:
        raise ValueError(f"Zipf exponent must be finite and >= 0, got {gamma}")

    weights = _rank_weights(gamma, 1, int(m))
    pmf = weights / weights.sum()
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    pmf.flags.writeable = False
    cdf.flags.writeable = False
    return PopularityModel(m=int(m), gamma=gamma, pmf=pmf, cdf=cdf)


def harmonic_sum(gamma: float, a: int, b: int) -> float:
    """Generalized harmonic sum over ranks a..b: sum of j**-gamma.

    Evaluated by direct summation. Converges as b grows when gamma > 1,
    diverges when gamma <= 1.
    """
    if not math.isfinite(float(gamma)):
        raise ValueError(f"exponent must be finite, got {gamma}")
    a = int(a)
    b = int(b)
    if a < 1:
        raise ValueError(f"lower rank must be >= 1, got {a}")
    if a > b:
        raise ValueError(f"invalid rank range: a={a} > b={b}")
    return float(_rank_weights(float(gamma), a, b).sum())


def overlap_mass(
    requests: PopularityModel, caches: PopularityModel, a: int, b: int
) -> float:
    """Sum of f_j * p_j for ranks a..b under the two models.

    Diagnostic for how often a random request meets a random cache; when
    both exponents exceed 1 this stays bounded away from 0 as m grows.
    """
    if requests.m != caches.m:
        raise ValueError(
            f"model sizes differ: requests m={requests.m}, caches m={caches.m}"
        )
    a = int(a)
    b = int(b)
    if a < 1 or a > b:
        raise ValueError(f"invalid rank range: a={a}, b={b}")
    if b > requests.m:
        raise ValueError(f"rank b={b} exceeds library size m={requests.m}")
    return float(np.dot(requests.pmf[a - 1 : b], caches.pmf[a - 1 : b]))


def sample_indices(
    model: PopularityModel, rng: np.random.Generator, size: int | None = None
):
    """Inverse-CDF sampling of 1-based ranks from a popularity model.

    Deterministic for a fixed generator state. With size=None a single
    Python int is returned, otherwise an int64 array of that length.
    """
    if size is None:
        u = rng.random()
        return int(np.searchsorted(model.cdf, u, side="right")) + 1
    u = rng.random(int(size))
    return np.searchsorted(model.cdf, u, side="right").astype(np.int64) + 1


def sample_index(model: PopularityModel, rng: np.random.Generator) -> int:
    """Draw one 1-based file rank."""
    return sample_indices(model, rng, None)
