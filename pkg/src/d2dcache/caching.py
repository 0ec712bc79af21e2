"""Cache contents and file requests for one sampled network.

Every user stores exactly one file and requests exactly one file. Caches,
requests, and positions are drawn from three independently seeded streams
so experiments can hold any one of them fixed while varying the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Placement, sample_placement
from .popularity import sample_indices, zipf_pmf


@dataclass(frozen=True)
class NetworkState:
    """The sampled world of a single trial: who is where, caching and
    requesting what, at which collaboration radius."""

    placement: Placement
    caches: np.ndarray  # length n, 1-based file ranks
    requests: np.ndarray
    r: float
    m: int

    def __post_init__(self):
        n = self.placement.n
        if len(self.caches) != n or len(self.requests) != n:
            raise ValueError(
                f"cache/request vectors must have length n={n}, got "
                f"{len(self.caches)} and {len(self.requests)}"
            )
        for name, vec in (("caches", self.caches), ("requests", self.requests)):
            if len(vec) and (vec.min() < 1 or vec.max() > self.m):
                raise ValueError(f"{name} contains ranks outside [1, {self.m}]")
        if not 0 < self.r:
            raise ValueError(f"collaboration radius must be positive, got {self.r}")

    @property
    def n(self) -> int:
        return self.placement.n

    def self_served(self) -> int:
        """Users whose own cache already holds their requested file."""
        return int(np.count_nonzero(self.caches == self.requests))


def assign_caches_zipf(
    n: int, m: int, gamma_c: float, rng: np.random.Generator
) -> np.ndarray:
    """n i.i.d. cache choices from a Zipf distribution with exponent gamma_c."""
    model = zipf_pmf(m, gamma_c)
    return sample_indices(model, rng, n)


def assign_caches_most_popular(n: int, m: int, cache_size: int = 1) -> np.ndarray:
    """Degenerate baseline: every user caches the top-ranked file.

    With single-file caches this policy creates pure redundancy. Every
    request for file 1 is then a self-request and requests for any other
    file cannot be served, so no D2D link ever forms.
    """
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be >= 1, got n={n}, m={m}")
    if cache_size != 1:
        raise ValueError("only single-file caches are supported")
    return np.ones(int(n), dtype=np.int64)


def assign_requests(
    n: int, m: int, gamma_r: float, rng: np.random.Generator
) -> np.ndarray:
    """n i.i.d. file requests from a Zipf distribution with exponent gamma_r."""
    model = zipf_pmf(m, gamma_r)
    return sample_indices(model, rng, n)


def sample_network_state(
    n: int,
    m: int,
    gamma_r: float,
    gamma_c: float,
    r: float,
    seed: int,
    cache_policy: str = "zipf",
) -> NetworkState:
    """Sample a full trial world from a single seed.

    The seed is split into three independent child streams (placement,
    caches, requests) so the same positions can be replayed under a
    different caching draw and vice versa.
    """
    place_ss, cache_ss, req_ss = np.random.SeedSequence(seed).spawn(3)
    placement = sample_placement(n, np.random.default_rng(place_ss))
    if cache_policy == "zipf":
        caches = assign_caches_zipf(n, m, gamma_c, np.random.default_rng(cache_ss))
    elif cache_policy == "most_popular":
        caches = assign_caches_most_popular(n, m)
    else:
        raise ValueError(f"unknown cache policy {cache_policy!r}")
    requests = assign_requests(n, m, gamma_r, np.random.default_rng(req_ss))
    return NetworkState(placement=placement, caches=caches, requests=requests, r=r, m=m)
