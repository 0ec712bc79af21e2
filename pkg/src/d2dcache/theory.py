"""Closed-form quantities behind the two scaling regimes.

High content reuse (request exponent above 1) admits linearly many
simultaneous links at radius ~ sqrt(1/n). Low reuse (exponent below 1)
pays a library-size penalty m**(eta + epsilon) in both the link count and
the radius, where eta depends only on the request exponent. The caching
exponent that achieves the low-reuse optimum solves a simple rational
equation and is computed here in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import ROOT2
from .popularity import harmonic_sum

EPSILON_MAX = 1.0 / 6.0

HIGH_REUSE = "high-reuse"
LOW_REUSE = "low-reuse"


class RegimeError(ValueError):
    """Raised for request exponents a regime formula does not cover."""


class NoPositiveSolutionError(ValueError):
    """Raised when no positive caching exponent attains the target."""


@dataclass(frozen=True)
class RegimeParams:
    """Scaling-law parameters: request exponent, slack epsilon, and the
    admissible radius-constant band [c1, c2].

    The default band satisfies the proof-side floor on c1 (see c1_floor)
    at delta = delta1 = 0.5 and caching exponent 1.5; experiments usually
    override it with an empirically swept constant.
    """

    gamma_r: float
    epsilon: float = 0.05
    c1: float = 48.0
    c2: float = 48.0

    def __post_init__(self):
        if not math.isfinite(self.gamma_r) or self.gamma_r < 0:
            raise ValueError(f"gamma_r must be finite and >= 0, got {self.gamma_r}")
        if not 0 < self.epsilon < EPSILON_MAX:
            raise ValueError(
                f"epsilon must lie in (0, 1/6), got {self.epsilon}"
            )
        if not 0 < self.c1 <= self.c2:
            raise ValueError(f"need 0 < c1 <= c2, got c1={self.c1}, c2={self.c2}")

    @property
    def regime(self) -> str:
        if self.gamma_r > 1:
            return HIGH_REUSE
        if self.gamma_r < 1:
            return LOW_REUSE
        raise RegimeError(
            "gamma_r = 1 sits on the regime boundary; neither scaling law applies"
        )


@dataclass(frozen=True)
class ScalingPrediction:
    """Predicted exponents of E[L] ~ n**n_exponent * m**m_exponent."""

    n_exponent: float
    m_exponent: float


def eta(gamma_r: float) -> float:
    """Library-size penalty exponent (1 - gamma_r) / (2 - gamma_r).

    Defined for the low-reuse regime 0 <= gamma_r < 1; strictly
    decreasing, with range (0, 1/2].
    """
    gamma_r = float(gamma_r)
    if not 0 <= gamma_r < 1:
        raise RegimeError(
            f"eta is defined for 0 <= gamma_r < 1 (low reuse), got {gamma_r}"
        )
    return (1.0 - gamma_r) / (2.0 - gamma_r)


def optimal_gamma_c(gamma_r: float, epsilon: float) -> float:
    """Caching exponent whose scaling exponent equals eta + epsilon.

    Solves (1 - gamma_r) * g / (1 - gamma_r + g) = eta + epsilon for g.
    With a = 1 - gamma_r and t = eta + epsilon the unique positive root is
    t * a / (a - t); it exists only while t < a, i.e. for epsilon small
    enough relative to gamma_r.
    """
    epsilon = float(epsilon)
    if not 0 < epsilon < EPSILON_MAX:
        raise ValueError(f"epsilon must lie in (0, 1/6), got {epsilon}")
    a = 1.0 - float(gamma_r)
    t = eta(gamma_r) + epsilon
    if t >= a:
        raise NoPositiveSolutionError(
            f"no positive caching exponent: eta + epsilon = {t:.6f} must be "
            f"below 1 - gamma_r = {a:.6f}; reduce epsilon"
        )
    return t * a / (a - t)


def optimal_radius(n: int, m: int, params: RegimeParams) -> float:
    """Collaboration radius that balances reach against interference.

    High reuse: sqrt(c / n) with c the geometric midpoint of [c1, c2].
    Low reuse: sqrt(c * m**(eta + epsilon) / n). Clamped into (0, sqrt(2)]
    since the unit square needs nothing larger.
    """
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be >= 1, got n={n}, m={m}")
    c = math.sqrt(params.c1 * params.c2)
    if params.regime == HIGH_REUSE:
        r = math.sqrt(c / n)
    else:
        t = eta(params.gamma_r) + params.epsilon
        r = math.sqrt(c * m**t / n)
    return min(r, ROOT2)


def predicted_scaling(params: RegimeParams) -> ScalingPrediction:
    """Exponents of the expected simultaneous-link count in n and m."""
    if params.regime == HIGH_REUSE:
        return ScalingPrediction(n_exponent=1.0, m_exponent=0.0)
    return ScalingPrediction(
        n_exponent=1.0, m_exponent=-(eta(params.gamma_r) + params.epsilon)
    )


def zeta_estimate(gamma: float, terms: int = 10**6) -> float:
    """Riemann zeta via truncated summation plus an integral tail bound.

    Accurate to better than 1e-6 for gamma >= 1.1 at the default
    truncation point.
    """
    gamma = float(gamma)
    if gamma <= 1:
        raise ValueError(f"zeta estimate requires gamma > 1, got {gamma}")
    tail = terms ** (1.0 - gamma) / (gamma - 1.0)
    return harmonic_sum(gamma, 1, terms) + tail


def c1_floor(gamma_c: float, delta: float = 0.5, delta1: float = 0.5) -> float:
    """Proof-side lower bound on the radius constant c1.

    3 * ln(2) * zeta(gamma_c) / (delta1**2 * (1 - delta)). Purely a
    diagnostic: the empirical radius sweep is what picks working
    constants at desk scale.
    """
    if not 0 < delta < 1 or not 0 < delta1 < 1:
        raise ValueError("delta and delta1 must lie in (0, 1)")
    return 3.0 * math.log(2.0) * zeta_estimate(gamma_c) / (delta1**2 * (1.0 - delta))
