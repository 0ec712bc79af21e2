"""Monte Carlo harness: trials, parameter sweeps, and scaling fits.

A trial samples one network, enumerates potential links, schedules them,
and reports counts. A sweep runs many trials over a parameter grid and
emits a CSV table. Everything is a pure function of the configuration and
the master seed: trial i of a point uses seed = master_seed + i, results
are merged in seed order, so output bytes are identical no matter how
many workers run the trials.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .caching import sample_network_state
from .geometry import neighbors
from .linkplan import build_conflict_graph, enumerate_potential_links
from .scheduling import cluster_schedule, count_good_clusters, mis_exact, mis_greedy
from .theory import RegimeParams, optimal_gamma_c, optimal_radius

SCHEDULERS = ("greedy", "cluster", "exact")
RADIUS_RULES = ("fixed", "theory", "sweep")
CACHE_POLICIES = ("zipf", "most_popular")

CSV_HEADER = (
    "n,m,gamma_r,gamma_c,epsilon,r,scheduler,"
    "L_mean,L_se,G_mean,potential_mean,self_served_mean,trials,seed"
)


@dataclass(frozen=True)
class ResolvedPoint:
    """One fully concrete simulation setting."""

    n: int
    m: int
    gamma_r: float
    gamma_c: float
    epsilon: float
    r: float
    scheduler: str
    cache_policy: str = "zipf"


@dataclass(frozen=True)
class TrialResult:
    active_links: int
    good_clusters: int
    potential_links: int
    self_served: int
    seed: int


@dataclass(frozen=True)
class MonteCarloResult:
    point: ResolvedPoint
    trials: int
    master_seed: int
    L_mean: float
    L_se: float | None
    G_mean: float
    G_se: float | None
    potential_mean: float
    potential_se: float | None
    self_served_mean: float
    self_served_se: float | None
    records: tuple[TrialResult, ...] = field(repr=False)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    axis: str


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep description; see resolve_points for how fields combine.

    The library size is either fixed (m_value) or grows as
    ceil(m_log_coeff * ln n). gamma_c may be the string "optimal", which
    resolves through the closed form for the low-reuse regime. The radius
    comes from a fixed value, the theory formula scaled by radius_coeff,
    or an explicit sweep grid.
    """

    n_values: tuple[int, ...]
    m_value: int | None = None
    m_log_coeff: float | None = None
    gamma_r: float = 0.5
    gamma_c: float | str = "optimal"
    epsilon: float = 0.05
    radius_rule: str = "theory"
    radius: float | None = None
    radius_grid: tuple[float, ...] | None = None
    radius_coeff: float = 1.0
    scheduler: str = "greedy"
    cache_policy: str = "zipf"
    trials: int = 1
    seed: int = 0
    record_good_clusters: bool = False

    def __post_init__(self):
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be a non-empty list of positive integers")
        if self.m_value is not None and self.m_value < 1:
            raise ValueError(f"m must be >= 1, got {self.m_value}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {self.scheduler!r}")
        if self.radius_rule not in RADIUS_RULES:
            raise ValueError(f"unknown radius rule {self.radius_rule!r}")
        if self.cache_policy not in CACHE_POLICIES:
            raise ValueError(f"unknown cache policy {self.cache_policy!r}")
        if self.radius_rule == "fixed" and (self.radius is None or self.radius <= 0):
            raise ValueError("radius_rule=fixed needs a positive radius")
        if self.radius_rule == "sweep" and not self.radius_grid:
            raise ValueError("radius_rule=sweep needs a non-empty radius_grid")

    def resolve_m(self, n: int) -> int:
        if self.m_value is not None:
            return self.m_value
        coeff = 2.0 if self.m_log_coeff is None else self.m_log_coeff
        return max(1, math.ceil(coeff * math.log(n)))

    def resolve_gamma_c(self) -> float:
        if self.cache_policy == "most_popular":
            return 0.0
        if isinstance(self.gamma_c, str):
            if self.gamma_c != "optimal":
                raise ValueError(f"gamma_c must be a number or 'optimal', got {self.gamma_c!r}")
            return optimal_gamma_c(self.gamma_r, self.epsilon)
        return float(self.gamma_c)

    def resolve_points(self) -> list[ResolvedPoint]:
        """Cartesian product of swept axes, in deterministic row order."""
        gamma_c = self.resolve_gamma_c()
        points = []
        for n in self.n_values:
            m = self.resolve_m(n)
            if self.radius_rule == "fixed":
                radii = [float(self.radius)]
            elif self.radius_rule == "sweep":
                radii = [float(r) for r in self.radius_grid]
            else:
                params = RegimeParams(
                    gamma_r=self.gamma_r,
                    epsilon=self.epsilon,
                    c1=self.radius_coeff,
                    c2=self.radius_coeff,
                )
                radii = [optimal_radius(n, m, params)]
            for r in radii:
                points.append(
                    ResolvedPoint(
                        n=n,
                        m=m,
                        gamma_r=self.gamma_r,
                        gamma_c=gamma_c,
                        epsilon=self.epsilon,
                        r=r,
                        scheduler=self.scheduler,
                        cache_policy=self.cache_policy,
                    )
                )
        return points


def run_trial(
    point: ResolvedPoint, seed: int, record_good_clusters: bool = False
) -> TrialResult:
    """Sample one network and schedule it; fully determined by the seed."""
    state = sample_network_state(
        n=point.n,
        m=point.m,
        gamma_r=point.gamma_r,
        gamma_c=point.gamma_c,
        r=point.r,
        seed=seed,
        cache_policy=point.cache_policy,
    )
    adjacency = neighbors(state.placement, state.r)
    links = enumerate_potential_links(state, adjacency)

    if point.scheduler == "cluster":
        schedule = cluster_schedule(state, links)
        good = int(schedule.good_clusters)
    else:
        graph = build_conflict_graph(links, state.placement, state.r, adjacency)
        schedule = mis_greedy(graph) if point.scheduler == "greedy" else mis_exact(graph)
        good = count_good_clusters(state, links) if record_good_clusters else 0

    return TrialResult(
        active_links=len(schedule.active),
        good_clusters=good,
        potential_links=len(links),
        self_served=state.self_served(),
        seed=seed,
    )


def _trial_task(args) -> TrialResult:
    point, seed, record_good = args
    return run_trial(point, seed, record_good)


def _mean_se(values: np.ndarray) -> tuple[float, float | None]:
    mean = float(values.mean())
    if len(values) < 2:
        return mean, None
    return mean, float(values.std(ddof=1) / math.sqrt(len(values)))


def monte_carlo(
    point: ResolvedPoint,
    trials: int,
    master_seed: int,
    workers: int = 1,
    record_good_clusters: bool = False,
) -> MonteCarloResult:
    """Run independent trials with seeds master_seed + i, i = 0..trials-1.

    Results are collected in seed order whatever the worker count, so the
    summary (and any CSV built from it) never depends on scheduling.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    tasks = [(point, master_seed + i, record_good_clusters) for i in range(trials)]
    if workers <= 1:
        records = [_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_task, tasks, chunksize=8))

    L = np.array([rec.active_links for rec in records], dtype=float)
    G = np.array([rec.good_clusters for rec in records], dtype=float)
    P = np.array([rec.potential_links for rec in records], dtype=float)
    S = np.array([rec.self_served for rec in records], dtype=float)
    L_mean, L_se = _mean_se(L)
    G_mean, G_se = _mean_se(G)
    P_mean, P_se = _mean_se(P)
    S_mean, S_se = _mean_se(S)
    return MonteCarloResult(
        point=point,
        trials=trials,
        master_seed=master_seed,
        L_mean=L_mean,
        L_se=L_se,
        G_mean=G_mean,
        G_se=G_se,
        potential_mean=P_mean,
        potential_se=P_se,
        self_served_mean=S_mean,
        self_served_se=S_se,
        records=tuple(records),
    )


def sweep(config: ExperimentConfig, workers: int = 1) -> list[MonteCarloResult]:
    """monte_carlo at every resolved point of the configuration."""
    return [
        monte_carlo(
            point,
            config.trials,
            config.seed,
            workers=workers,
            record_good_clusters=config.record_good_clusters,
        )
        for point in config.resolve_points()
    ]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv(results: list[MonteCarloResult]) -> str:
    """Render sweep results as CSV with the fixed column set."""
    lines = [CSV_HEADER]
    for res in results:
        p = res.point
        lines.append(
            ",".join(
                [
                    str(p.n),
                    str(p.m),
                    _fmt(p.gamma_r),
                    _fmt(p.gamma_c),
                    _fmt(p.epsilon),
                    _fmt(p.r),
                    p.scheduler,
                    _fmt(res.L_mean),
                    "" if res.L_se is None else _fmt(res.L_se),
                    _fmt(res.G_mean),
                    _fmt(res.potential_mean),
                    _fmt(res.self_served_mean),
                    str(res.trials),
                    str(res.master_seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def fit_scaling(points, axis: str = "n") -> ScalingFit:
    """Least squares on (ln x, ln y); slope estimates the power-law exponent."""
    points = list(points)
    if len(points) < 3:
        raise ValueError(f"need at least 3 points to fit, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("all coordinates must be strictly positive for a log-log fit")
    lx, ly = np.log(x), np.log(y)
    vx = lx - lx.mean()
    slope = float(np.dot(vx, ly - ly.mean()) / np.dot(vx, vx))
    intercept = float(ly.mean() - slope * lx.mean())
    residuals = ly - (intercept + slope * lx)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return ScalingFit(slope=slope, intercept=intercept, r_squared=r_squared, axis=axis)


# Flat key=value configuration files. Lists are comma separated; '#'
# starts a comment. Keys mirror ExperimentConfig fields.

_LIST_INT_KEYS = {"n"}
_LIST_FLOAT_KEYS = {"radius_grid"}
_INT_KEYS = {"m", "trials", "seed"}
_FLOAT_KEYS = {"m_log_coeff", "gamma_r", "epsilon", "radius", "radius_coeff"}
_STR_KEYS = {"radius_rule", "scheduler", "cache_policy"}
_BOOL_KEYS = {"record_good_clusters"}
CONFIG_KEYS = (
    _LIST_INT_KEYS | _LIST_FLOAT_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS
    | _BOOL_KEYS | {"gamma_c"}
)


def parse_config_text(text: str) -> dict:
    """Parse 'key = value' lines into a raw mapping (values still strings)."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown configuration key {key!r}")
        if not value:
            raise ValueError(f"line {lineno}: empty value for {key!r}")
        mapping[key] = value
    return mapping


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build a config from string-valued settings (file or CLI flags)."""
    kwargs = {}
    for key, value in mapping.items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown configuration key {key!r}")
        if key in _LIST_INT_KEYS:
            kwargs["n_values"] = tuple(int(v) for v in str(value).split(","))
        elif key in _LIST_FLOAT_KEYS:
            kwargs[key] = tuple(float(v) for v in str(value).split(","))
        elif key in _INT_KEYS:
            kwargs["m_value" if key == "m" else key] = int(value)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(value)
        elif key in _BOOL_KEYS:
            text = str(value).strip().lower()
            if text not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"{key} must be a boolean, got {value!r}")
            kwargs[key] = text in ("true", "1", "yes")
        elif key == "gamma_c":
            text = str(value).strip()
            kwargs[key] = text if text == "optimal" else float(text)
        else:
            kwargs[key] = str(value).strip()
    if "n_values" not in kwargs:
        raise ValueError("configuration must define n")
    return ExperimentConfig(**kwargs)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_mapping(parse_config_text(fh.read()))


def override_config(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply non-None keyword overrides on top of an existing config."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **clean)
