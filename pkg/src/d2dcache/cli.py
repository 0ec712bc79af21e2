"""Command-line front door.

Subcommands: theory (closed-form quantities), simulate (one configuration
point), sweep (parameter grid to CSV), solve (standalone MIS on an edge
list), fit (log-log slope of a two-column CSV). All randomness flows from
--seed; identical invocations produce byte-identical output regardless of
--workers.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    config_from_mapping,
    fit_scaling,
    monte_carlo,
    parse_config_text,
    results_to_csv,
    sweep,
)
from .linkplan import ConflictGraph
from .scheduling import mis_exact, mis_greedy
from .theory import (
    HIGH_REUSE,
    RegimeParams,
    eta,
    optimal_gamma_c,
    optimal_radius,
    predicted_scaling,
)

_CONFIG_FLAGS = {
    "n": "n",
    "m": "m",
    "m_log_coeff": "m_log_coeff",
    "gamma_r": "gamma_r",
    "gamma_c": "gamma_c",
    "epsilon": "epsilon",
    "radius": "radius",
    "radius_rule": "radius_rule",
    "radius_grid": "radius_grid",
    "radius_coeff": "radius_coeff",
    "scheduler": "scheduler",
    "cache_policy": "cache_policy",
    "trials": "trials",
    "seed": "seed",
    "record_good_clusters": "record_good_clusters",
}


def _add_experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value configuration file")
    sub.add_argument("--n", help="number of users; comma list sweeps it")
    sub.add_argument("--m", help="fixed library size")
    sub.add_argument("--m-log-coeff", dest="m_log_coeff",
                     help="library size rule m = ceil(coeff * ln n)")
    sub.add_argument("--gamma-r", dest="gamma_r", help="request Zipf exponent")
    sub.add_argument("--gamma-c", dest="gamma_c",
                     help="caching Zipf exponent, or 'optimal'")
    sub.add_argument("--epsilon", help="low-reuse slack exponent in (0, 1/6)")
    sub.add_argument("--radius", help="fixed collaboration radius")
    sub.add_argument("--radius-rule", dest="radius_rule",
                     help="fixed | theory | sweep")
    sub.add_argument("--radius-grid", dest="radius_grid",
                     help="comma list of radii for radius_rule=sweep")
    sub.add_argument("--radius-coeff", dest="radius_coeff",
                     help="constant c in the theory radius sqrt(c .. / n)")
    sub.add_argument("--scheduler", help="greedy | cluster | exact")
    sub.add_argument("--cache-policy", dest="cache_policy",
                     help="zipf | most_popular")
    sub.add_argument("--trials", help="trials per configuration point")
    sub.add_argument("--seed", help="master seed (default 0)")
    sub.add_argument("--workers", type=int, default=1,
                     help="parallel trial workers (output independent of k)")
    sub.add_argument("--out", help="output CSV path (stdout when omitted)")


def _build_config(args: argparse.Namespace):
    mapping: dict[str, str] = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            mapping.update(parse_config_text(fh.read()))
    for attr, key in _CONFIG_FLAGS.items():
        value = getattr(args, attr, None)
        if value is not None:
            mapping[key] = value
    if "seed" not in mapping:
        mapping["seed"] = "0"
    return config_from_mapping(mapping)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_theory(args: argparse.Namespace) -> int:
    gamma_r = float(args.gamma_r)
    epsilon = float(args.epsilon)
    lines = [f"gamma_r={gamma_r:.6f}", f"epsilon={epsilon:.6f}"]
    fields = [("gamma_r", f"{gamma_r:.6f}"), ("epsilon", f"{epsilon:.6f}")]

    params_kwargs = {"gamma_r": gamma_r, "epsilon": epsilon}
    if args.radius_coeff is not None:
        coeff = float(args.radius_coeff)
        params_kwargs.update(c1=coeff, c2=coeff)
    params = RegimeParams(**params_kwargs)
    regime = params.regime
    lines.append(f"regime={regime}")
    fields.append(("regime", regime))

    if regime != HIGH_REUSE:
        value = eta(gamma_r)
        gc = optimal_gamma_c(gamma_r, epsilon)
        lines.append(f"eta={value:.6f}")
        lines.append(f"gamma_c={gc:.6f}")
        fields.extend([("eta", f"{value:.6f}"), ("gamma_c", f"{gc:.6f}")])
    prediction = predicted_scaling(params)
    lines.append(f"n_exponent={prediction.n_exponent:.6f}")
    lines.append(f"m_exponent={prediction.m_exponent:.6f}")
    fields.extend(
        [
            ("n_exponent", f"{prediction.n_exponent:.6f}"),
            ("m_exponent", f"{prediction.m_exponent:.6f}"),
        ]
    )
    if args.n is not None and args.m is not None:
        r = optimal_radius(int(args.n), int(args.m), params)
        lines.append(f"r_opt={r:.6f}")
        fields.append(("r_opt", f"{r:.6f}"))

    lines.append(",".join(name for name, _ in fields))
    lines.append(",".join(value for _, value in fields))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    points = config.resolve_points()
    if len(points) != 1:
        raise ValueError(
            f"simulate expects exactly one configuration point, got {len(points)}; "
            "use the sweep subcommand for grids"
        )
    result = monte_carlo(
        points[0],
        config.trials,
        config.seed,
        workers=args.workers,
        record_good_clusters=config.record_good_clusters,
    )
    text = results_to_csv([result])
    lines = [
        f"L_mean={result.L_mean!r}",
        f"L_se={'' if result.L_se is None else repr(result.L_se)}",
        f"G_mean={result.G_mean!r}",
        f"potential_mean={result.potential_mean!r}",
        f"self_served_mean={result.self_served_mean!r}",
        f"trials={result.trials}",
        f"seed={result.master_seed}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        _emit(text, args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    results = sweep(config, workers=args.workers)
    _emit(results_to_csv(results), args.out)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    with open(args.graph, "r", encoding="utf-8") as fh:
        graph = ConflictGraph.from_edge_list(fh.read())
    method = args.scheduler or "exact"
    if method == "exact":
        schedule = mis_exact(graph)
    elif method == "greedy":
        schedule = mis_greedy(graph)
    else:
        raise ValueError(f"solve supports schedulers 'exact' and 'greedy', got {method!r}")
    text = (
        f"method={schedule.method}\n"
        f"size={len(schedule.active)}\n"
        f"vertices={' '.join(str(v) for v in schedule.active.tolist())}\n"
    )
    _emit(text, args.out)
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    points = []
    with open(args.table, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise ValueError(f"expected two comma-separated columns, got {line!r}")
            try:
                points.append((float(parts[0]), float(parts[1])))
            except ValueError:
                continue  # header or label row
    fit = fit_scaling(points)
    text = (
        f"slope={fit.slope!r}\n"
        f"intercept={fit.intercept!r}\n"
        f"r_squared={fit.r_squared!r}\n"
        f"points={len(points)}\n"
    )
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2dcache",
        description="Simulator for D2D caching networks under protocol-model interference",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", help="print closed-form scaling quantities")
    p_theory.add_argument("--gamma-r", dest="gamma_r", required=True)
    p_theory.add_argument("--epsilon", default="0.05")
    p_theory.add_argument("--n", help="users, for the optimal radius")
    p_theory.add_argument("--m", help="library size, for the optimal radius")
    p_theory.add_argument("--radius-coeff", dest="radius_coeff",
                          help="override the radius constant band c1 = c2")
    p_theory.add_argument("--out")
    p_theory.set_defaults(func=_cmd_theory)

    p_sim = sub.add_parser("simulate", help="Monte Carlo at one configuration point")
    _add_experiment_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo over a parameter grid, CSV out")
    _add_experiment_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_solve = sub.add_parser("solve", help="solve an edge-list conflict graph")
    p_solve.add_argument("graph", help="edge list file: 'p V E' header then 'u v' lines")
    p_solve.add_argument("--scheduler", help="exact (default) or greedy")
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=_cmd_solve)

    p_fit = sub.add_parser("fit", help="power-law exponent of a two-column CSV")
    p_fit.add_argument("table", help="CSV with x in column 1 and y in column 2")
    p_fit.add_argument("--out")
    p_fit.set_defaults(func=_cmd_fit)

    return parser


def dispatch(argv) -> int:
    """Parse argv and run; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
