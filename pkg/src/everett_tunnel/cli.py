"""Command-line frontend.

Subcommands: transmit, evolve, branch, worlds, mqt, sweep. Every command is
deterministic: identical inputs give byte-identical output files (floats
printed with 12 significant digits, \n line endings, fixed key order).

Exit codes, stable for scripting:
    0  success
    2  usage or validation error (one-line diagnostic on stderr)
    3  physics precondition not met (scattering incomplete / no growth)
    4  edge contamination under --strict

Heavy modules load inside the subcommand handlers, so the cheap commands
(mqt, worlds) stay snappy and never touch the solver stack.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3
EXIT_CONTAMINATED = 4


def _fmt(x: float) -> str:
    """12-significant-digit float, the one number format of every output."""
    s = format(float(x), ".12g")
    if "inf" in s or "nan" in s:
        raise ValueError(f"non-finite value in output: {x}")
    return s


def _to_json(obj, indent: int = 0) -> str:
    """Tiny serializer so floats render via _fmt (stdlib json re-formats them)."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [f"{pad}  {_to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _default_jobs() -> int:
    env = os.environ.get("EVERETT_TUNNEL_THREADS")
    if env is None:
        return os.cpu_count() or 1
    try:
        jobs = int(env)
    except ValueError:
        raise ValueError(f"EVERETT_TUNNEL_THREADS must be an integer, got {env!r}")
    if jobs < 1:
        raise ValueError(f"EVERETT_TUNNEL_THREADS must be >= 1, got {jobs}")
    return jobs


# ---------------------------------------------------------------- transmit

def cmd_transmit(args: argparse.Namespace) -> int:
    from .analytic import transmission_point
    from .core import RectBarrier

    try:
        barrier = RectBarrier(v0=args.v0, length=args.length, x_start=0.0)
        if args.mass <= 0:
            raise ValueError(f"mass must be positive, got {args.mass}")
        if args.steps < 1:
            raise ValueError(f"steps must be >= 1, got {args.steps}")
        if not (0 < args.emin <= args.emax):
            raise ValueError(f"need 0 < emin <= emax, got [{args.emin}, {args.emax}]")
        if args.steps == 1 and args.emin != args.emax:
            raise ValueError("steps = 1 needs emin == emax")
        if args.steps > 1 and args.emin == args.emax:
            raise ValueError("steps > 1 needs emin < emax")
        if args.steps == 1:
            energies = [args.emin]
        else:
            span = args.emax - args.emin
            energies = [args.emin + i * span / (args.steps - 1) for i in range(args.steps)]
        points = [transmission_point(args.mass, barrier, e) for e in energies]
    except ValueError as exc:
        return _fail(str(exc))

    lines = ["energy,kappa,p_approx,p_exact"]
    for p in points:
        kappa = _fmt(p.kappa) if p.kappa is not None else ""
        approx = _fmt(p.p_approx) if p.p_approx is not None else ""
        lines.append(f"{_fmt(p.energy)},{kappa},{approx},{_fmt(p.p_exact)}")
    _emit("\n".join(lines) + "\n", args.out)

    if args.plot:
        from .plots import plot_transmission

        plot_transmission(points, Path(args.out).with_suffix(".png"))
    return EXIT_OK


# ------------------------------------------------------------------ evolve

def _series_csv(series) -> str:
    lines = ["t,w_reflected,w_transmitted,p_inside,norm,e_reflected,e_transmitted"]
    for i in range(series.n_rows):
        lines.append(
            ",".join(
                _fmt(col[i])
                for col in (
                    series.times,
                    series.w_reflected,
                    series.w_transmitted,
                    series.p_inside,
                    series.norm,
                    series.e_reflected,
                    series.e_transmitted,
                )
            )
        )
    return "\n".join(lines) + "\n"


def cmd_evolve(args: argparse.Namespace) -> int:
    from .branch import (
        ScatteringIncompleteError,
        branch_set_from_run,
        reflection_probability,
        tunneling_probability,
    )
    from .config import ConfigError, config_echo, load_config
    from .evolve import run
    from .timing import (
        NoGrowthError,
        branching_duration,
        branching_energy_rate,
        energy_decomposition,
        separation_energy,
    )

    try:
        settings = load_config(args.config)
    except ConfigError as exc:
        return _fail(str(exc))

    final, series = run(settings.evolve, settings.units)
    prefix = args.out
    Path(f"{prefix}.series.csv").write_text(
        _series_csv(series), encoding="utf-8", newline=""
    )
    if args.plot:
        from .plots import plot_series

        plot_series(series, f"{prefix}.series.png")

    try:
        branches = branch_set_from_run(series)
        delta_rate, eval_time = branching_energy_rate(series, settings.units)
    except (ScatteringIncompleteError, NoGrowthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE

    decomp = energy_decomposition(
        branches,
        [float(series.e_reflected[-1]), float(series.e_transmitted[-1])],
    )
    result = {
        "p_tunnel": tunneling_probability(branches),
        "p_reflect": reflection_probability(branches),
        "weights": list(branches.weights),
        "delta_e_separation": separation_energy(decomp),
        "delta_e_rate": delta_rate,
        "tau_b": branching_duration(delta_rate, settings.units),
        "eval_time": eval_time,
        "edge_contamination": series.edge_contamination,
        "config_echo": config_echo(settings),
    }
    Path(f"{prefix}.result.json").write_text(
        _to_json(result) + "\n", encoding="utf-8", newline=""
    )
    if args.strict and series.edge_contamination:
        print("error: probability reached the domain edges (strict mode)", file=sys.stderr)
        return EXIT_CONTAMINATED
    return EXIT_OK


# ------------------------------------------------------------------ branch

def cmd_branch(args: argparse.Namespace) -> int:
    import math

    from .branch import (
        BranchSet,
        DecoherenceModel,
        build_density_matrix,
        coherence_measure,
        events_to_decohere,
        tunneling_probability,
    )

    try:
        raw = [float(w) for w in args.weights.split(",") if w.strip()]
        if not raw:
            raise ValueError("empty weights list")
        total = math.sqrt(sum(w * w for w in raw))
        if total <= 0.0:
            raise ValueError("weights must not all be zero")
        branches = BranchSet(
            weights=tuple(w / total for w in raw), split_index=args.split
        )
        model = DecoherenceModel(
            lambda_per_event=args.lam, epsilon_coherence=args.epsilon
        )
    except ValueError as exc:
        return _fail(str(exc))

    n_dec = events_to_decohere(branches, model)
    coherence = [
        coherence_measure(build_density_matrix(branches, model, n))
        for n in range(n_dec + 1)
    ]
    result = {
        "p_tunnel": tunneling_probability(branches),
        "coherence_at": coherence,
        "n_decohere": n_dec,
    }
    _emit(_to_json(result) + "\n", args.out)
    return EXIT_OK


# ------------------------------------------------------------------ worlds

def cmd_worlds(args: argparse.Namespace) -> int:
    from .branch import world_count_paper, world_count_sequential

    try:
        paper = world_count_paper(args.events, args.outcomes)
        sequential = world_count_sequential(args.events, args.outcomes)
    except ValueError as exc:
        return _fail(str(exc))
    _emit(f"paper_formula = {paper}\nsequential = {sequential}\n", args.out)
    return EXIT_OK


# --------------------------------------------------------------------- mqt

def cmd_mqt(args: argparse.Namespace) -> int:
    from .timing import MacroParams, macroscopic_tunneling_time, thermal_branching_events

    if args.fp_ghz is not None and args.tau_b_ps is not None:
        return _fail("give either --fp-ghz or --tau-b-ps, not both")
    try:
        if args.tau_b_ps is not None:
            tau_b_ps = args.tau_b_ps
        else:
            fp = 10.0 if args.fp_ghz is None else args.fp_ghz
            if fp <= 0:
                raise ValueError(f"fp-ghz must be > 0, got {fp}")
            tau_b_ps = 1000.0 / fp  # 1/f_p, GHz -> ps
        params = MacroParams(
            t_env=args.te_mk * 1e-3,
            t_crossover=args.ts_mk * 1e-3,
            alpha=args.alpha,
            tau_b=tau_b_ps,  # carried in ps; the model only scales it
        )
    except ValueError as exc:
        return _fail(str(exc))

    result = {
        "n_b": thermal_branching_events(params),
        "tau_b_ps": params.tau_b,
        "tau_t_ps": macroscopic_tunneling_time(params),
    }
    _emit(_to_json(result) + "\n", args.out)
    return EXIT_OK


# ------------------------------------------------------------------- sweep

def _sweep_one(payload: tuple[dict[str, str], str, float]) -> tuple[str, str, str, str]:
    """One sweep run in a worker process; never raises."""
    values, key, param = payload
    from .branch import branch_set_from_run, tunneling_probability
    from .config import build_settings
    from .evolve import run
    from .timing import branching_duration, branching_energy_rate

    try:
        overridden = dict(values)
        overridden[key] = repr(param)
        settings = build_settings(overridden, source=f"sweep {key}={param!r}")
        _, series = run(settings.evolve, settings.units)
        branches = branch_set_from_run(series)
        delta_rate, _ = branching_energy_rate(series, settings.units)
        return (
            _fmt(tunneling_probability(branches)),
            _fmt(branching_duration(delta_rate, settings.units)),
            _fmt(delta_rate),
            "",
        )
    except Exception as exc:  # every failure becomes a row, not an abort
        reason = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        return ("", "", "", reason)


def cmd_sweep(args: argparse.Namespace) -> int:
    from concurrent.futures import ProcessPoolExecutor

    from .config import SWEEPABLE_KEYS, ConfigError, parse_config_values

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot read config file {args.config}: {exc}")
    try:
        values = parse_config_values(text, source=str(args.config))
    except ConfigError as exc:
        return _fail(str(exc))

    if args.vary not in SWEEPABLE_KEYS:
        return _fail(
            f"cannot sweep {args.vary!r}; pick one of {', '.join(SWEEPABLE_KEYS)}"
        )
    if args.steps < 1:
        return _fail(f"steps must be >= 1, got {args.steps}")
    try:
        jobs = args.jobs if args.jobs is not None else _default_jobs()
    except ValueError as exc:
        return _fail(str(exc))
    if jobs < 1:
        return _fail(f"jobs must be >= 1, got {jobs}")

    lo, hi = args.start, args.stop
    if args.steps == 1:
        params = [lo]
    else:
        params = [lo + i * (hi - lo) / (args.steps - 1) for i in range(args.steps)]

    payloads = [(values, args.vary, p) for p in params]
    if jobs == 1:
        results = [_sweep_one(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, payloads))

    lines = ["param,p_tunnel,tau_b,delta_e_rate,error"]
    for param, row in zip(params, results):
        lines.append(f"{_fmt(param)},{row[0]},{row[1]},{row[2]},{row[3]}")
    _emit("\n".join(lines) + "\n", args.out)

    if args.plot:
        from .plots import plot_sweep

        p_vals = [float(r[0]) if r[0] else None for r in results]
        plot_sweep(params, p_vals, args.vary, Path(args.out).with_suffix(".png"))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="everett-tunnel",
        description="Rectangular-barrier tunneling: exact transmission, "
        "wavepacket evolution, branch bookkeeping, branching times.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument(
        "--strict", action="store_true", help="fail (exit 4) on edge contamination"
    )

    p = sub.add_parser(
        "transmit", parents=[common], help="tabulate analytic transmission vs energy"
    )
    p.add_argument("--v0", type=float, required=True, help="barrier height")
    p.add_argument("--length", type=float, required=True, help="barrier width")
    p.add_argument("--mass", type=float, default=1.0, help="particle mass")
    p.add_argument("--emin", type=float, required=True, help="lowest energy (> 0)")
    p.add_argument("--emax", type=float, required=True, help="highest energy")
    p.add_argument("--steps", type=int, required=True, help="number of energies")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
    p.set_defaults(func=cmd_transmit, needs_out_for_plot=True)

    p = sub.add_parser(
        "evolve", parents=[common], help="propagate a packet from a config file"
    )
    p.add_argument("config", help="key = value config file")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
    p.set_defaults(func=cmd_evolve, needs_out=True, needs_out_for_plot=True)

    p = sub.add_parser("branch", parents=[common], help="decoherence bookkeeping")
    p.add_argument("--weights", required=True, help="comma-separated branch weights")
    p.add_argument("--split", type=int, default=1, help="reflected-world count k")
    p.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, help="overlap decay per event"
    )
    p.add_argument("--epsilon", type=float, default=1e-3, help="decoherence threshold")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("worlds", parents=[common], help="world-count formulas")
    p.add_argument("--events", type=int, required=True, help="quantum events N")
    p.add_argument("--outcomes", type=int, required=True, help="outcomes per event d")
    p.set_defaults(func=cmd_worlds)

    p = sub.add_parser("mqt", parents=[common], help="macroscopic thermal tunneling time")
    p.add_argument("--te-mk", type=float, default=10.0, help="environment T in mK")
    p.add_argument("--ts-mk", type=float, default=100.0, help="crossover T in mK")
    p.add_argument("--alpha", type=float, default=1.0, help="thermal exponent")
    p.add_argument("--fp-ghz", type=float, default=None, help="plasma frequency in GHz")
    p.add_argument("--tau-b-ps", type=float, default=None, help="branching duration in ps")
    p.set_defaults(func=cmd_mqt)

    p = sub.add_parser(
        "sweep", parents=[common], help="parallel parameter sweep of evolve runs"
    )
    p.add_argument("config", help="key = value config file")
    p.add_argument("--vary", required=True, help="config key to sweep")
    p.add_argument("--from", dest="start", type=float, required=True, help="first value")
    p.add_argument("--to", dest="stop", type=float, required=True, help="last value")
    p.add_argument("--steps", type=int, required=True, help="number of values")
    p.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="worker processes (default: EVERETT_TUNNEL_THREADS or CPU count)",
    )
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
    p.set_defaults(func=cmd_sweep, needs_out_for_plot=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_out", False) and args.out is None:
        return _fail(f"{args.command} requires --out")
    if getattr(args, "needs_out_for_plot", False) and getattr(args, "plot", False):
        if args.out is None:
            return _fail("--plot needs --out to know where the PNG goes")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
