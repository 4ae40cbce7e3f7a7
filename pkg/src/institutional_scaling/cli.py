"""Command line front end.

Every subcommand writes to ``--out`` when given and to stdout otherwise
(``simulate`` treats ``--out`` as a directory). Failures print a single line
``error[<kind>]: <message>`` to stderr and exit with 2 (validation),
3 (numerical) or 4 (I/O).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .alignment import (
    CategoricalPolicy,
    GrpoGroup,
    PreferencePair,
    dpo_loss,
    grpo_loss,
    kl_divergence,
    normalize_group_advantages,
    rlhf_objective,
)
from .calibration import load_figure2
from .ecosystem import CapabilitySeries, fit_piecewise_breakpoint, synthetic_capability_series
from .errors import FormatError, InstitutionalError, ValidationError
from .harness import RNG_ALGORITHM, run_scenario, sweep_csv, sweep_fitness_curve, to_csv, write_text
from .io import environment_from_dict, load_scenario, read_json, resolve
from .orchestration import inversion_search
from .scaling_law import find_optimal_scale

DEFAULT_SEED = 0


class _Parser(argparse.ArgumentParser):
    # usage errors become one-line validation errors like every other failure
    def error(self, message):
        raise ValidationError(message)


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--fixture-dir", default=default,
                        help="directory searched for bare fixture names (default: packaged fixtures)")
    parser.add_argument("--out", default=default,
                        help="output file (directory for simulate); stdout when omitted")
    parser.add_argument("--seed", type=int, default=default,
                        help="seed for the PCG64 generator used by noisy subcommands")
    parser.add_argument("--lambda-crit", type=float, default=default,
                        help="punctuation threshold override for simulate")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="institutional-scaling", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    # the same flags are accepted after the subcommand name
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", parents=[common], help="fitness and gradient on a log grid")
    p.add_argument("environment", help="environment JSON (name or path)")
    p.add_argument("--low", type=float, default=1.0)
    p.add_argument("--high", type=float, default=400.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--bits", type=int, default=16)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimum", parents=[common], help="locate the fitness-maximizing scale")
    p.add_argument("environments", nargs="*",
                   help="environment JSON files; defaults to the calibrated reference pack")
    p.add_argument("--low", type=float, default=1.0)
    p.add_argument("--high", type=float, default=1000.0)
    p.add_argument("--bits", type=int, default=16)
    p.set_defaults(func=cmd_optimum)

    p = sub.add_parser("invert", parents=[common], help="search for an orchestrated-system inversion")
    p.add_argument("--config", default="figure3.json",
                   help="inversion config JSON; the flags below override its fields")
    p.add_argument("--environment")
    p.add_argument("--pool", type=float, nargs="+")
    p.add_argument("--frontier", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--min-k", type=int)
    p.add_argument("--max-k", type=int)
    p.add_argument("--bits", type=int)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("simulate", parents=[common], help="run an ecosystem scenario")
    p.add_argument("scenario", help="scenario JSON (name or path)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("breakpoint", parents=[common], help="two-segment fit of a capability series")
    p.add_argument("series", nargs="?",
                   help="CSV with columns t,value; a synthetic series is used when omitted")
    p.add_argument("--noise", type=float, default=0.0, help="noise sd for the synthetic series")
    p.add_argument("--start", type=float, default=2022.0)
    p.add_argument("--end", type=float, default=2026.35)
    p.add_argument("--discontinuous", action="store_true",
                   help="fit two independent lines instead of a continuous kink")
    p.set_defaults(func=cmd_breakpoint)

    p = sub.add_parser("align-demo", parents=[common], help="evaluate the alignment losses on toy inputs")
    p.add_argument("--outcomes", type=int, default=4)
    p.add_argument("--beta", type=float, default=0.1)
    p.set_defaults(func=cmd_align_demo)
    return parser


# -- helpers -------------------------------------------------------------------


def _json_path(name, fixture_dir) -> Path:
    p = Path(name)
    if not p.suffix:
        p = p.with_suffix(".json")
    return resolve(p, fixture_dir)


def _load_env(name, fixture_dir):
    path = _json_path(name, fixture_dir)
    return environment_from_dict(read_json(path), where=path.name)


def _emit(args, text: str) -> None:
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _rng(args):
    seed = DEFAULT_SEED if args.seed is None else args.seed
    return seed, np.random.Generator(np.random.PCG64(seed))


# -- subcommands -----------------------------------------------------------------


def cmd_sweep(args) -> None:
    env = _load_env(args.environment, args.fixture_dir)
    rows = sweep_fitness_curve(env, (args.low, args.high, args.samples), args.bits)
    _emit(args, sweep_csv(rows))


def cmd_optimum(args) -> None:
    if args.environments:
        envs = [_load_env(name, args.fixture_dir) for name in args.environments]
    else:
        envs = [env for env, _ in load_figure2(args.fixture_dir).values()]
    rows = []
    for env in envs:
        rep = find_optimal_scale(env, args.bits, (args.low, args.high))
        rows.append((env.name, args.bits, rep.n_star, rep.fitness_at_star,
                     rep.gradient_residual, rep.iterations))
    header = ("environment", "bits", "n_star", "fitness_at_star", "gradient_residual", "iterations")
    _emit(args, to_csv(header, rows))


def cmd_invert(args) -> None:
    path = _json_path(args.config, args.fixture_dir)
    cfg = read_json(path)
    if not isinstance(cfg, dict):
        raise ValidationError(f"{path.name}: expected an object")

    def pick(flag, key, default=None):
        if flag is not None:
            return flag
        if key in cfg:
            return cfg[key]
        if default is None:
            raise ValidationError(f"{path.name}.{key}: missing (give it in the file or as a flag)")
        return default

    env_name = pick(args.environment, "environment")
    env = _load_env(env_name, args.fixture_dir)
    pool = pick(args.pool, "pool")
    frontier = pick(args.frontier, "frontier")
    eta = pick(args.eta, "eta")
    max_k = pick(args.max_k, "max_k", len(pool))
    min_k = args.min_k if args.min_k is not None else min(cfg.get("min_k", 1), max_k)
    bits = pick(args.bits, "bits", 16)
    res = inversion_search(env, frontier, pool, max_k, eta, bits, min_k=min_k)
    system = None
    if res.system is not None:
        system = {
            "members": [m.scale for m in res.system.members],
            "k": res.system.k,
            "total_scale": res.system.total_scale,
        }
    _emit(args, _dumps({
        "environment": env.name,
        "frontier_scale": frontier,
        "eta": eta,
        "min_k": min_k,
        "max_k": max_k,
        "system": system,
        "agent_fitness": res.agent_fitness,
        "frontier_fitness": res.frontier_fitness,
        "verdict": res.verdict,
        "hypothesis_met": res.hypothesis_met,
        "subsets_evaluated": res.subsets_evaluated,
    }))


def cmd_simulate(args) -> None:
    spec = load_scenario(_json_path(args.scenario, args.fixture_dir), args.fixture_dir)
    report = run_scenario(spec, lambda_crit=args.lambda_crit, seed=args.seed)
    if args.out:
        report.write(args.out)
    else:
        sys.stdout.write(report.summary_json())


def _read_series(path) -> CapabilitySeries:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        points = [(float(r["t"]), float(r["value"])) for r in rows]
    except (KeyError, TypeError, ValueError):
        raise ValidationError(f"{path}: expected numeric columns 't' and 'value'") from None
    if not points:
        raise ValidationError(f"{path}: no data rows")
    return CapabilitySeries.from_points(points)


def cmd_breakpoint(args) -> None:
    doc = {}
    if args.series:
        series = _read_series(args.series)
        doc["source"] = str(args.series)
    else:
        seed, rng = _rng(args)
        series = synthetic_capability_series(args.start, args.end, noise=args.noise, rng=rng)
        doc["source"] = "synthetic"
        doc.update({"seed": seed, "rng": RNG_ALGORITHM, "noise": args.noise})
    fit = fit_piecewise_breakpoint(series, continuous=not args.discontinuous)
    doc.update({
        "samples": int(series.t.size),
        "continuous": fit.continuous,
        "t_star": fit.t_star,
        "index": fit.index,
        "t_nearest_sample": float(series.t[fit.index]),
        "slope_pre": fit.slope_pre,
        "slope_post": fit.slope_post,
        "sse": fit.sse,
    })
    _emit(args, _dumps(doc))


def cmd_align_demo(args) -> None:
    if args.outcomes < 2:
        raise ValidationError(f"--outcomes must be >= 2, got {args.outcomes}")
    seed, rng = _rng(args)
    ref = CategoricalPolicy(tuple(rng.dirichlet(np.ones(args.outcomes))))
    policy = CategoricalPolicy(tuple(rng.dirichlet(np.ones(args.outcomes))))
    rewards = [float(r) for r in rng.normal(size=args.outcomes)]
    lp = np.log(rng.uniform(0.05, 1.0, size=4))
    lp = [float(x) for x in lp]
    pair = PreferencePair(*lp)
    scores = rng.normal(size=6)
    adv = normalize_group_advantages(scores)
    ratios = rng.uniform(0.7, 1.3, size=adv.size)
    group = GrpoGroup(tuple(ratios), tuple(adv))
    _emit(args, _dumps({
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "beta": args.beta,
        "kl_policy_ref": kl_divergence(policy, ref),
        "rlhf_objective": rlhf_objective(policy, ref, rewards, args.beta),
        "rlhf_objective_at_ref": rlhf_objective(ref, ref, rewards, args.beta),
        "dpo_margin": pair.margin,
        "dpo_loss": dpo_loss(pair, args.beta),
        "dpo_loss_zero_margin": dpo_loss(PreferencePair(lp[0], lp[0], lp[1], lp[1]), args.beta),
        "grpo_advantages": [float(a) for a in adv],
        "grpo_loss": grpo_loss(group),
        "grpo_loss_unit_ratios": grpo_loss(GrpoGroup((1.0,) * adv.size, tuple(adv))),
    }))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except InstitutionalError as exc:
        msg = " ".join(str(exc).split())
        print(f"error[{exc.kind}]: {msg}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
