"""Command-line interface.

Subcommands: bounds, divergence, plan, experiment, sketch, oracle, audit.
File formats are JSON ({"n": ..., "values": [...]} for functions and
{"n": ..., "known": [...]} for masks); tabular output is CSV with '.' as the
decimal separator. Report-producing commands also render a PNG figure next
to the CSV when an output directory is given. SUBFN_THREADS caps the
planner parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .completions import bounds_for, sam_upper_iterative
from .core import (
    FunctionClass,
    IncompleteSetFunction,
    load_mask,
    load_set_function,
    minimal_information,
)
from .divergence import audit_divergence_supermodularity, divergence
from .distributions import DistributionSpec, pointmass
from .errors import SubfnError
from .harness import ExperimentConfig, run_experiment
from .lp import CoverInstance, min_fractional_cover
from .oracles import (
    brute_cover_upper,
    brute_partition_upper,
    brute_s_lower,
    brute_sam_lower,
    construct_s_tight_extension,
    enumerate_cover_optimum,
    sample_extension,
)
from .planners import (
    PlanConfig,
    offline_greedy,
    offline_optimal,
    oracle_greedy,
    oracle_optimal,
    random_plan,
)
from .sketch import mean_alpha, sketch_rows


def _weights(arg):
    if arg is None:
        return None
    return [float(x) for x in arg.split(",")]


def _function_class(args) -> FunctionClass:
    return FunctionClass.of(args.function_class, _weights(getattr(args, "weights", None)))


def _incomplete(args) -> IncompleteSetFunction:
    fn = load_set_function(args.fn)
    if getattr(args, "mask", None):
        mask = load_mask(args.mask)
    else:
        mask = minimal_information(fn.ground)
    return IncompleteSetFunction(fn, mask)


def _dist(args) -> DistributionSpec:
    if args.dist == "pointmass":
        if not getattr(args, "fn", None):
            raise SystemExit("pointmass distribution needs --fn")
        return pointmass(load_set_function(args.fn))
    return DistributionSpec(args.dist, args.n, seed=args.seed)


def _emit_csv(rows, columns, out_path=None):
    target = io.StringIO()
    writer = csv.DictWriter(target, fieldnames=columns)
    writer.writeheader()
    writer.writerows(rows)
    text = target.getvalue()
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _cmd_bounds(args):
    inc = _incomplete(args)
    bounds = bounds_for(inc, _function_class(args))
    payload = {
        "n": inc.n,
        "class": bounds.function_class.tag,
        "lower": list(map(float, bounds.lower.values)),
        "upper": list(map(float, bounds.upper.values)),
    }
    if args.iterative_upper:
        payload["iterative_upper"] = list(
            map(float, sam_upper_iterative(inc, args.max_steps, args.eps).values)
        )
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text)


def _cmd_divergence(args):
    inc = _incomplete(args)
    report = divergence(inc, _function_class(args), args.norm)
    print(f"{report.value:.12g}")
    if args.gaps:
        print(json.dumps({"per_set_gap": list(map(float, report.per_set_gap.values))}))


def _cmd_plan(args):
    cls = _function_class(args)
    cfg = PlanConfig(
        t=args.t, kappa=args.kappa, function_class=cls, norm=args.norm, seed=args.seed
    )
    if args.planner in ("oracle_greedy", "oracle_optimal"):
        if not args.fn:
            raise SystemExit("oracle planners need --fn")
        target = load_set_function(args.fn)
        planner = oracle_greedy if args.planner == "oracle_greedy" else oracle_optimal
        result = planner(target, cfg)
    else:
        dist = _dist(args)
        if args.planner == "offline_greedy":
            result = offline_greedy(dist, cfg)
        elif args.planner == "offline_optimal":
            result = offline_optimal(dist, cfg)
        else:
            result = random_plan(dist, cfg)
    rows = [
        {"step": i, "query": ("" if i == 0 else result.queries[i - 1]),
         "estimated_divergence": result.step_divergence[i]}
        for i in range(len(result.step_divergence))
    ]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _emit_csv(rows, ("step", "query", "estimated_divergence"), out / "plan.csv")
        (out / "plan.json").write_text(
            json.dumps(
                {
                    "planner": args.planner,
                    "queries": result.queries,
                    "step_divergence": result.step_divergence,
                    "samples_used": result.samples_used,
                },
                indent=2,
            ),
            encoding="utf-8",
        )
        if not args.no_plot:
            from .plotting import render_plan_curve

            render_plan_curve(
                result.step_divergence, out / "plan.png", label=args.planner
            )
    else:
        _emit_csv(rows, ("step", "query", "estimated_divergence"))


def _cmd_experiment(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        config = ExperimentConfig.from_json_dict(json.load(fh))
    record = run_experiment(config, args.out, render_figure=not args.no_plot)
    print(json.dumps({"wall_clock_seconds": record.wall_clock, **record.outputs}))


def _cmd_sketch(args):
    cls = _function_class(args)
    cfg = PlanConfig(
        t=1, kappa=args.kappa, function_class=cls, norm=args.norm, seed=args.seed
    )
    budgets = [int(b) for b in args.budgets.split(",")]
    rows = sketch_rows(_dist(args), cfg, budgets, samples=args.samples)
    means = mean_alpha(rows)
    columns = ("distribution", "n", "budget", "sample_index", "alpha", "witness")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _emit_csv(rows, columns, out / "sketch.csv")
        if not args.no_plot:
            from .plotting import render_alpha_curve

            render_alpha_curve(means, out / "alpha.png", title=args.dist)
    else:
        _emit_csv(rows, columns)
    for budget, value in means.items():
        print(f"budget {budget}: mean alpha {value:.4f}", file=sys.stderr)


def _cmd_oracle(args):
    inc = _incomplete(args)
    if args.op == "partition-upper":
        print(f"{brute_partition_upper(inc, args.set):.12g}")
    elif args.op == "cover-upper":
        print(f"{brute_cover_upper(inc, args.set):.12g}")
    elif args.op == "s-lower":
        print(f"{brute_s_lower(inc, args.set):.12g}")
    elif args.op == "sam-lower":
        print(f"{brute_sam_lower(inc, args.set):.12g}")
    elif args.op == "cover-lp":
        candidates = [(t, inc.fn[t]) for t in inc.known_ids() if t & args.set]
        lp = min_fractional_cover(CoverInstance(args.set, candidates))
        brute = enumerate_cover_optimum(CoverInstance(args.set, candidates))
        print(json.dumps({"simplex": lp.objective, "vertex_enumeration": brute}))
    elif args.op == "s-tight-extension":
        ext = construct_s_tight_extension(inc, args.set)
        print(json.dumps({"n": ext.n, "values": list(map(float, ext.values))}))
    else:  # sample-extension
        ext = sample_extension(inc, _function_class(args), seed=args.seed)
        print(json.dumps({"n": ext.fn.n, "values": list(map(float, ext.fn.values))}))


def _cmd_audit(args):
    fn = load_set_function(args.fn)
    players = tuple(args.players) if args.players else None
    violations = audit_divergence_supermodularity(
        fn, _function_class(args), mode=args.mode, players=players
    )
    print(f"{len(violations)} violation(s)")
    for v in violations:
        print(f"revealed={list(v.revealed)} first={v.first} second={v.second} deficit={v.deficit:.6g}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subfn",
        description="Completions, divergence, and query planning for partial set functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_class(p):
        p.add_argument("--class", dest="function_class", default="S",
                       help="one of s, sam, xos, ss, ca")
        p.add_argument("--weights", default=None,
                       help="comma-separated CA weights, one per element")

    p = sub.add_parser("bounds", help="lower/upper completion of a partial function")
    p.add_argument("--fn", required=True)
    p.add_argument("--mask", default=None)
    add_class(p)
    p.add_argument("--out", default=None)
    p.add_argument("--iterative-upper", action="store_true",
                   help="also report the iterative monotone upper function")
    p.add_argument("--max-steps", type=int, default=32)
    p.add_argument("--eps", type=float, default=1e-9)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("divergence", help="norm of the completion gap")
    p.add_argument("--fn", required=True)
    p.add_argument("--mask", default=None)
    add_class(p)
    p.add_argument("--norm", default="l1", choices=("l1", "l2", "linf"))
    p.add_argument("--gaps", action="store_true")
    p.set_defaults(func=_cmd_divergence)

    p = sub.add_parser("plan", help="choose value queries to shrink divergence")
    p.add_argument("--dist", default="convex",
                   choices=("convex", "xos6", "coverage", "kbudget", "pointmass"))
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fn", default=None, help="function file for oracle/pointmass")
    p.add_argument("--planner", default="offline_greedy",
                   choices=("offline_greedy", "offline_optimal", "oracle_greedy",
                            "oracle_optimal", "random"))
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--kappa", type=int, default=90)
    add_class(p)
    p.add_argument("--norm", default="l1", choices=("l1", "l2", "linf"))
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("sketch", help="multiplicative gap of planned bounds")
    p.add_argument("--dist", default="coverage",
                   choices=("convex", "xos6", "coverage", "kbudget", "pointmass"))
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fn", default=None)
    p.add_argument("--budgets", required=True, help="comma-separated budgets")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--kappa", type=int, default=90)
    add_class(p)
    p.add_argument("--norm", default="l1", choices=("l1", "l2", "linf"))
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_sketch)

    p = sub.add_parser("oracle", help="brute-force reference computations")
    p.add_argument("--op", required=True,
                   choices=("partition-upper", "cover-upper", "s-lower", "sam-lower",
                            "cover-lp", "sample-extension", "s-tight-extension"))
    p.add_argument("--fn", required=True)
    p.add_argument("--mask", default=None)
    p.add_argument("--set", type=int, default=0)
    add_class(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("audit", help="supermodularity audit of the divergence")
    p.add_argument("--fn", required=True)
    add_class(p)
    p.add_argument("--mode", default="exhaustive", choices=("exhaustive", "targeted"))
    p.add_argument("--players", type=int, nargs=4, default=None,
                   metavar=("I", "J", "K", "L"))
    p.set_defaults(func=_cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SubfnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
