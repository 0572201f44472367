"""Command-line interface.

Subcommands cover the full workflow: generate or inspect instances,
solve the single-step problems into pof.csv/pos.csv sweeps, run the
multi-step simulator into traj.csv, build the adversarial lower-bound
instances, and replay the canned experiment presets.  Alphas on the
command line are fractions of the score range and are scaled by x_max
internally.  Exit codes: 0 success, 2 input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import data_io, presets
from .lp import LpError
from .model import assumptions_report
from .simulate import POLICY_KINDS, SimConfig, run
from .single_step import (
    build_lb_general,
    build_lb_tv,
    price_of_fairness,
    price_of_simplicity,
    tv_distance,
)


def _parse_alpha_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"alpha grid {text!r} must look like lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"alpha grid {text!r} has non-numeric parts") from None
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("alpha grid must satisfy 0 <= lo <= hi <= 1")
    return presets.alpha_grid(lo, hi, step)


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"{what} {text!r} must be a comma-separated integer list") from None
    if not values:
        raise ValueError(f"{what} list is empty")
    return values


def _alphas(args) -> np.ndarray:
    if args.alpha_grid is not None:
        return _parse_alpha_grid(args.alpha_grid)
    alpha = args.alpha if args.alpha is not None else 0.01
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return np.array([alpha])


def cmd_check(args) -> int:
    instance = data_io.load_instance(args.instance)
    report = assumptions_report(instance, beta_hint=args.beta, stability_n=args.stability_n)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_gen(args) -> int:
    if args.kind == "gaussian":
        if args.stddev is not None and args.variance is not None:
            raise ValueError("pass either --variance or --stddev, not both")
        variance = args.stddev**2 if args.stddev is not None else (
            args.variance if args.variance is not None else 30.0
        )
        instance = data_io.synth_gaussian(
            mean_a=args.mean_a,
            mean_b=args.mean_b,
            variance=variance,
            x_max=args.x_max,
            u_plus=args.u_plus,
            u_minus=args.u_minus,
            c_plus=args.c_plus,
            c_minus=args.c_minus,
            w_a=args.w_a,
        )
    elif args.kind == "geometric":
        instance = data_io.synth_geometric_failure(
            p_fail=args.p_fail,
            mean_a=args.mean_a,
            mean_b=args.mean_b,
            variance=args.variance if args.variance is not None else 30.0,
            x_max=args.x_max,
            u_plus=args.u_plus,
            u_minus=args.u_minus,
            c_plus=args.c_plus,
            c_minus=args.c_minus,
            w_a=args.w_a,
        )
    else:  # from-csv
        from .model import Economics, GroupDistribution, Instance, ScoreGrid, SuccessProb

        dist_a, dist_b = data_io.load_group_csv(args.csv, args.x_max)
        grid = ScoreGrid(args.x_max)
        instance = Instance(
            grid=grid,
            p=SuccessProb.linear(grid),
            econ=Economics(args.u_plus, args.u_minus, args.c_plus, args.c_minus),
            dist_a=dist_a,
            dist_b=dist_b,
            w_a=args.w_a,
            w_b=1.0 - args.w_a,
            metadata={"family": "from-csv", "source": args.csv},
        )
    data_io.save_instance(instance, args.out)
    print(args.out)
    return 0


def cmd_single(args) -> int:
    instance = data_io.load_instance(args.instance)
    x_max = instance.grid.x_max
    reports = []
    for frac in _alphas(args):
        r = price_of_fairness(
            instance,
            float(frac) * x_max,
            method=args.method,
            omega_grid_size=args.omega_grid,
            non_degrading=args.non_degrading,
        )
        reports.append(replace(r, alpha=float(frac)))
    data_io.write_pof_csv(args.out, reports)
    print(args.out)
    return 0


def cmd_pos(args) -> int:
    instance = data_io.load_instance(args.instance)
    x_max = instance.grid.x_max
    sizes = _parse_int_list(args.omega_grid, "omega grid")
    if any(k < 1 for k in sizes):
        raise ValueError("omega grid sizes must be >= 1")
    reports = []
    for k in sizes:
        for frac in _alphas(args):
            r = price_of_simplicity(instance, float(frac) * x_max, omega_grid_size=k)
            reports.append(replace(r, alpha=float(frac)))
    data_io.write_pos_csv(args.out, reports)
    print(args.out)
    return 0


def cmd_multi(args) -> int:
    instance = data_io.load_instance(args.instance)
    config = SimConfig(
        n_agents=args.n,
        horizon=args.steps,
        seeds=_parse_int_list(args.seeds, "seeds"),
        policy=args.policy,
        alpha=args.alpha if args.alpha is not None else 0.01,
        alpha_is_absolute=args.alpha_absolute,
        opportunities=args.opportunities,
        omega_grid_size=args.omega_grid,
    )
    data_io.write_traj_csv(args.out, run(config, instance))
    print(args.out)
    return 0


def cmd_lb(args) -> int:
    if args.family == "general":
        instance = build_lb_general(args.alpha, args.eps, x_max=args.x_max)
        non_degrading = False
    else:
        instance = build_lb_tv(args.alpha, args.eps, x_max=args.x_max)
        non_degrading = True
    data_io.save_instance(instance, args.out)
    alpha_grid_units = float(instance.metadata["alpha_grid"])
    pof = price_of_fairness(instance, alpha_grid_units, method="lp", non_degrading=non_degrading)
    report = {
        "family": args.family,
        "alpha": args.alpha,
        "epsilon": args.eps,
        "alpha_grid_units": alpha_grid_units,
        "opt_value": pof.opt_value,
        "fair_value": pof.fair_value,
        "pof": pof.pof,
        "feasible": pof.feasible,
        "non_degrading": non_degrading,
        "instance_path": args.out,
    }
    if args.family == "tv":
        report["tv_distance"] = tv_distance(instance.dist_a, instance.dist_b)
    text = json.dumps(report, indent=2)
    if args.report is not None:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_preset(args) -> int:
    seeds = _parse_int_list(args.seeds, "seeds") if args.seeds else None
    written = presets.run_preset(
        args.name,
        args.out_dir,
        n_agents=args.n,
        horizon=args.steps,
        seeds=seeds,
    )
    for path in written:
        print(path)
    return 0


def _add_econ_flags(p: argparse.ArgumentParser, u_plus: float, u_minus: float, c_plus: float, c_minus: float) -> None:
    p.add_argument("--u-plus", type=float, default=u_plus)
    p.add_argument("--u-minus", type=float, default=u_minus)
    p.add_argument("--c-plus", type=float, default=c_plus)
    p.add_argument("--c-minus", type=float, default=c_minus)
    p.add_argument("--w-a", type=float, default=0.7)
    p.add_argument("--x-max", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsel",
        description="Fairness-constrained selection: single-step solvers, sweeps, and multi-step simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="print the assumption report for an instance as JSON")
    p.add_argument("--instance", required=True)
    p.add_argument("--beta", type=float, default=None, help="advantage hint for the stability check")
    p.add_argument("--stability-n", type=float, default=1.0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="write an instance JSON file")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("gaussian", help="discretized-normal score distributions, linear success curve")
    g.add_argument("--mean-a", type=float, default=80.0)
    g.add_argument("--mean-b", type=float, default=60.0)
    g.add_argument("--variance", type=float, default=None)
    g.add_argument("--stddev", type=float, default=None)
    _add_econ_flags(g, 2.0, -2.0, 2.0, -1.0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("geometric", help="gaussian scores with geometrically vanishing failure probability")
    g.add_argument("--p-fail", type=float, default=0.01)
    g.add_argument("--mean-a", type=float, default=80.0)
    g.add_argument("--mean-b", type=float, default=60.0)
    g.add_argument("--variance", type=float, default=None)
    _add_econ_flags(g, 1.0, -1.0, 2.0, -1.0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("from-csv", help="score distributions from a group,score,pmf CSV")
    g.add_argument("--csv", required=True)
    _add_econ_flags(g, 2.0, -2.0, 2.0, -1.0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("single", help="fair-vs-optimal sweep, writes pof.csv")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=None, help="single fairness level, fraction of the range")
    p.add_argument("--alpha-grid", default=None, help="lo:hi:step sweep over fractions of the range")
    p.add_argument("--method", choices=("lp", "threshold"), default="lp")
    p.add_argument("--omega-grid", type=int, default=101)
    p.add_argument("--non-degrading", action="store_true", help="drop unprofitable-and-degrading scores first")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("pos", help="LP-vs-threshold sweep, writes pos.csv")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--alpha-grid", default=None)
    p.add_argument("--omega-grid", default="1,10", help="comma list of randomization grid sizes")
    p.set_defaults(func=cmd_pos)

    p = sub.add_parser("multi", help="multi-step simulation, writes traj.csv")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=POLICY_KINDS, required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--seeds", default="1,2,3,4,5")
    p.add_argument("--opportunities", type=int, default=1)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--alpha-absolute", action="store_true", help="treat alpha as grid units, not a fraction")
    p.add_argument("--omega-grid", type=int, default=101)
    p.set_defaults(func=cmd_multi)

    p = sub.add_parser("lb", help="build a worst-case instance and measure its fairness cost")
    p.add_argument("--family", choices=("general", "tv"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--x-max", type=int, default=100)
    p.add_argument("--out", required=True, help="where the instance JSON goes")
    p.add_argument("--report", default=None, help="optional path for the measurement JSON")
    p.set_defaults(func=cmd_lb)

    p = sub.add_parser("preset", help="run a canned experiment")
    p.add_argument("name", choices=presets.preset_names())
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=None, help="population override for multi-step presets")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seeds", default=None)
    p.set_defaults(func=cmd_preset)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        # json.JSONDecodeError is a ValueError, so malformed input files land here too
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
