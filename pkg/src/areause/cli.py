"""Command-line entry point.

Subcommands: synth, ingest, stays, run, compare, dump-categories.
Flags override config-file values; exit code is nonzero on failure with a
stage-tagged message on stderr.
"""

import argparse
import dataclasses
import json
import os
import sys

from . import encoding, geodata, staydetect, synth
from .pipeline import RunConfig, StageError, run, run_compare


def _load_run_config(args):
    config = RunConfig.from_json(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.k is not None:
        overrides["k"] = args.k
    if args.cell_m is not None:
        overrides["cell_m"] = args.cell_m
    if args.min_stays is not None:
        overrides["min_stays"] = args.min_stays
    return dataclasses.replace(config, **overrides) if overrides else config


def _cmd_synth(args):
    if args.scenario == "default":
        config = synth.default_scenario(seed=args.seed if args.seed is not None else 0)
    else:
        config = synth.pandemic_scenario(seed=args.seed if args.seed is not None else 0)
    if args.agents is not None:
        if args.scenario != "default":
            raise ValueError("--agents only applies to the default scenario")
        config = synth.default_scenario(seed=config.seed,
                                        visitors_per_zone=max(args.agents // 4, 0))
    os.makedirs(args.out, exist_ok=True)
    traj = os.path.join(args.out, "trajectories.csv")
    truth = os.path.join(args.out, "ground_truth.csv")
    n_points, n_visits = synth.generate(config, traj, truth)
    print(f"wrote {n_points} points from {n_visits} visits to {traj}")
    print(f"wrote ground truth to {truth}")


def _cmd_ingest(args):
    trajs, rejects = geodata.parse_trajectories(args.input, args.tz_offset)
    n_points = sum(len(t) for t in trajs.values())
    print(f"{len(trajs)} users, {n_points} points, {rejects} rejected rows")
    if args.out:
        geodata.write_trajectories(trajs, args.out)
        print(f"wrote normalized CSV to {args.out}")


def _cmd_stays(args):
    trajs, rejects = geodata.parse_trajectories(args.input, args.tz_offset)
    params = staydetect.StayParams(args.dist_threshold_m, args.time_threshold_min,
                                   args.gap_min)
    stays = staydetect.extract_stays_all(trajs, params)
    geodata.write_stays(stays, args.out)
    n = sum(len(v) for v in stays.values())
    print(f"{n} stays from {len(trajs)} users ({rejects} rejected rows) -> {args.out}")


def _cmd_run(args):
    config = _load_run_config(args)
    run(config, args.out)
    print(f"artifacts written to {args.out}")


def _cmd_compare(args):
    config_a = RunConfig.from_json(args.config_a)
    config_b = RunConfig.from_json(args.config_b)
    if args.k is not None:
        config_a = dataclasses.replace(config_a, k=args.k)
        config_b = dataclasses.replace(config_b, k=args.k)
    if config_a.k != config_b.k:
        raise StageError("compare", f"cluster counts differ: {config_a.k} vs {config_b.k}")
    _, _, alignment, report = run_compare(config_a, config_b, args.out)
    print(f"aligned clusters (b -> a): {alignment.tolist()}")
    print(f"{len(report.common_cells)} common areas, "
          f"{len(report.appeared)} appeared, {len(report.dropped)} dropped")
    print(f"report written to {args.out}")


def _cmd_dump_categories(args):
    encoding.write_category_table(args.out)
    print(f"{encoding.N_CATEGORIES} categories -> {args.out}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="areause",
        description="Area-usage modeling from GPS stay information")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic-city trajectory dataset")
    p.add_argument("--scenario", choices=["default", "pandemic"], default="default")
    p.add_argument("--seed", type=int)
    p.add_argument("--agents", type=int, help="total agents (default scenario only)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="parse and validate a trajectory CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--tz-offset", type=int, default=540, dest="tz_offset")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stays", help="extract stays from a trajectory CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tz-offset", type=int, default=540, dest="tz_offset")
    p.add_argument("--dist-threshold-m", type=float, default=50.0)
    p.add_argument("--time-threshold-min", type=float, default=30.0)
    p.add_argument("--gap-min", type=float, default=360.0)
    p.set_defaults(func=_cmd_stays)

    p = sub.add_parser("run", help="run the full modeling pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--cell-m", type=float, dest="cell_m")
    p.add_argument("--min-stays", type=int, dest="min_stays")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="run two periods and report transitions")
    p.add_argument("--config-a", required=True)
    p.add_argument("--config-b", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("dump-categories", help="dump the stay-category table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dump_categories)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError, geodata.ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
