"""Command-line entry point: ``ldmcast run|schedule|metrics|channels``."""

import argparse
import json
import logging
import sys

import numpy as np

from . import harness
from .channel import ArrayGeometry, dump_channels, generate_channels, load_channels
from .config import SweepSpec, parse_config
from .errors import InternalConsistencyError
from .metrics import MetricKind, discordance_matrix, read_matrix_csv, write_matrix_csv
from .scheduler import solve_schedule

EXIT_OK = 0
EXIT_USAGE = 2     # invalid config or arguments
EXIT_IO = 3        # unreadable input or unwritable output
EXIT_INTERNAL = 4  # a solver invariant broke


def _load_config(path):
    with open(path) as fh:
        cfg, sweep = parse_config(fh.read())
    cfg = harness.master_seed_from_env(cfg)
    if sweep is None:
        sweep = SweepSpec((), ("BEAMWAVE-KING",))
    return cfg, sweep


def cmd_run(args):
    cfg, sweep = _load_config(args.config)
    if args.seeds is not None:
        cfg = cfg.with_(n_seeds=args.seeds)

    def progress(done, total):
        if args.progress:
            print(f"\r{done}/{total}", end="" if done < total else "\n", file=sys.stderr, flush=True)

    table = harness.run_experiment(cfg, sweep, workers=args.workers, timing=not args.no_timing,
                                   progress=progress)
    per_seed, aggregate = harness.emit_csv(table, args.out)
    print(per_seed)
    print(aggregate)


def cmd_schedule(args):
    theta = read_matrix_csv(args.theta)
    dec = solve_schedule(theta, args.k_prime)
    print(json.dumps({"selected": list(dec.selected), "objective": dec.objective}))


def cmd_metrics(args):
    with open(args.channels) as fh:
        channels = load_channels(json.load(fh))
    theta = discordance_matrix(channels, MetricKind(args.kind.upper(), args.omega))
    if args.out:
        write_matrix_csv(args.out, theta)
    else:
        np.savetxt(sys.stdout, theta, delimiter=",", fmt="%.17g")


def cmd_channels(args):
    cfg, _ = _load_config(args.config)
    channels = generate_channels(cfg.master_seed, args.seed, cfg.k, ArrayGeometry(cfg.n_tx, cfg.n_rx),
                                 cfg.paths, cfg.aoa_range, cfg.aod_range)
    text = json.dumps(dump_channels(channels, seed=args.seed), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="ldmcast", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for per-row logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a sweep and write per-seed and aggregate CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seeds", type=int, help="override n_seeds")
    p.add_argument("--no-timing", action="store_true", help="write 0 in runtime_ms for byte-stable output")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("schedule", help="solve the scheduling problem for a discordance matrix CSV")
    p.add_argument("--theta", required=True)
    p.add_argument("--k-prime", type=int, required=True)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("metrics", help="discordance matrix of a channel dump")
    p.add_argument("--channels", required=True)
    p.add_argument("--kind", required=True, choices=["CORR", "PAWN", "ROOK", "KING", "corr", "pawn", "rook", "king"])
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("channels", help="dump one seed's channel realization as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_channels)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # includes ConfigError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
