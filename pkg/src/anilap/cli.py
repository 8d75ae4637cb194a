"""Command line entry point.

    anilap run <config.yaml>      execute one experiment, write reports
    anilap validate <config.yaml> parse and validate only
    anilap list-experiments       show the registry

Exit status: 0 = pass, 1 = flag, 2 = fail, 3 = error (bad config,
unwritable output, or a module failure).  One experiment per process;
--jobs only sets worker counts inside an experiment and never changes
results.
"""

import argparse
import sys

from .config import load_config
from .errors import AnilapError, ConfigError
from .reports import format_float
from .runner import EXPERIMENTS, run_experiment

__all__ = ["main"]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="anilap",
        description="config-driven experiments for anisotropic nonlocal "
                    "operators")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one experiment config")
    run.add_argument("config", help="path to a YAML experiment config")
    run.add_argument("--seed", type=int, default=None, metavar="U64",
                     help="override the config seed")
    run.add_argument("--jobs", type=int, default=1, metavar="N",
                     help="worker count inside the experiment "
                          "(results are identical for any value)")
    run.add_argument("--out", default=None, metavar="DIR",
                     help="override the config output directory")

    val = sub.add_parser("validate", help="parse and validate a config")
    val.add_argument("config", help="path to a YAML experiment config")

    sub.add_parser("list-experiments", help="list registered experiments")
    return parser


def _fail(message):
    print("error: %s" % message, file=sys.stderr)
    return 3


def _check_experiment_known(cfg):
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError("experiment: unknown experiment %r "
                          "(try list-experiments)" % cfg.experiment)


def main(argv=None):
    args = _build_parser().parse_args(argv)

    if args.command == "list-experiments":
        width = max(len(n) for n in EXPERIMENTS)
        for name in sorted(EXPERIMENTS):
            print("%-*s  %s" % (width, name, EXPERIMENTS[name].summary))
        return 0

    try:
        cfg = load_config(args.config)
        _check_experiment_known(cfg)
    except ConfigError as exc:
        return _fail(str(exc))

    if args.command == "validate":
        print("ok: %s" % cfg.experiment)
        return 0

    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        return _fail("--seed must fit in an unsigned 64-bit integer")
    if args.jobs < 1:
        return _fail("--jobs must be at least 1")
    cfg = cfg.with_overrides(seed=args.seed, output=args.out)

    try:
        report, status = run_experiment(cfg, jobs=args.jobs,
                                        out_dir=cfg.output)
    except ConfigError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail("cannot write output: %s" % exc)
    except AnilapError as exc:
        return _fail("%s: %s" % (type(exc).__name__, exc))

    print("%s: %s (%s)" % (report.verdict, cfg.experiment,
                           report.reason or "ok"))
    for name, m in report.measurements.items():
        line = "  %s = %s" % (name, format_float(m.value))
        if m.uncertainty:
            line += " +- %s" % format_float(m.uncertainty)
        if m.target is not None:
            line += " (target %s)" % format_float(m.target)
        print(line)
    print("  report: %s/report.json" % cfg.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
