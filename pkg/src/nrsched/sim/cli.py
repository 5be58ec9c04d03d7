"""Command line entry point: ``nrsched run|validate|version``."""

from __future__ import annotations

import argparse
import logging
import sys

from nrsched import __version__
from nrsched.sim.config import ConfigError, load_config, parse_int, parse_list
from nrsched.sim.engine import SolverError, run_experiment
from nrsched.sim.output import emit_results

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

log = logging.getLogger("nrsched")


def _float_list(text: str) -> tuple[float, ...]:
    return parse_list(text, float)


def _int_list(text: str) -> tuple[int, ...]:
    return parse_list(text, parse_int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write result files")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--alpha", type=_float_list, help="comma separated GPF alphas")
    run.add_argument("--seeds", type=_int_list, help="comma separated seeds")
    run.add_argument("--solver", choices=("hnn", "greedy", "exhaustive"))
    run.add_argument("--slots", type=int, help="number of slots per replication")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("-v", "--verbose", action="store_true")

    val = sub.add_parser("validate", help="check a config file and list every problem")
    val.add_argument("--config", required=True)

    sub.add_parser("version", help="print the package version")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return EXIT_OK

    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok")
            return EXIT_OK
        config = config.with_overrides(
            gpf_alpha=args.alpha, seed=args.seeds, solver=args.solver, num_slots=args.slots
        ).validate()
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %d alpha x %d seed cells", len(config.alphas), len(config.seeds))
    try:
        artifact = run_experiment(config, jobs=args.jobs)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        paths = emit_results(artifact, args.out)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
