"""Command-line entry point: run sweeps, validate configs, run oracles.

Exit codes: 0 success, 2 config error, 3 oracle failure.
"""

import argparse
import os
import sys
from dataclasses import replace

from . import oracles
from .config import ConfigError, parse_config, resolved_table
from .harness import run_sweep


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="crmimo",
        description="Underlay cognitive-radio massive-MIMO admission control simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured sweep and write CSVs")
    run_p.add_argument("--config", required=True, help="config file path")
    run_p.add_argument("--out", default=".", help="output directory for CSVs")
    run_p.add_argument("--seed", type=int, default=None, help="override runtime.seed")
    run_p.add_argument("--threads", type=int, default=None, help="worker processes")

    val_p = sub.add_parser("validate", help="check a config and echo resolved values")
    val_p.add_argument("--config", required=True)

    orc_p = sub.add_parser("oracle", help="run the independent verification suite")
    orc_p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "oracle":
        reports = oracles.run_all(seed=args.seed)
        for rep in reports:
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {rep.name}: {rep.detail}")
        return 0 if all(r.passed for r in reports) else 3

    try:
        config, threads = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        for key, value in resolved_table(config, threads):
            print(f"{key} = {value}")
        return 0

    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.threads is not None:
        threads = args.threads
    os.makedirs(args.out, exist_ok=True)

    _, summary = run_sweep(config, threads=threads, out_dir=args.out)
    print(f"wrote {args.out}/records.csv and {args.out}/summary.csv")
    header = f"{'sweep':>12} {'value':>10} {'solver':>12} {'mean':>9} {'stderr':>9}"
    print(header)
    for row in summary:
        print(
            f"{row.sweep_var:>12} {row.sweep_value:>10g} {row.solver:>12} "
            f"{row.mean_admitted:>9.3f} {row.stderr:>9.4f}"
        )
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
