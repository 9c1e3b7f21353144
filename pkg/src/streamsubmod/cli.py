"""Command-line interface: run, sweep, verify, opt.

Exit codes: 0 success, 1 invariant/acceptance failure, 2 input error.
"""

import argparse
import sys

from . import harness, verify
from .errors import InputError


def _add_config_args(parser):
    parser.add_argument("--config", required=True, help="flat key=value config file")
    parser.add_argument("--out", help="output path (JSON report / CSV table)")
    parser.add_argument("--seed", type=int, help="override the config seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="streamsubmod",
        description="Streaming submodular maximization under a cardinality constraint")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one algorithm on one stream")
    _add_config_args(p_run)

    p_sweep = sub.add_parser("sweep", help="Cartesian parameter sweep, CSV output")
    _add_config_args(p_sweep)

    p_verify = sub.add_parser("verify", help="run a named invariant suite")
    p_verify.add_argument("suite", help="oracles | extensions | rounding | offline | "
                                        "threshold | extension-stream | randomized | "
                                        "all | fault-injection")

    p_opt = sub.add_parser("opt", help="exact brute-force optimum of a dataset")
    p_opt.add_argument("--dataset", required=True)
    p_opt.add_argument("--k", type=int, required=True)
    return parser


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    if args.seed is not None:
        config["seed"] = str(args.seed)
    report = harness.run(config, out_path=args.out)
    print(harness.report_json(report))
    return 1 if report["invariant_violations"] else 0


def _cmd_sweep(args) -> int:
    config = harness.load_config(args.config)
    if args.seed is not None:
        config["seed"] = str(args.seed)
    rows = harness.sweep(config, out_path=args.out)
    print(harness.sweep_csv(rows), end="")
    violations = sum(int(r["invariant_violations"] or 0) for r in rows
                     if r["invariant_violations"] != "")
    return 1 if violations else 0


def _cmd_verify(args) -> int:
    results = verify.run_suite(args.suite)
    failed = 0
    for suite_name, check in results:
        status = "PASS" if check.ok else "FAIL"
        detail = f"  ({check.detail})" if check.detail and not check.ok else ""
        print(f"{status} {suite_name}/{check.name}{detail}")
        failed += not check.ok
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _cmd_opt(args) -> int:
    import json
    print(json.dumps(harness.opt(args.dataset, args.k), indent=2))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep,
                "verify": _cmd_verify, "opt": _cmd_opt}
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
