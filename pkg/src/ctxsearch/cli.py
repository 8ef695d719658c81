"""Command-line interface: run experiments, sweep configs, verify geometry.

Exit codes: 0 success, 1 bad usage, 2 invariant violations (unless
--allow-violations), 3 aborted runs or verify failures.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from .adversaries import InstanceSpec, instance_to_json_dict
from .harness import (
    VERIFY_SUITES,
    ConfigError,
    parse_config_text,
    run,
    sweep,
    verify,
)


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        config = parse_config_text(fh.read())
    if args.allow_violations:
        config.allow_violations = True
    summary, _ = run(config)
    print(json.dumps(summary.as_dict(), indent=2, sort_keys=True))
    if summary.aborted:
        return 3
    if summary.invariant_violations and not config.allow_violations:
        return 2
    return 0


def _cmd_sweep(args) -> int:
    paths = []
    if os.path.isdir(args.configs):
        paths = sorted(glob.glob(os.path.join(args.configs, "*.cfg")))
    elif os.path.exists(args.configs):
        paths = [args.configs]
    else:
        print(f"no such config file or directory: {args.configs}",
              file=sys.stderr)
        return 1
    configs = []
    for p in paths:
        with open(p) as fh:
            configs.append(parse_config_text(fh.read()))
    table, failed = sweep(configs)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    return 3 if failed else 0


def _cmd_verify(args) -> int:
    report = verify(args.suite, seed=args.seed, n_cases=args.cases,
                    budget=args.budget)
    print(json.dumps(report, indent=2, sort_keys=True, default=str))
    return 3 if report["failures"] else 0


def _cmd_export_instance(args) -> int:
    spec = InstanceSpec(kind=args.kind, d=args.d, T=args.T, seed=args.seed)
    payload = instance_to_json_dict(spec)
    text = json.dumps(payload, indent=None, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxsearch",
        description="contextual-search experiments on convex knowledge sets")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("--config", required=True, help="flat key-value file")
    p_run.add_argument("--allow-violations", action="store_true",
                       help="exit 0 even when invariant audits fail")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run many configs, merge summaries")
    p_sweep.add_argument("--configs", required=True,
                         help="config file or directory of *.cfg files")
    p_sweep.add_argument("--out", help="write the merged CSV here")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run geometry property suites")
    p_verify.add_argument("--suite", required=True, choices=VERIFY_SUITES)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--cases", type=int, default=100)
    p_verify.add_argument("--budget", type=int, default=1500)
    p_verify.set_defaults(func=_cmd_verify)

    p_exp = sub.add_parser("export-instance",
                           help="emit a replayable instance as JSON")
    p_exp.add_argument("--kind", required=True)
    p_exp.add_argument("--d", type=int, required=True)
    p_exp.add_argument("--T", type=int, required=True)
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--out")
    p_exp.set_defaults(func=_cmd_export_instance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
