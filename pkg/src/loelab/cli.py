"""Command line entry point ``loe-lab``.

Exit codes: 0 success, 2 failed check, 1 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import LoeError, SizeGuardError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser():
    p = _Parser(prog="loe-lab", description="Late-time local operator entanglement toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--seed", type=int)
    r.add_argument("--override-size-guard", action="store_true")
    r.add_argument("--dry-run", action="store_true", help="print the plan and exit")

    w = sub.add_parser("weights", help="print the 13 Haar weights as JSON")
    w.add_argument("--dA", type=int, required=True)
    w.add_argument("--dB", type=int, required=True)

    c = sub.add_parser("check", help="run a self-check suite")
    c.add_argument("--suite", required=True, choices=["identities", "nonresonance", "oracle"])
    c.add_argument("--seed", type=int, default=0)
    return p


def _run(args) -> int:
    from .harness import ConfigError, ExperimentConfig, plan, run, size_guard

    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 1
    if args.dry_run:
        try:
            size_guard(cfg, args.override_size_guard)
        except SizeGuardError as exc:
            print(exc, file=sys.stderr)
            return 1
        print("\n".join(plan(cfg)))
        return 0
    try:
        paths = run(cfg, args.out, args.threads, args.seed, args.override_size_guard)
    except SizeGuardError as exc:
        print(exc, file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


def _weights(args) -> int:
    from .haar import derive_weights

    if args.dA < 1 or args.dB < 1 or args.dA * args.dB < 4:
        print("need d_A, d_B >= 1 and d_A * d_B >= 4", file=sys.stderr)
        return 1
    print(derive_weights(args.dA, args.dB).to_json())
    return 0


def _check(args) -> int:
    from .checks import SUITES

    fn = SUITES[args.suite]
    results = fn(seed=args.seed) if args.suite != "nonresonance" else fn()
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
        failed += not ok
    print(json.dumps({"suite": args.suite, "checks": len(results), "failed": failed}))
    return 2 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _run, "weights": _weights, "check": _check}
    try:
        return handlers[args.cmd](args)
    except LoeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
