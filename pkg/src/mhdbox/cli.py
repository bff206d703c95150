"""Command-line driver.

    mhdbox simulate      --config run.cfg [--out DIR] [--resume CKPT]
    mhdbox linear-modes  [--out DIR] [--seed N]
    mhdbox decay-verify  [--config run.cfg] [--out DIR] [--seed N]
    mhdbox omega-residual [--out DIR] [--seed N]
    mhdbox lemma-suite   [--out DIR] [--seed N]
    mhdbox ledger-check  [--out DIR] [--seed N]

Exit status is zero iff every check covered by the invoked scenario
passed.  CSV files, figures, and a summary land in the output directory.
"""

from __future__ import annotations

import argparse
import sys

from .checkpoint import load_checkpoint
from .config import ConfigError, parse_config
from .scenarios import SCENARIOS, run_scenario, simulate


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mhdbox", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("simulate",) + SCENARIOS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="path to a key=value config file")
        sp.add_argument("--out", help="output directory (default out/<command>)")
        sp.add_argument("--seed", type=int, default=1234,
                        help="master seed for random data")
        if name == "simulate":
            sp.add_argument("--resume", help="checkpoint to resume from")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = args.out or f"out/{args.command}"

    cfg = None
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        except FileNotFoundError:
            print(f"error: config file {args.config!r} not found", file=sys.stderr)
            return 2
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if args.seed != 1234:
            cfg = cfg.with_overrides(seed=args.seed)

    if args.command == "simulate":
        if cfg is None:
            print("error: simulate requires --config", file=sys.stderr)
            return 2
        resume_state = resume_params = None
        if args.resume:
            resume_state, resume_params = load_checkpoint(
                args.resume, expect_grid=cfg.grid())
        report = simulate(cfg, out_dir, resume_state, resume_params)
    else:
        report = run_scenario(args.command, out_dir, seed=args.seed, config=cfg)

    print(report.summary())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
