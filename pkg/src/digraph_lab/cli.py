"""``digraph-lab`` command line."""
from __future__ import annotations

import argparse
import logging
import sys

from . import experiments
from .errors import LabError
from .testers import load_config


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="digraph-lab", description=__doc__)
    ap.add_argument("--jobs", type=int, default=1, help="worker processes (PROPTEST_JOBS overrides)")
    ap.add_argument("--config", help="flat key=value tester config (defaults to the shipped one)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="exact identity checks for k = 2..kmax")
    p.add_argument("--kmax", type=int, default=12)

    p = sub.add_parser("gen", help="generate a yes-family (A) or far-family (B) sequence")
    p.add_argument("--class", dest="cls", choices=["A", "B"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reduce", help="materialize the reduced graph of a sequence")
    p.add_argument("--pattern", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("separation", help="graph testers on reduced instances")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, action="append", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", help="edge-list pattern file (default: the k-star)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("poisson", help="Poissonized histogram distinguisher")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, action="append", required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "verify":
            ok, table = experiments.cmd_verify(args.kmax)
            print(table, end="")
            return 0 if ok else 1
        if args.command == "gen":
            _, summary = experiments.cmd_gen(args.cls, args.k, args.n, args.seed, args.out)
            print(summary, end="")
            return 0
        if args.command == "reduce":
            print(experiments.cmd_reduce(args.pattern, args.sequence, args.seed, args.out), end="")
            return 0
        cfg = load_config(args.config)
        if args.command == "separation":
            from .digraph import read_edge_list

            pattern = read_edge_list(args.pattern) if args.pattern else None
            rows = experiments.cmd_separation(
                args.k, args.n, args.trials, args.seed, args.out, pattern, cfg, args.jobs,
                pattern_path=args.pattern,
            )
        else:
            rows = experiments.cmd_poisson(args.k, args.n, args.s, args.trials, args.seed, args.out, cfg, args.jobs)
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0
    except (LabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
