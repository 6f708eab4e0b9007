"""Command-line front end: one subcommand per experiment plus a perfect
hash builder.

Exit codes: 0 when the run passes (or carries no acceptance threshold),
2 when an acceptance threshold fails, 1 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, config_for, run_experiment
from .mphf import build_from_key_file, save
from .prng import Prng


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2 for FAIL
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tablemix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--n", type=int, help="key / job count")
        p.add_argument("--d", type=int, help="number of hash functions")
        p.add_argument("--c", type=int, help="number of g components")
        p.add_argument("--kappa", type=int, help="independence of f/g components")
        p.add_argument("--epsilon", type=float, help="table slack factor")
        p.add_argument("--delta", type=float, help="g-range exponent: ell = ceil(n**delta)")
        p.add_argument("--ell", type=int, help="g-range, overriding delta")
        p.add_argument("--s", type=int, help="stash capacity")
        p.add_argument("--tau", type=int, help="acknowledgement threshold override")
        p.add_argument("--alpha", type=float, help="failure-exponent target")
        p.add_argument("--ratio", type=float, help="edge/vertex ratio (core-threshold)")
        p.add_argument("--m-mult", dest="m_mult", type=float, help="m = m_mult * n (components)")
        p.add_argument("--t-size", dest="t_size", type=int, help="|T| for deficiency trials")
        p.add_argument("--w", type=int, help="value width in bits (uniform-probe)")
        p.add_argument("--max-rounds", dest="max_rounds", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str, help="CSV output path")
        p.add_argument("--oracle-random", dest="oracle_random", action="store_true",
                       default=None, help="replace the family with direct random draws")
        p.add_argument("--threads", type=int, help="concurrent trial workers")

    mp = sub.add_parser("mphf-build", help="build a perfect hash function from a key file")
    mp.add_argument("keys", help="newline-delimited decimal 64-bit keys")
    mp.add_argument("--out", required=True, help="output path for the serialized structure")
    mp.add_argument("--epsilon", type=float, default=1.0)
    mp.add_argument("--delta", type=float, default=0.5)
    mp.add_argument("--c", type=int, default=3)
    mp.add_argument("--seed", type=int, default=1)
    return parser


def _experiment_overrides(args: argparse.Namespace) -> dict:
    keys = (
        "n", "d", "c", "kappa", "epsilon", "delta", "ell", "s", "tau", "alpha",
        "ratio", "m_mult", "t_size", "w", "max_rounds", "trials", "seed", "out",
        "oracle_random", "threads",
    )
    return {k: v for k in keys if (v := getattr(args, k, None)) is not None}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1

    try:
        if args.command == "mphf-build":
            ph, attempts, count = build_from_key_file(
                Prng(args.seed), args.keys, args.epsilon, args.delta, args.c
            )
            save(ph, args.out)
            print(f"built perfect hash for {count} keys into [{ph.range_size()}] "
                  f"after {attempts} attempt(s); wrote {args.out}")
            return 0
        overrides = _experiment_overrides(args)
        overrides.setdefault("out", f"tablemix-{args.command}.csv")
        cfg = config_for(args.command, **overrides)
        result = run_experiment(cfg)
    except (ValueError, UsageError) as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 1

    for line in result.summary_lines:
        print(line)
    if result.csv_path:
        print(f"wrote {result.csv_path}")
    return 0 if result.passed in (True, None) else 2


if __name__ == "__main__":
    sys.exit(main())
