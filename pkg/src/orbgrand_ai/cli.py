"""Command line interface: ``orbgrand-ai {simulate,rate-search,entropy,gen-code}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness
from .codes import DEFAULT_CRC12, LinearCode, code_from_config


def _base_config(args) -> harness.ExperimentConfig:
    data = {}
    if args.config:
        data = harness.load_config(args.config).to_dict()
    overrides = {
        "rho": args.rho,
        "ebno_db": args.ebno,
        "b": args.b,
        "tau": args.tau,
        "max_trials": args.max_trials,
        "min_errors": args.min_errors,
        "base_seed": args.seed,
        "batch_size": args.batch_size,
        "workers": args.workers,
        "output": args.out,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "format", None):
        data["format"] = args.format
    if getattr(args, "k", None):
        data["k_grid"] = args.k
    return harness.ExperimentConfig.from_dict(data)


def cmd_simulate(args) -> int:
    config = _base_config(args)
    points = harness.run_bler(config)
    text = harness.emit_results(points, config.format, config.output)
    if config.output is None:
        sys.stdout.write(text)
    return 0


def cmd_rate_search(args) -> int:
    config = _base_config(args)
    results = harness.rate_search(config, args.target_bler, args.ebno_target)
    rows = [
        {
            "rho": r.rho,
            "b": r.b,
            "target_bler": r.target_bler,
            "ebno_db": r.target_ebno_db,
            "best_k": r.best_k,
            "best_rate": r.best_rate,
            "points": [p.__dict__ for p in r.points],
        }
        for r in results
    ]
    text = json.dumps(rows, indent=2) + "\n"
    if config.output:
        harness._write(config.output, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_entropy(args) -> int:
    rows = harness.entropy_table(args.rho, args.n or (), args.b or (), args.sigma2)
    text = harness.emit_entropy(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_gen_code(args) -> int:
    cfg = {"kind": args.kind, "n": args.n, "k": args.k}
    if args.kind == "rlc":
        cfg["seed"] = args.seed
    else:
        cfg["polynomial"] = args.polynomial or hex(DEFAULT_CRC12)
    code: LinearCode = code_from_config(cfg)
    text = json.dumps(code.to_config(), sort_keys=True) + "\n"
    if args.out:
        harness._write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _sim_options(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--rho", type=float, nargs="+")
    p.add_argument("--b", type=int, nargs="+", help="block sizes")
    p.add_argument("--tau", type=int, help="abandonment threshold")
    p.add_argument("--max-trials", type=int)
    p.add_argument("--min-errors", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--batch-size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbgrand-ai", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="BLER sweep over (rho, Eb/N0, b)")
    _sim_options(p)
    p.add_argument("--ebno", type=float, nargs="+", help="Eb/N0 values in dB")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rate-search", help="highest rate meeting a BLER target")
    _sim_options(p)
    p.add_argument("--target-bler", type=float, default=1e-3)
    p.add_argument("--ebno", dest="ebno_target", type=float, default=3.7)
    p.add_argument("--k", type=int, nargs="+", help="dimensions to scan")
    p.set_defaults(func=cmd_rate_search, ebno=None)

    p = sub.add_parser("entropy", help="Gauss-Markov entropy rates as CSV")
    p.add_argument("--rho", type=float, nargs="+", required=True)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--b", type=int, nargs="+")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("gen-code", help="print a code descriptor")
    p.add_argument("--kind", choices=("rlc", "crc"), default="rlc")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=int, default=116)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--polynomial", help="CRC generator incl. leading term, e.g. 0x180f")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_code)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"orbgrand-ai: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
