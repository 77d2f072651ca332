"""Command line interface.

Subcommands mirror the library surface: condition checks, the two
constructions, norms, norm-curve sweeps, support detection, isometry
verification, and weighted-composition recovery, plus ``run`` for full
config documents.  Exit codes: 0 pass, 1 invariant failure, 2 usage or
config error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .constructions import (build_delta2plus_equivalent,
                            build_delta2plus_violator)
from .core import load_orlicz
from .errors import ConfigError, OrliczError
from .experiment import run_experiment
from .function_space import luxemburg_norm
from .harness import operator_from_json, recover_weighted_composition
from .stepfun import StepFunction

USAGE_ERROR = 2


def _print(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _parse_alphas(spec: str) -> list:
    try:
        start, ratio, count = spec.split(":")
        return {"start": float(start), "ratio": float(ratio),
                "count": int(count)}
    except ValueError as exc:
        raise ConfigError(
            f"--alphas wants start:ratio:count, got {spec!r}") from exc


def _cmd_check(args) -> int:
    cfg = {"scenario": "condition-check", "orlicz": args.orlicz}
    result = run_experiment(cfg, out_dir=args.out)
    _print(result.to_json())
    return result.exit_code


def _cmd_construct(args) -> int:
    cfg = {"scenario": "construct", "orlicz": args.orlicz,
           "which": args.which, "eps": args.eps}
    result = run_experiment(cfg, out_dir=args.out)
    if args.out is None:
        phi = load_orlicz(args.orlicz)
        built = (build_delta2plus_equivalent(phi) if args.which == "equivalent"
                 else build_delta2plus_violator(phi, args.eps))
        _print(built.to_json())
    else:
        _print(result.to_json())
    return result.exit_code


def _cmd_norm(args) -> int:
    phi = load_orlicz(args.orlicz)
    f = StepFunction.load(args.step)
    _print({"norm": luxemburg_norm(f, phi)})
    return 0


def _cmd_curve(args) -> int:
    cfg = {"scenario": "curve", "orlicz": args.orlicz, "f": args.f,
           "g": args.g, "alphas": _parse_alphas(args.alphas),
           "fd": args.fd}
    result = run_experiment(cfg, out_dir=args.out)
    if args.out is None:
        sys.stdout.write("alpha,N,Nprime,Nsecond,F_eta,residual_max\n")
        for s in result.summary["samples"]:
            res = s.get("fd", {}).get("max_residual", "")
            sys.stdout.write(f"{s['alpha']!r},{s['N']!r},{s['Nprime']!r},"
                             f"{s['Nsecond']!r},{s['F_eta']!r},{res}\n")
    else:
        _print(result.to_json())
    return result.exit_code


def _cmd_detect(args) -> int:
    cfg = {"scenario": "detect", "orlicz": args.orlicz, "f": args.f,
           "g": args.g, "seed": args.seed}
    result = run_experiment(cfg, out_dir=args.out)
    _print(result.to_json())
    return result.exit_code


def _cmd_isometry(args) -> int:
    cfg = {"scenario": "isometry", "orlicz": args.orlicz,
           "operator": args.operator, "pairs": args.pairs,
           "seed": args.seed}
    result = run_experiment(cfg, out_dir=args.out)
    _print(result.to_json())
    return result.exit_code


def _cmd_recover(args) -> int:
    phi = load_orlicz(args.orlicz)
    with open(args.operator, "r", encoding="utf-8") as fh:
        op = operator_from_json(json.load(fh))
    rng = np.random.default_rng(args.seed)
    result = recover_weighted_composition(op, args.resolution, phi, rng=rng)
    _print(result.to_json())
    return 0


def _cmd_run(args) -> int:
    result = run_experiment(args.config, out_dir=args.out)
    _print(result.to_json())
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orlicz",
        description="Numerical toolkit for Orlicz-space computations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="report directory")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for generated suites")

    p = sub.add_parser("check", help="axioms, growth, curvature, zero-class")
    p.add_argument("orlicz")
    common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("construct",
                       help="build the bounded-curvature equivalent or the "
                            "curvature violator")
    p.add_argument("which", choices=["equivalent", "violator"])
    p.add_argument("orlicz")
    p.add_argument("--eps", type=float, default=0.1)
    common(p)
    p.set_defaults(fn=_cmd_construct)

    p = sub.add_parser("norm", help="Luxemburg norm of a step function")
    p.add_argument("orlicz")
    p.add_argument("step")
    common(p)
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("curve", help="norm-curve sweep (CSV)")
    p.add_argument("orlicz")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--alphas", default="0.25:0.5:13",
                   help="start:ratio:count geometric alphas")
    p.add_argument("--fd", action="store_true",
                   help="attach finite-difference residuals")
    common(p)
    p.set_defaults(fn=_cmd_curve)

    p = sub.add_parser("detect", help="support tests for a pair")
    p.add_argument("orlicz")
    p.add_argument("f")
    p.add_argument("g")
    common(p)
    p.set_defaults(fn=_cmd_detect)

    p = sub.add_parser("isometry", help="isometry + disjointness preservation")
    p.add_argument("orlicz")
    p.add_argument("operator")
    p.add_argument("--pairs", type=int, default=20)
    common(p)
    p.set_defaults(fn=_cmd_isometry)

    p = sub.add_parser("recover", help="recover (a, sigma) from a black box")
    p.add_argument("orlicz")
    p.add_argument("operator")
    p.add_argument("--resolution", type=int, default=64)
    common(p)
    p.set_defaults(fn=_cmd_recover)

    p = sub.add_parser("run", help="run a config document")
    p.add_argument("config")
    common(p)
    p.set_defaults(fn=_cmd_run)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OrliczError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
