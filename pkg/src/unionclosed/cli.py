"""Command-line front end.

Exit codes: 0 success, 1 a computational check failed (or bad input
file), 2 usage error, 3 search found no violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

from . import frankl, gilmer, search, setdist

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOT_FOUND = 0, 1, 2, 3
SIG_DIGITS = 12


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits and spell infinity as "inf"."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj: Any, lines: bool = False) -> str:
    if lines:
        return json.dumps(_clean(obj))
    return json.dumps(_clean(obj), indent=2)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_verify_paper(args) -> int:
    result = gilmer.verify_paper()
    _emit(dumps(result.to_dict()), args.json)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_gap(args, parser) -> int:
    if (args.x is None) == (args.dist is None):
        parser.error("gap: give exactly one of --x or --dist")
    if args.dist is not None:
        if args.epsilon:
            parser.error("gap: --epsilon only applies with --x")
        try:
            p = setdist.load_distribution(args.dist)
        except (OSError, ValueError) as exc:
            print(f"error: cannot load {args.dist}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        _emit(dumps(gilmer.analyze(p).to_dict()), args.json)
        return EXIT_OK
    try:
        param = gilmer.PaperFamilyParam(args.x, args.epsilon)
    except gilmer.ParamOutOfRange as exc:
        parser.error(f"gap: {exc}")
    closed = gilmer.gap_closed_form(param.x)
    report = gilmer.analyze(param.distribution())
    out = {
        "x": param.x,
        "epsilon": param.epsilon,
        "closed_form_gap": closed,
        "pipeline_gap": report.gap,
        "difference": report.gap - closed,
        "hypotheses_strict": report.hypotheses_strict,
        "violates_conjecture": report.violates_conjecture,
    }
    _emit(dumps(out), args.json)
    return EXIT_OK


def cmd_scan(args, parser) -> int:
    try:
        points = gilmer.scan_gap(args.x_from, args.x_to, args.steps)
    except gilmer.ParamOutOfRange as exc:
        parser.error(f"scan: {exc}")
    brackets = gilmer.sign_changes(points)
    starts = {a for a, _ in brackets}
    rows = [
        dumps({"x": pt.x, "gap": pt.gap, "sign_change_after": pt.x in starts}, lines=True)
        for pt in points
    ]
    roots = [pt.x for pt in points if pt.gap == 0]
    rows.append(dumps({"sign_changes": [list(b) for b in brackets], "roots": roots}, lines=True))
    _emit("\n".join(rows), args.json)
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        p = setdist.load_distribution(args.dist)
        other = setdist.load_distribution(args.against) if args.against else None
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = {
        "n": p.n,
        "marginals": setdist.marginals(p).tolist(),
        "entropy": setdist.entropy(p),
        "union_distribution": setdist.union_convolve(p, p).to_dict(),
    }
    if other is not None:
        if other.n != p.n:
            print(f"error: n={p.n} and n={other.n} differ", file=sys.stderr)
            return EXIT_FAIL
        out["against"] = other.to_dict()
        out["kl_divergence"] = setdist.kl_divergence(p, other)
        out["cross_entropy"] = setdist.cross_entropy(p, other)
    _emit(dumps(out), args.json)
    return EXIT_OK


def cmd_search(args, parser) -> int:
    try:
        cfg = search.SearchConfig(
            n=args.n,
            seed=args.seed,
            restarts=args.restarts,
            max_iters=args.max_iters,
            marginal_cap=args.cap,
        )
    except search.ConfigError as exc:
        parser.error(f"search: {exc}")
    if args.workers < 1:
        parser.error("search: --workers must be positive")
    result = search.multistart_search(cfg, workers=args.workers)
    out = result.to_dict()
    out["config"] = search.config_dict(cfg)
    _emit(dumps(out), args.json)
    if args.out_dist:
        setdist.dump_distribution(result.best.distribution, args.out_dist)
    return EXIT_OK if result.best.violates_conjecture else EXIT_NOT_FOUND


def cmd_frankl(args, parser) -> int:
    if args.family:
        try:
            f = frankl.load_family(args.family)
        except (OSError, ValueError) as exc:
            print(f"error: cannot load {args.family}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        closure = frankl.union_closure(f)
        element, ratio = frankl.max_frequency(closure)
        out = {
            "family": f.to_dict(),
            "union_closed": frankl.is_union_closed(f),
            "closure": closure.to_dict(),
            "max_frequency_element": element,
            "max_frequency_ratio": ratio,
        }
        _emit(dumps(out), args.json)
        return EXIT_FAIL if ratio < frankl.FRANKL_RATIO and closure.members != (0,) else EXIT_OK
    if args.n is None:
        parser.error("frankl: --n is required unless --family is given")
    cap = frankl.MAX_EXHAUSTIVE_N if args.mode == "exhaustive" else frankl.MAX_N
    if not 1 <= args.n <= cap:
        parser.error(f"frankl: --n must lie in [1, {cap}] for mode {args.mode}")
    if args.samples < 1:
        parser.error("frankl: --samples must be positive")
    if args.mode == "exhaustive":
        report = frankl.check_conjecture_exhaustive(args.n, args.samples, args.seed)
    else:
        report = frankl.check_sampled(args.n, args.samples, args.seed)
    _emit(dumps(report.to_dict()), args.json)
    return EXIT_OK if report.frankl_holds else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unionclosed",
        description="Gilmer's entropy inequality: counterexample checks, scans and search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", metavar="PATH", help="write output to PATH instead of stdout")
        return p

    add("verify-paper", "re-check the x = 0.3 counterexample and its perturbation")

    p = add("gap", "gap of the two-element family (--x) or of a distribution file (--dist)")
    p.add_argument("--x", type=float)
    p.add_argument("--dist", metavar="PATH")
    p.add_argument("--epsilon", type=float, default=0.0)

    p = add("scan", "closed-form gap on a grid of x values (JSON lines)")
    p.add_argument("--from", dest="x_from", type=float, required=True)
    p.add_argument("--to", dest="x_to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = add("eval", "information measures of a distribution file")
    p.add_argument("--dist", metavar="PATH", required=True)
    p.add_argument("--against", metavar="PATH", help="reference distribution for KL / cross-entropy")

    p = add("search", "multistart search for violating distributions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--cap", type=float, default=0.5 - 1e-6)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dist", metavar="PATH", help="also write the best distribution file")

    p = add("frankl", "check the union-closed conjecture on small ground sets")
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--samples", type=int, default=frankl.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", metavar="PATH", help="check a single family file instead")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-paper":
        return cmd_verify_paper(args)
    if args.command == "gap":
        return cmd_gap(args, parser)
    if args.command == "scan":
        return cmd_scan(args, parser)
    if args.command == "eval":
        return cmd_eval(args)
    if args.command == "search":
        return cmd_search(args, parser)
    return cmd_frankl(args, parser)


if __name__ == "__main__":
    sys.exit(main())
