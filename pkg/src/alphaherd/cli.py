"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import logging
import sys
from pathlib import Path

from . import io
from .baselines import BASELINES
from .discrepancy import alpha_mmd_sq
from .errors import ValidationError
from .herding import ALGORITHMS, resolve_alpha
from .kernel import KernelKind, KernelSpec, build_context, median_bandwidth
from .oracle import bound_constants, bound_satisfied, exhaustive_min
from .synth import get_distribution, run_comparison, sample
from .timing import time_selection
from .viz import render_svg

log = logging.getLogger("alphaherd")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


class FlagError(ValidationError):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


def _flag(flag, fn, *args, **kwargs):
    """Run ``fn`` and re-raise validation errors tagged with ``flag``."""
    try:
        return fn(*args, **kwargs)
    except FlagError:
        raise
    except ValidationError as exc:
        raise FlagError(flag, str(exc)) from exc


def _list(values, cast):
    out = []
    for v in values:
        out.extend(cast(t) for t in str(v).split(",") if t.strip())
    return out


def _alpha_arg(text: str):
    if text in ("auto", "ratio"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected auto, ratio or a number, got {text!r}")


def _bandwidth_arg(text: str):
    if text == "median":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected median or a number, got {text!r}")


def _kernel_from_args(args, dataset):
    kind = KernelKind(args.kernel)
    if kind is KernelKind.POLYNOMIAL:
        log.warning("polynomial kernel is not characteristic; MMD is only a pseudo-metric")
        spec = _flag("--degree", KernelSpec, kind, degree=args.degree, offset=args.offset)
        return spec, {"kind": kind.value, "degree": spec.degree, "offset": spec.offset}
    if args.bandwidth == "median":
        sigma = _flag("--bandwidth", median_bandwidth, dataset, seed=args.seed)
        rule = "median"
    else:
        sigma, rule = args.bandwidth, "explicit"
    spec = _flag("--bandwidth", KernelSpec, kind, sigma=sigma)
    return spec, {"kind": kind.value, "sigma": spec.sigma, "sigma_rule": rule}


def cmd_select(args) -> int:
    dataset = io.load_dataset(args.input, args.format)
    if args.m < 1:
        raise FlagError("--m", f"budget must be >= 1, got {args.m}")
    if args.algorithm != "gkh" and args.m > dataset.n:
        raise FlagError("--m", f"budget exceeds ground set: m={args.m} > n={dataset.n}")
    alpha = _flag("--alpha", resolve_alpha, args.alpha, args.m, dataset.n)
    spec, kernel_meta = _kernel_from_args(args, dataset)
    ctx = build_context(dataset, spec, cache_gram=args.gram_cache)

    if args.algorithm in ALGORITHMS:
        result = ALGORITHMS[args.algorithm](ctx, args.m, alpha)
        value = result.final_alpha_mmd_sq
    else:
        result = _flag("--algorithm", BASELINES[args.algorithm], dataset, args.m, seed=args.seed)
        value = alpha_mmd_sq(ctx, result.indices, alpha)

    bound = None
    if args.check_bound:
        bound = bound_constants(ctx, alpha, args.m)
        bound["satisfied"] = bound_satisfied(value, bound)
        if not bound["satisfied"]:
            log.warning("bound not satisfied: %.6g > %.6g", value, bound["rhs"])
    record = io.SelectionRecord(
        dataset=io.fingerprint(dataset),
        kernel=kernel_meta,
        alpha=alpha.to_dict(),
        algorithm=args.algorithm,
        indices=result.indices,
        final_alpha_mmd_sq=value,
        seed=args.seed,
        bound=bound,
        wall_time_ms=int(round(result.wall_time * 1000)),
    )
    io.atomic_write(args.output, record.dumps())
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = _flag("--dist", get_distribution, args.dist, dim=args.dim)
    if args.n < 1:
        raise FlagError("--n", "must be >= 1")
    data = sample(spec, args.n, args.seed)
    io.save_dataset(data, args.output, args.format)
    return EXIT_OK


def cmd_bench(args) -> int:
    dists = _list(args.dist, str)
    for d in dists:
        _flag("--dist", get_distribution, d)
    ns = _list(args.n, int)
    fracs = _list(args.frac, float)
    rule = args.alpha_rule
    if rule not in ("ratio", "auto"):
        try:
            rule = float(rule)
        except ValueError:
            raise FlagError("--alpha-rule", f"expected ratio, auto or a number, got {rule!r}")
    report = _flag(
        "--frac", run_comparison, dists, ns, fracs, runs=args.runs, alpha_rule=rule, seed=args.seed
    )
    io.write_json(args.output, report.to_dict())
    if args.csv:
        rows = list(report.rows())
        buf = _io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        io.atomic_write(args.csv, buf.getvalue())
    for c in report.cells:
        print(f"{c.distribution:>15} n={c.n:<6} m={c.m:<5} D={c.d_mean:+.4f} +/- {c.d_std:.4f}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    dataset = io.load_dataset(args.input, args.format)
    alpha = _flag("--alpha", resolve_alpha, args.alpha, args.m, dataset.n)
    spec, _ = _kernel_from_args(args, dataset)
    ctx = build_context(dataset, spec, cache_gram=True)
    report = _flag("--m", exhaustive_min, ctx, args.m, alpha, replacement=args.replacement)
    io.write_json(args.output, report.to_dict())
    return EXIT_OK


def cmd_viz(args) -> int:
    dataset = io.load_dataset(args.input, args.format)
    record = io.SelectionRecord.loads(Path(args.selection).read_text(encoding="utf-8"))
    if not record.indices:
        raise FlagError("--selection", "selection is empty")
    svg = _flag("--input", render_svg, dataset, record.indices, args.width, args.height)
    io.atomic_write(args.output, svg)
    return EXIT_OK


def cmd_time(args) -> int:
    ns = _list(args.n, int)
    _flag("--dist", get_distribution, args.dist, dim=args.dim)
    table = time_selection(ns, args.m, dist=args.dist, seed=args.seed, repeats=args.repeats, dim=args.dim)
    print(f"{'n':>8} {'m':>6} {'select_ms':>10} {'context_ms':>11}")
    for c in table["cells"]:
        print(f"{c['n']:>8} {c['m']:>6} {c['select_median'] * 1e3:>10.2f} {c['context_median'] * 1e3:>11.2f}")
    for r in table["ratios"]:
        print(f"time({r['n_next']}) / time({r['n']}) = {r['ratio']:.3f}")
    if args.output:
        io.write_json(args.output, table)
    return EXIT_OK


def _add_kernel_flags(p):
    p.add_argument("--kernel", choices=[k.value for k in KernelKind], default="gaussian")
    p.add_argument("--bandwidth", type=_bandwidth_arg, default="median")
    p.add_argument("--degree", type=int, default=2, help="polynomial degree")
    p.add_argument("--offset", type=float, default=1.0, help="polynomial offset")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alphaherd", description="Representative and diverse sample selection by alpha-MMD herding."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="select m samples and write a selection record")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "rdsb"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", type=_alpha_arg, default="auto")
    _add_kernel_flags(p)
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS) + sorted(BASELINES), default="gkhr")
    p.add_argument("--gram-cache", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--check-bound", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("synth", help="sample a synthetic dataset")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2, help="feature dimension (blobs only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "rdsb"])
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="compare GKHR and GKH on synthetic data")
    p.add_argument("--dist", nargs="+", default=["gmm1", "gmm2", "circle-annulus", "uniform-square"])
    p.add_argument("--n", nargs="+", default=["1000", "3000"])
    p.add_argument("--frac", nargs="+", default=["0.01", "0.05", "0.1", "0.2"])
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--alpha-rule", default="ratio")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--csv", help="also write one row per run as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exhaustive minimum on a small dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "rdsb"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", type=_alpha_arg, default="auto")
    _add_kernel_flags(p)
    p.add_argument("--replacement", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("viz", help="render a selection over 2-D data as SVG")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "rdsb"])
    p.add_argument("--selection", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--width", type=int, default=600)
    p.add_argument("--height", type=int, default=600)
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("time", help="time the greedy loop across dataset sizes")
    p.add_argument("--n", nargs="+", required=True)
    p.add_argument("--m", type=int, default=400)
    p.add_argument("--dist", default="gmm2")
    p.add_argument("--dim", type=int, default=2, help="feature dimension (blobs only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--output")
    p.set_defaults(func=cmd_time)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
