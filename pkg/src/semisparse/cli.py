"""Command-line front end.

::

    semisparse decompose --input f.png --out-structure u.png --out-texture v.png
    semisparse benchmark --corpus images/ --config bench.ini --out-csv rows.csv

Exit status is 0 on success (also when a run stops at ``--max-iters``
without converging; the metrics JSON says so), 1 on I/O or decoding
failures and 2 on invalid arguments.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .benchmark import _safe, load_settings, report_to_json, rows_to_csv, run_benchmark
from .decomposer import MODELS, ConvergenceTrace, DecomposeConfig, decompose
from .errors import ConfigurationError, ImageFormatError, ParameterError
from .imageio import read_image, write_image, write_raw
from .metrics import str_db, structure_texture_correlations
from .prox import HardShrinkMode

_DEFAULTS = DecomposeConfig()


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semisparse",
        description="Semi-sparse structure/texture decomposition.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split one image into structure and texture",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    d.add_argument("--input", required=True, help="8-bit PNG, PGM or PPM image")
    d.add_argument("--out-structure", help="structure image path")
    d.add_argument("--out-texture", help="texture image path (stored as v/2 + 1/2)")
    d.add_argument("--out-texture-raw", help="lossless float64 dump of the texture")
    d.add_argument("--metrics-json", help="write metrics and settings as JSON")
    d.add_argument("--trace-csv", help="write per-iteration convergence trace")
    d.add_argument("--model", choices=MODELS, default=_DEFAULTS.model)
    d.add_argument("--lambda", dest="lam", type=float, default=_DEFAULTS.lam,
                   help="fidelity weight")
    d.add_argument("--alpha", type=float, default=_DEFAULTS.alpha, help="gradient L1 weight")
    d.add_argument("--beta", type=float, default=_DEFAULTS.beta,
                   help="higher-order L0 weight (0 gives TV-L1)")
    d.add_argument("--gamma", type=float, default=None, help="texture-field weight (gp only)")
    d.add_argument("--p", type=int, choices=(1, 2), default=None,
                   help="texture-field norm (gp only; 1 if omitted)")
    d.add_argument("--order", type=int, choices=(2, 3), default=_DEFAULTS.order)
    d.add_argument("--rho1", type=float, default=_DEFAULTS.rho1)
    d.add_argument("--rho2", type=float, default=_DEFAULTS.rho2)
    d.add_argument("--rho3", type=float, default=_DEFAULTS.rho3)
    d.add_argument("--eps", type=float, default=_DEFAULTS.eps,
                   help="relative-change stopping threshold")
    d.add_argument("--tol-primal", type=float, default=_DEFAULTS.tol_primal,
                   help="relative primal-residual stopping threshold")
    d.add_argument("--max-iters", type=_positive_int, default=_DEFAULTS.max_iters)
    d.add_argument("--hard-shrink", choices=[m.value for m in HardShrinkMode],
                   default=_DEFAULTS.hard_shrink_mode.value)
    d.add_argument("--threads", type=_positive_int, default=1,
                   help="channels processed in parallel")
    d.add_argument("--no-timing", action="store_true",
                   help="report wall_time_s as 0 so reruns are byte-identical")
    d.set_defaults(func=cmd_decompose, subparser=d)

    b = sub.add_parser("benchmark", help="score settings over a corpus at matched STR",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    b.add_argument("--corpus", required=True, help="directory of images")
    b.add_argument("--config", required=True, help="key=value benchmark config")
    b.add_argument("--out-csv", help="per-row report (default: stdout)")
    b.add_argument("--out-json", help="rows plus per-config aggregates")
    b.add_argument("--threads", type=_positive_int, default=1,
                   help="images processed in parallel")
    b.add_argument("--no-timing", action="store_true",
                   help="report wall times as 0 so reruns are byte-identical")
    b.set_defaults(func=cmd_benchmark, subparser=b)
    return parser


def _config_from_args(args) -> DecomposeConfig:
    return DecomposeConfig(model=args.model, lam=args.lam, alpha=args.alpha, beta=args.beta,
                           gamma=args.gamma, p=args.p, order=args.order, rho1=args.rho1,
                           rho2=args.rho2, rho3=args.rho3, eps=args.eps,
                           max_iters=args.max_iters, tol_primal=args.tol_primal,
                           hard_shrink_mode=args.hard_shrink)


def write_trace_csv(path, trace: ConvergenceTrace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trace.COLUMNS)
        for row in trace.rows():
            writer.writerow([row[0]] + [repr(x) for x in row[1:]])


def cmd_decompose(args, parser) -> int:
    try:
        cfg = _config_from_args(args)
    except ParameterError as exc:
        parser.error(str(exc))
    f = read_image(args.input)
    res = decompose(f, cfg, threads=args.threads)
    if args.out_structure:
        write_image(args.out_structure, res.structure)
    if args.out_texture:
        write_image(args.out_texture, res.texture, signed=True)
    if args.out_texture_raw:
        write_raw(args.out_texture_raw, res.texture)
    if args.trace_csv:
        write_trace_csv(args.trace_csv, res.trace)
    if args.metrics_json:
        corr = _safe(structure_texture_correlations, res.structure, res.texture)
        doc = {"str_db": _safe(str_db, res.structure, res.texture),
               "c0": corr and corr[0], "c1": corr and corr[1],
               "iterations": res.iterations, "converged": res.converged,
               "wall_time_s": 0.0 if args.no_timing else res.wall_time,
               "config": cfg.as_dict()}
        Path(args.metrics_json).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    return 0


def cmd_benchmark(args, parser) -> int:
    try:
        settings = load_settings(args.config)
    except ConfigurationError as exc:
        parser.error(f"{args.config}: {exc}")
    rows, aggregates = run_benchmark(args.corpus, settings, threads=args.threads,
                                     timing=not args.no_timing)
    text = rows_to_csv(rows)
    if args.out_csv:
        Path(args.out_csv).write_text(text)
    else:
        sys.stdout.write(text)
    if args.out_json:
        Path(args.out_json).write_text(report_to_json(rows, aggregates, settings))
    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        print(f"semisparse: {failed} of {len(rows)} runs failed (see report)", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, args.subparser)
    except (OSError, ImageFormatError) as exc:
        print(f"semisparse {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
