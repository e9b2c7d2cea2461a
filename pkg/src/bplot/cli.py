"""Command-line entry point: ``bplot <verb> ...``.

Exit codes: 0 success (``analyze``: F = G retained), 2 ``analyze`` rejected
F = G by the Max test, 1 any error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .core import build_two_sample
from .errors import BPlotError
from .inference import DEFAULT_REPLICATES, null_critical_value
from .io import read_column

EXIT_OK, EXIT_ERROR, EXIT_REJECT = 0, 1, 2


def _mc_args(p: argparse.ArgumentParser, mc_default: int = DEFAULT_REPLICATES) -> None:
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--mc", type=int, default=mc_default, help=f"Monte-Carlo replicates (default {mc_default})")
    p.add_argument("--seed", type=int, required=True, help="master seed; all randomness derives from it")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte-Carlo blocks")


def _load(args):
    cx, cy = read_column(args.x), read_column(args.y)
    data = build_two_sample(cx.values, cy.values, tie_policy=args.ties, seed=args.seed,
                            x_label=args.x_label or cx.label, y_label=args.y_label or cy.label)
    print(f"read {len(cx)} values from {cx.path} and {len(cy)} from {cy.path}", file=sys.stderr)
    return cx, cy, data


def _data_args(p):
    p.add_argument("x", help="CSV with the first sample (F), one value per row")
    p.add_argument("y", help="CSV with the second sample (G)")
    p.add_argument("--ties", choices=("error", "jitter"), default="error")
    p.add_argument("--x-label")
    p.add_argument("--y-label")


def cmd_analyze(args) -> int:
    from .plots import emit_bplot
    from .report import analyze, creation_stamp

    cx, cy, data = _load(args)
    report = analyze(data, args.alpha, args.mc, args.seed, x_path=cx.path, y_path=cy.path,
                     workers=args.workers, created=creation_stamp())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write(out / "report.json")
    emit_bplot(report, out / "bplot.svg")
    for t in report.tests:
        print(f"{t.statistic:>4}: value={t.value:.4f} critical={t.critical_value:.4f} "
              f"p={t.p_value:.4g} D(N)={t.grid_dimension} -> {t.decision}")
    if report.regions is not None:
        print("deciles: " + " ".join(report.regions.flags))
    return EXIT_REJECT if report.test("max").decision == "reject" else EXIT_OK


def cmd_regions(args) -> int:
    from .inference import acceptance_regions

    _, _, data = _load(args)
    r = acceptance_regions(data, args.alpha, args.mc, args.seed, args.workers)
    rows = []
    for k in range(10):
        rows.append({
            "decile": k + 1, "interval": list(r.intervals[k]),
            "lower": None if k + 1 in r.empty_deciles else float(r.lower[k]),
            "upper": None if k + 1 in r.empty_deciles else float(r.upper[k]),
            "local_min": None if k + 1 in r.empty_deciles else float(r.local_min[k]),
            "local_max": None if k + 1 in r.empty_deciles else float(r.local_max[k]),
            "flag": r.flags[k],
        })
    print(json.dumps({"alpha": r.alpha, "replicates": r.replicates, "seed": r.seed,
                      "grid_dimension": r.grid_dimension, "deciles": rows}, indent=2))
    return EXIT_OK


def cmd_critical_value(args) -> int:
    cv = null_critical_value(args.m, args.n, args.statistic, args.alpha, args.mc, args.seed, workers=args.workers)
    print(f"{cv:.6f}")
    return EXIT_OK


def cmd_power(args) -> int:
    from .harness import simulate_power, write_power_csv

    rows = []
    for mid in args.model:
        row = simulate_power(mid, args.m, args.n, args.alpha, args.reps, args.seed,
                             null_replicates=args.mc, workers=args.workers)
        rows.append(row)
        print(f"{row.model:>4}: Max {row.power_max:.3f}  AD {row.power_ad:.3f}  (se {row.mc_se:.3f})",
              file=sys.stderr)
    if args.out:
        write_power_csv(rows, args.out)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["model", "m", "n", "alpha", "replicates", "power_max", "power_ad", "se"])
        for r in rows:
            d = r.as_csv_row()
            w.writerow([d[k] for k in ("model", "m", "n", "alpha", "replicates", "power_max", "power_ad", "se")])
    return EXIT_OK


def cmd_ccc_curve(args) -> int:
    from .models import ccc_grid, estimate_ccc_curve
    from .plots import emit_ccc_plot

    curves = [estimate_ccc_curve(mid, ccc_grid(args.points), args.reps, args.size, args.size, args.seed,
                                 workers=args.workers) for mid in args.model]
    emit_ccc_plot(curves, args.out)
    if args.json:
        Path(args.json).write_text(json.dumps(
            [{"model": c.model, "points": c.points.tolist(), "values": c.values.tolist(),
              "replicates": c.replicates, "m": c.m, "n": c.n, "seed": c.seed} for c in curves], indent=1) + "\n")
    return EXIT_OK


def _pair(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M,N but got {text!r}") from None
    return m, n


def cmd_variance_compare(args) -> int:
    from .plots import emit_variance_panels

    emit_variance_panels(args.pair, args.out)
    return EXIT_OK


def cmd_enumerate_oracle(args) -> int:
    from .moments import enumerate_null_moments, exact_var_p, exact_var_u, mean_u_over_eta

    N = args.m + args.n
    ps = [Fraction(i, N) for i in range(1, N + 1)]
    ok = True
    print("p,mean_u/eta,var_u,var_p,closed_form_match")
    for e in enumerate_null_moments(args.m, args.n, ps):
        match = (e.mean_u_over_eta == mean_u_over_eta(args.m, args.n, e.p)
                 and e.mean_p_over_eta == 0
                 and e.var_u == exact_var_u(args.m, args.n, e.p, exact=True)
                 and e.var_p == exact_var_p(args.m, args.n, e.p, exact=True))
        ok &= match
        print(f"{e.p},{e.mean_u_over_eta},{e.var_u},{e.var_p},{match}")
    return EXIT_OK if ok else EXIT_ERROR


def cmd_models(args) -> int:
    from .models import catalog

    rows = catalog()
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bplot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bplot {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="B-plot, acceptance regions and global tests for two CSV samples")
    _data_args(p)
    _mc_args(p)
    p.add_argument("--out", default="bplot-out", help="output directory for report.json and bplot.svg")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("regions", help="local acceptance regions as JSON")
    _data_args(p)
    _mc_args(p)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("critical-value", help="Monte-Carlo critical value under F = G")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--statistic", choices=("max", "ad"), default="max")
    _mc_args(p)
    p.set_defaults(func=cmd_critical_value)

    p = sub.add_parser("power", help="empirical power under alternative models")
    p.add_argument("--model", action="append", required=True, help="model id (repeatable), e.g. A1 or NULL")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--reps", type=int, default=10_000, help="power replicates")
    _mc_args(p)
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("ccc-curve", help="averaged empirical CCC curves as SVG")
    p.add_argument("--model", action="append", required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--size", type=int, default=5000, help="m = n per replicate")
    p.add_argument("--points", type=int, default=999)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="also dump curve values to this path")
    p.set_defaults(func=cmd_ccc_curve)

    p = sub.add_parser("variance-compare", help="exact null variance panels as SVG")
    p.add_argument("--pair", type=_pair, action="append", required=True, help="M,N (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_variance_compare)

    p = sub.add_parser("enumerate-oracle", help="exact moments by full enumeration vs closed forms")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_enumerate_oracle)

    p = sub.add_parser("models", help="print the alternative model catalog")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_models)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BPlotError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"bplot: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
