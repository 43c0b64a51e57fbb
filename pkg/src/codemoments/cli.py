"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid parameters,
3 work budget exceeded.  Every JSON report embeds its run manifest; CSV
output carries the manifest in leading ``#`` comment lines.  Reports are
byte-identical across reruns except for wall-time fields.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetExceededError
from .exponents import exponent_grid, flags_summary, grid_to_csv
from .krawtchouk import abs_norm_k, build_table, signed_moment_k, table_to_csv, table_to_json_dict
from .moments_exact import EnsembleParams, central_moment_exact, moment_record, resolve_method
from .montecarlo import McConfig, estimate
from .report import render_exponent_figure, render_trend_figure, trend_csv, trend_rows, trend_text_table
from .verify import run_verification

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "CODEMOMENTS_OUTDIR"


def _manifest(command: str, parameters: dict, seed: int | None = None, caps: dict | None = None) -> dict:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "codemoments",
        "version": __version__,
        "command": command,
        "parameters": parameters,
    }
    if seed is not None:
        manifest["seed"] = seed
    if caps:
        manifest["caps"] = caps
    return manifest


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(output).write_text(text, encoding="utf-8")


def _emit_json(payload: dict, output: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True), output)


def _csv_with_manifest(manifest: dict, body: str) -> str:
    return f"# manifest: {json.dumps(manifest, sort_keys=True)}\n{body}"


def _rat(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def cmd_kraw(args: argparse.Namespace) -> int:
    table = build_table(args.n, args.i)
    manifest = _manifest("kraw", {"n": args.n, "i": args.i, "k": args.k, "format": args.format})
    if args.format == "csv":
        _emit(_csv_with_manifest(manifest, table_to_csv(table)), args.output)
        return 0
    norms = {}
    for k in range(2, args.k + 1):
        norms[str(k)] = {
            "abs": _rat(abs_norm_k(table, k)),
            "signed": _rat(signed_moment_k(table, k)),
        }
    payload = {"manifest": manifest, "table": table_to_json_dict(table), "norms": norms}
    _emit_json(payload, args.output)
    return 0


_METHOD_NAMES = {"exact-ensemble": "ensemble", "exact-sum": "tuple-sum"}


def cmd_moments(args: argparse.Namespace) -> int:
    params = EnsembleParams(n=args.n, i=args.i, m=args.m)
    caps = {"max_matrix_bits": args.max_matrix_bits, "max_tuple_work": args.max_tuple_work}
    manifest = _manifest(
        "moments",
        {
            "n": args.n,
            "i": args.i,
            "m": args.m,
            "k": args.k,
            "method": args.method,
            "samples": args.samples,
            "workers": args.workers,
            "format": args.format,
        },
        seed=args.seed,
        caps=caps,
    )
    if args.method == "mc":
        cfg = McConfig(params=params, k_max=args.k, samples=args.samples, seed=args.seed, workers=args.workers)
        report = estimate(cfg)
        if args.format == "csv":
            _emit(_csv_with_manifest(manifest, report.to_csv()), args.output)
        else:
            payload = report.to_json_dict()
            payload["manifest"] = manifest
            payload["method"] = "monte-carlo"
            _emit_json(payload, args.output)
        return 0

    method = _METHOD_NAMES.get(args.method, "auto")
    resolved = resolve_method(params, method, args.max_matrix_bits)
    start = time.perf_counter()
    value = central_moment_exact(
        params, args.k, method=resolved, max_matrix_bits=args.max_matrix_bits, budget=args.max_tuple_work
    )
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    record = moment_record(params, args.k, resolved, value, elapsed_ms)
    record["normalized"] = float(value) / float(params.variance) ** (args.k / 2)
    record["manifest"] = manifest
    record["schema_version"] = SCHEMA_VERSION
    if args.format == "csv":
        body = "k,method,num,den,normalized\n" + (
            f"{args.k},{resolved},{value.numerator},{value.denominator},{record['normalized']:.12g}\n"
        )
        _emit(_csv_with_manifest(manifest, body), args.output)
    else:
        _emit_json(record, args.output)
    return 0


def cmd_exponents(args: argparse.Namespace) -> int:
    params = EnsembleParams(n=args.n, i=args.i, m=args.m)
    reports = exponent_grid(params, args.kmax)
    manifest = _manifest("exponents", {"n": args.n, "i": args.i, "m": args.m, "kmax": args.kmax, "format": args.format})
    if args.format == "json":
        payload = {
            "manifest": manifest,
            "rows": [
                {
                    "n": r.n,
                    "i": r.i,
                    "m": r.m,
                    "k": r.k,
                    "psi_n": r.psi_n,
                    "F_n": r.f_n,
                    "theorem_exponent": r.theorem_exponent,
                    "predicted_normalized_log": r.predicted_normalized_log,
                    "k0": r.k0,
                    "flags": flags_summary(r.flags),
                }
                for r in reports
            ],
        }
        _emit_json(payload, args.output)
    else:
        _emit(_csv_with_manifest(manifest, grid_to_csv(reports)), args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verification(level=args.level, seed=args.seed)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        if not r.asserted:
            status = "REPORT"
        elif r.passed:
            status = "PASS"
        else:
            status = "FAIL"
            failed += 1
        first_line = r.detail.splitlines()[0] if r.detail else ""
        print(f"{r.name:<{width}}  {status:>6}  {r.seconds:8.2f}s  {first_line}")
        if not r.asserted and "\n" in r.detail:
            for line in r.detail.splitlines()[1:]:
                print(f"{'':<{width}}          {line}")
    print(f"{'-' * width}")
    print(f"{len(results) - failed}/{len(results)} checks passed ({args.level} level, seed {args.seed})")
    return 1 if failed else 0


def cmd_report(args: argparse.Namespace) -> int:
    gamma = Fraction(args.gamma)
    lam = Fraction(args.lam)
    out_dir = Path(args.out_dir or os.environ.get(OUTPUT_DIR_ENV, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest(
        "report",
        {"gamma": str(gamma), "lambda": str(lam), "n": list(args.n), "k": list(args.k), "figures": not args.no_figures},
    )
    rows = trend_rows(gamma=gamma, lam=lam, ns=tuple(args.n), ks=tuple(args.k))
    csv_path = out_dir / "trend.csv"
    csv_path.write_text(_csv_with_manifest(manifest, trend_csv(rows)), encoding="utf-8")
    written = [csv_path]
    if not args.no_figures:
        written.append(render_trend_figure(rows, out_dir / "trend.png"))
        for n in args.n:
            i = int(gamma * n)
            m = int(lam * n)
            params = EnsembleParams(n=n, i=i, m=m)
            reports = exponent_grid(params, max(args.k))
            written.append(render_exponent_figure(reports, out_dir / f"exponents_n{n}.png"))
    print(trend_text_table(rows))
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codemoments", description=__doc__)
    parser.add_argument("--version", action="version", version=f"codemoments {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_kraw = sub.add_parser("kraw", help="Krawtchouk table and norms")
    p_kraw.add_argument("n", type=int)
    p_kraw.add_argument("i", type=int)
    p_kraw.add_argument("--k", type=int, default=3, help="report norms for 2..k")
    p_kraw.add_argument("--format", choices=("json", "csv"), default="json")
    p_kraw.add_argument("-o", "--output")
    p_kraw.set_defaults(func=cmd_kraw)

    p_mom = sub.add_parser("moments", help="central moments, exact or Monte Carlo")
    p_mom.add_argument("n", type=int)
    p_mom.add_argument("i", type=int)
    p_mom.add_argument("m", type=int)
    p_mom.add_argument("--k", type=int, required=True)
    p_mom.add_argument("--method", choices=("auto", "exact-ensemble", "exact-sum", "mc"), default="auto")
    p_mom.add_argument("--samples", type=int, default=100000)
    p_mom.add_argument("--seed", type=int, default=0)
    p_mom.add_argument("--workers", type=int, default=1)
    p_mom.add_argument("--max-matrix-bits", type=int, default=26)
    p_mom.add_argument("--max-tuple-work", type=int, default=10**8)
    p_mom.add_argument("--format", choices=("json", "csv"), default="json")
    p_mom.add_argument("-o", "--output")
    p_mom.set_defaults(func=cmd_moments)

    p_exp = sub.add_parser("exponents", help="finite-n exponent grid")
    p_exp.add_argument("n", type=int)
    p_exp.add_argument("i", type=int)
    p_exp.add_argument("m", type=int)
    p_exp.add_argument("--kmax", type=int, default=8)
    p_exp.add_argument("--format", choices=("csv", "json"), default="csv")
    p_exp.add_argument("-o", "--output")
    p_exp.set_defaults(func=cmd_exponents)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    p_ver.add_argument("--level", choices=("quick", "full"), default="quick")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    p_rep = sub.add_parser("report", help="trend table, CSV plus figures")
    p_rep.add_argument("--gamma", default="1/4")
    p_rep.add_argument("--lam", default="1/8")
    p_rep.add_argument("--n", type=int, nargs="+", default=[16, 24, 32, 40])
    p_rep.add_argument("--k", type=int, nargs="+", default=[4, 6, 8])
    p_rep.add_argument("--out-dir", default=None, help=f"default: ${OUTPUT_DIR_ENV} or the current directory")
    p_rep.add_argument("--no-figures", action="store_true")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
