"""Trend tables and figure rendering for the exponent comparisons.

The trend table tracks, along a fixed (gamma, lambda) ray, the predicted
normalized-moment exponent against the circuit-count lower bound
(1/n) log2( (1/2) p^(k-1) ||K_i||_k^k / Var^(k/2) ), which is always
computable, and against the coloop-free tuple sum where the enumeration
budget allows.  Convergence of the lower-bound column to the predicted
exponent is reported for inspection, not asserted.

Figures are rendered with matplotlib (Agg) to files next to the CSV.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import BudgetExceededError  # noqa: E402
from .exact_arith import log2_rat  # noqa: E402
from .exponents import LOG_PRECISION_BITS, psi_n, theorem_exponent  # noqa: E402
from .krawtchouk import abs_norm_k, build_table  # noqa: E402
from .moments_exact import EnsembleParams, sandwich_sum  # noqa: E402

DEFAULT_NS = (16, 24, 32, 40)
DEFAULT_KS = (4, 6, 8)
DEFAULT_SANDWICH_BUDGET = 10**7


@dataclass(frozen=True)
class TrendRow:
    n: int
    i: int
    m: int
    k: int
    psi_n: float
    theorem_exponent: float
    lower_bound_log: float
    sandwich_log: float | None
    gap: float


def trend_rows(
    gamma: Fraction = Fraction(1, 4),
    lam: Fraction = Fraction(1, 8),
    ns: tuple[int, ...] = DEFAULT_NS,
    ks: tuple[int, ...] = DEFAULT_KS,
    sandwich_budget: int = DEFAULT_SANDWICH_BUDGET,
) -> list[TrendRow]:
    rows: list[TrendRow] = []
    for n in ns:
        i = gamma * n
        m = lam * n
        if i.denominator != 1 or m.denominator != 1:
            raise ValueError(f"gamma*n and lambda*n must be integers, got n={n}")
        params = EnsembleParams(n=n, i=int(i), m=int(m))
        table = build_table(params.n, params.i)
        log_var = log2_rat(params.variance, LOG_PRECISION_BITS).to_float()
        for k in ks:
            psi = psi_n(table, k)
            te = theorem_exponent(params, k, table=table)
            lower = Fraction(1, 2) * params.p ** (k - 1) * abs_norm_k(table, k)
            lower_log = (log2_rat(lower, LOG_PRECISION_BITS).to_float() - 0.5 * k * log_var) / n
            sw_log: float | None = None
            try:
                sw = sandwich_sum(params, k, budget=sandwich_budget)
                if sw > 0:
                    sw_log = (log2_rat(sw, LOG_PRECISION_BITS).to_float() - 0.5 * k * log_var) / n
            except BudgetExceededError:
                pass
            rows.append(
                TrendRow(
                    n=n,
                    i=params.i,
                    m=params.m,
                    k=k,
                    psi_n=psi,
                    theorem_exponent=te,
                    lower_bound_log=lower_log,
                    sandwich_log=sw_log,
                    gap=te - lower_log,
                )
            )
    return rows


def trend_csv(rows: list[TrendRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["n", "i", "m", "k", "psi_n", "theorem_exponent", "lower_bound_log", "sandwich_log", "gap"])
    for r in rows:
        w.writerow(
            [
                r.n,
                r.i,
                r.m,
                r.k,
                f"{r.psi_n:.12g}",
                f"{r.theorem_exponent:.12g}",
                f"{r.lower_bound_log:.12g}",
                "" if r.sandwich_log is None else f"{r.sandwich_log:.12g}",
                f"{r.gap:.12g}",
            ]
        )
    return buf.getvalue()


def trend_text_table(rows: list[TrendRow]) -> str:
    lines = [f"{'n':>4} {'i':>4} {'m':>3} {'k':>3} {'theorem_exp':>12} {'lower_bound':>12} {'gap':>10} {'sandwich':>10}"]
    for r in rows:
        sw = "-" if r.sandwich_log is None else f"{r.sandwich_log:10.6f}"
        lines.append(
            f"{r.n:>4} {r.i:>4} {r.m:>3} {r.k:>3} {r.theorem_exponent:>12.6f} {r.lower_bound_log:>12.6f} {r.gap:>10.6f} {sw:>10}"
        )
    return "\n".join(lines)


def render_trend_figure(rows: list[TrendRow], path: str | Path) -> Path:
    """Exponent vs n, one panel pair of curves per k."""
    path = Path(path)
    ks = sorted({r.k for r in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for k in ks:
        sub = sorted((r for r in rows if r.k == k), key=lambda r: r.n)
        ns = [r.n for r in sub]
        ax.plot(ns, [r.theorem_exponent for r in sub], marker="o", label=f"predicted, k={k}")
        ax.plot(ns, [r.lower_bound_log for r in sub], marker="x", linestyle="--", label=f"circuit lower bound, k={k}")
    ax.set_xlabel("n")
    ax.set_ylabel("(1/n) log2 of normalized moment")
    ax.set_title("Normalized moment exponent vs circuit lower bound")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_exponent_figure(reports, path: str | Path) -> Path:
    """theorem_exponent vs k for one (n, i, m), with k0 marked."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ks = [r.k for r in reports]
    ax.plot(ks, [r.theorem_exponent for r in reports], marker="o", label="moment exponent")
    ax.plot(ks, [r.psi_n for r in reports], marker="s", linestyle="--", label="psi_n")
    ax.axhline(0.0, color="black", linewidth=0.8)
    k0 = reports[0].k0
    if k0 is not None and ks[0] <= k0 <= ks[-1]:
        ax.axvline(k0, color="red", linestyle=":", label=f"k0 = {k0}")
    rep = reports[0]
    ax.set_xlabel("k")
    ax.set_ylabel("exponent")
    ax.set_title(f"n={rep.n}, i={rep.i}, m={rep.m}")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
