"""Executable verification suite: every advertised identity and bound.

Each check computes both sides of an identity or inequality from scratch
(exact rational comparisons unless stated otherwise) and returns a
:class:`CheckResult`.  ``level="quick"`` shrinks ranges to finish in well
under a minute; ``level="full"`` runs the complete ranges.  The trend check
is report-only: its table is attached to the result and only computability
is asserted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .exact_arith import binomial
from .exponents import psi_diagnostics, psi_n
from .gf2 import VectorSequence, coloop_positions
from .krawtchouk import (
    abs_norm_k,
    build_table,
    build_table_recurrence,
    signed_moment_k,
    zero_sum_count_bruteforce,
)
from .montecarlo import McConfig, estimate
from .moments_exact import (
    EnsembleParams,
    central_moment_exact,
    dual_character_sum_check,
    enumerate_cover_configs,
    holder_bound,
    product_expectation,
    product_expectation_oracle,
    sample_dual_tuple,
    sandwich_sum,
    structured_tuple_count,
)
from .report import trend_rows, trend_text_table


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    asserted: bool  # False for report-only checks
    detail: str
    seconds: float


def _result(name: str, passed: bool, detail: str, start: float, asserted: bool = True) -> CheckResult:
    return CheckResult(name=name, passed=passed, asserted=asserted, detail=detail, seconds=time.perf_counter() - start)


def check_variance_identity(full: bool, seed: int = 0) -> CheckResult:
    """E (X-EX)^2 equals C(n,i) p(1-p) exactly, across the parameter box."""
    start = time.perf_counter()
    n_max = 10 if full else 7
    bad: list[tuple[int, int, int]] = []
    tried = 0
    for n in range(2, n_max + 1):
        for m in range(1, min(3, n - 1) + 1):
            for i in range(1, n):
                params = EnsembleParams(n=n, i=i, m=m)
                got = central_moment_exact(params, 2, method="tuple-sum")
                tried += 1
                if got != params.variance:
                    bad.append((n, i, m))
    return _result(
        "variance_identity",
        not bad,
        f"{tried} configurations, n <= {n_max}; " + (f"mismatches: {bad}" if bad else "all exact"),
        start,
    )


def check_path_agreement(full: bool, seed: int = 0) -> CheckResult:
    """Ensemble enumeration and the tuple sum give identical rationals."""
    start = time.perf_counter()
    n_max = 5 if full else 4
    k_max = 4 if full else 3
    bad = []
    tried = 0
    for n in range(2, n_max + 1):
        for m in range(1, min(3, n - 1) + 1):
            for i in range(1, n):
                params = EnsembleParams(n=n, i=i, m=m)
                for k in range(1, k_max + 1):
                    a = central_moment_exact(params, k, method="ensemble")
                    b = central_moment_exact(params, k, method="tuple-sum")
                    tried += 1
                    if a != b:
                        bad.append((n, i, m, k))
    return _result(
        "path_agreement",
        not bad,
        f"{tried} cells, n <= {n_max}, k <= {k_max}; " + (f"mismatches: {bad}" if bad else "all identical"),
        start,
    )


def _nonzero_multisets(n: int, k_max: int):
    universe = list(range(1, 1 << n))
    for k in range(1, k_max + 1):
        for combo in combinations_with_replacement(universe, k):
            yield combo


def check_product_expectation_dichotomy(full: bool, seed: int = 0) -> CheckResult:
    """Coloop => zero; coloop-free => within [p^r/2, 2 p^r]; and the closed
    form matches the ensemble average, over all short sequences in F_2^4."""
    start = time.perf_counter()
    n = 4
    k_max = 4 if full else 3
    p5 = Fraction(1, 32)  # m = 5 keeps every k <= 4 inside k <= m-1
    oracle_ms = (1, 2, 3) if full else (2,)
    coloop_cases = 0
    free_cases = 0
    oracle_cases = 0
    bad: list[str] = []
    for combo in _nonzero_multisets(n, k_max):
        seq = VectorSequence(vectors=combo, n=n)
        val = product_expectation(seq, p5)
        if coloop_positions(seq):
            coloop_cases += 1
            if val != 0:
                bad.append(f"coloop {combo} gave {val}")
        else:
            free_cases += 1
            pr = p5 ** seq.rank()
            if not (pr / 2 <= val <= 2 * pr):
                bad.append(f"coloop-free {combo} outside sandwich: {val} vs p^r={pr}")
        for m in oracle_ms:
            params = EnsembleParams(n=n, i=1, m=m)  # oracle uses only n and m
            got = product_expectation(seq, params.p)
            want = product_expectation_oracle(seq, params)
            oracle_cases += 1
            if got != want:
                bad.append(f"oracle mismatch {combo} m={m}: {got} vs {want}")
        if bad:
            break
    detail = (
        f"{coloop_cases} coloop + {free_cases} coloop-free multisets (k <= {k_max}), "
        f"{oracle_cases} ensemble cross-checks at m in {oracle_ms}"
    )
    return _result("product_expectation_dichotomy", not bad, detail + ("; " + "; ".join(bad) if bad else ""), start)


SANDWICH_CONFIGS = ((5, 2, 3, 2), (6, 2, 4, 2), (6, 2, 4, 3))


def check_moment_sandwich(full: bool, seed: int = 0) -> CheckResult:
    """(1/2) sum <= E (X-EX)^k <= 2 sum over coloop-free p^rank, exactly;
    both moment routes are run and must agree on the way."""
    start = time.perf_counter()
    bad = []
    lines = []
    for n, i, m, k in SANDWICH_CONFIGS:
        params = EnsembleParams(n=n, i=i, m=m)
        moment = central_moment_exact(params, k, method="ensemble")
        other = central_moment_exact(params, k, method="tuple-sum")
        if moment != other:
            bad.append(f"path disagreement at {(n, i, m, k)}")
            continue
        ssum = sandwich_sum(params, k)
        lines.append(f"(n={n},i={i},m={m},k={k}): moment={moment}, sum={ssum}")
        if not (ssum / 2 <= moment <= 2 * ssum):
            bad.append(f"sandwich violated at {(n, i, m, k)}: {moment} vs {ssum}")
    return _result("moment_sandwich", not bad, "; ".join(bad) if bad else "; ".join(lines), start)


def check_circuit_lower_bound(full: bool, seed: int = 0) -> CheckResult:
    """E (X-EX)^k >= (1/2) p^(k-1) ||K_i||_k^k for k <= m-1, exactly."""
    start = time.perf_counter()
    bad = []
    lines = []
    for n, i, m, k in SANDWICH_CONFIGS:
        if k > m - 1:
            continue
        params = EnsembleParams(n=n, i=i, m=m)
        moment = central_moment_exact(params, k, method="ensemble")
        table = build_table(n, i)
        bound = Fraction(1, 2) * params.p ** (k - 1) * signed_moment_k(table, k)
        lines.append(f"(n={n},i={i},m={m},k={k}): moment={moment} >= {bound}")
        if moment < bound:
            bad.append(f"lower bound violated at {(n, i, m, k)}: {moment} < {bound}")
    return _result("circuit_lower_bound", not bad, "; ".join(bad) if bad else "; ".join(lines), start)


def check_zero_sum_counting(full: bool, seed: int = 0) -> CheckResult:
    """E K_i^k equals the brute-force zero-XOR-sum tuple count, all small n."""
    start = time.perf_counter()
    n_max = 12 if full else 8
    bad = []
    tried = 0
    for n in range(1, n_max + 1):
        for i in range(0, n + 1):
            table = build_table(n, i)
            for k in (1, 2, 3):
                got = signed_moment_k(table, k)
                if got.denominator != 1:
                    bad.append(f"non-integer signed moment at {(n, i, k)}: {got}")
                    continue
                want = zero_sum_count_bruteforce(n, i, k)
                tried += 1
                if got != want:
                    bad.append(f"mismatch at {(n, i, k)}: {got} vs {want}")
        if bad:
            break
    anchor = signed_moment_k(build_table(4, 2), 3)
    if anchor != 24:
        bad.append(f"anchor value (4,2,3) is {anchor}, expected 24")
    return _result(
        "zero_sum_counting",
        not bad,
        f"{tried} cells, n <= {n_max}, k <= 3; anchor (4,2,3)=24" + ("; " + "; ".join(bad) if bad else ""),
        start,
    )


def check_krawtchouk_identities(full: bool, seed: int = 0) -> CheckResult:
    """K_i(0) = C(n,i), Parseval, even-i symmetry, and the sum formula vs
    the degree recurrence, across all i for every n in range."""
    start = time.perf_counter()
    n_max = 64 if full else 24
    bad = []
    tables = 0
    for n in range(1, n_max + 1):
        for i in range(0, n + 1):
            table = build_table(n, i)
            tables += 1
            if table.values[0] != binomial(n, i):
                bad.append(f"K({n},{i})(0) != C(n,i)")
            if abs_norm_k(table, 2) != binomial(n, i):
                bad.append(f"Parseval fails at ({n},{i})")
            if i % 2 == 0 and any(table.values[j] != table.values[n - j] for j in range(n + 1)):
                bad.append(f"even-i symmetry fails at ({n},{i})")
            if n <= 20 and build_table_recurrence(n, i) != table:
                bad.append(f"recurrence disagrees at ({n},{i})")
        if bad:
            break
    return _result(
        "krawtchouk_identities",
        not bad,
        f"{tables} tables, n <= {n_max}" + ("; " + "; ".join(bad) if bad else ""),
        start,
    )


def check_holder_domination(full: bool, seed: int = 0) -> CheckResult:
    """structured_tuple_count <= holder_bound for every small cover config,
    with equality at the single-duplication config."""
    start = time.perf_counter()
    n_max = 6 if full else 4
    bad = []
    tried = 0
    configs = [cfg for r in range(1, 4) for v in range(1, 3) if v <= r for cfg in enumerate_cover_configs(r, v)]
    for n in range(2, n_max + 1):
        weights = sorted({w for w in (2, n // 2) if 1 <= w <= n})
        for i in weights:
            table = build_table(n, i)
            for cfg in configs:
                count = structured_tuple_count(n, i, cfg)
                bound = holder_bound(cfg, table)
                tried += 1
                if count > bound:
                    bad.append(f"domination fails at n={n}, i={i}, cfg={cfg.sets}: {count} > {bound}")
                if cfg.r == 1 and cfg.v == 1 and count != bound:
                    bad.append(f"r=1,v=1 equality fails at n={n}, i={i}: {count} vs {bound}")
    return _result(
        "holder_domination",
        not bad,
        f"{tried} (n,i,config) cells over {len(configs)} configs, n <= {n_max}" + ("; " + "; ".join(bad) if bad else ""),
        start,
    )


def check_dual_character_sum(full: bool, seed: int = 0) -> CheckResult:
    """Character sums over the constrained tuple space match the dual-space
    prediction on random and constructed-dual samples."""
    start = time.perf_counter()
    samples_per_config = 100 if full else 20
    max_bits = 24 if full else 16
    rng = np.random.default_rng(seed)
    bad = []
    tried = 0
    dual_hits = 0
    for r in range(1, 4):
        for v in range(1, r + 1):
            if v > 2:
                continue
            n = max_bits // (r + v)
            if n < 1:
                continue
            for cfg in enumerate_cover_configs(r, v):
                m = cfg.num_tuples
                for s_idx in range(samples_per_config):
                    if s_idx % 3 == 0:
                        sample = sample_dual_tuple(cfg, n, rng)
                    else:
                        sample = tuple(int(rng.integers(0, 1 << n)) for _ in range(m))
                    verdict = dual_character_sum_check(cfg, n, sample, max_bits=max_bits)
                    tried += 1
                    dual_hits += verdict.in_dual
                    if not verdict.ok:
                        bad.append(f"cfg r={r},v={v},n={n} sample {sample}: sum={verdict.total}, expected={verdict.expected}")
                if bad:
                    break
    return _result(
        "dual_character_sum",
        not bad,
        f"{tried} samples ({dual_hits} in the dual space)" + ("; " + "; ".join(bad) if bad else ""),
        start,
    )


def check_psi_diagnostics(full: bool, seed: int = 0) -> CheckResult:
    """Exact norm lower bound and log-convexity over the whole grid, plus
    psi_n(2) = 0 exactly."""
    start = time.perf_counter()
    n_max = 40 if full else 16
    k_max = 20 if full else 8
    bad = []
    soft_notes = 0
    cells = 0
    for n in range(2, n_max + 1):
        for i in range(0, n // 2 + 1):
            table = build_table(n, i)
            if psi_n(table, 2) != 0.0:
                bad.append(f"psi_n(2) != 0 at ({n},{i})")
            flags = psi_diagnostics(table, range(2, k_max + 1))
            cells += 1
            for flag in flags:
                if flag.hard and not flag.passed:
                    bad.append(f"({n},{i}): {flag.name}: {flag.detail}")
                if not flag.hard and not flag.passed:
                    soft_notes += 1
        if bad:
            break
    return _result(
        "psi_diagnostics",
        not bad,
        f"{cells} (n,i) cells, n <= {n_max}, k <= {k_max}; soft monotonicity notes: {soft_notes}"
        + ("; " + "; ".join(bad) if bad else ""),
        start,
    )


def check_mc_calibration(full: bool, seed: int = 0) -> CheckResult:
    """MC at (4,2,1) lands within 4 standard errors of the exact 3/2 for
    nearly all seeds, and the report is worker-count independent."""
    start = time.perf_counter()
    params = EnsembleParams(n=4, i=2, m=1)
    exact = central_moment_exact(params, 2, method="ensemble")
    n_seeds = 20 if full else 5
    samples = 10**6 if full else 10**5
    need = 19 if full else 4
    hits = 0
    worst = 0.0
    for j in range(n_seeds):
        rep = estimate(McConfig(params=params, k_max=2, samples=samples, seed=seed + j))
        row = rep.rows[1]
        dev = abs(float(row.central_moment) - float(exact))
        worst = max(worst, dev / row.stderr if row.stderr else float("inf"))
        if dev <= 4 * row.stderr:
            hits += 1
    rep1 = estimate(McConfig(params=params, k_max=2, samples=samples, seed=seed, workers=1))
    rep8 = estimate(McConfig(params=params, k_max=2, samples=samples, seed=seed, workers=8))
    workers_match = rep1.histogram == rep8.histogram and rep1.rows == rep8.rows
    passed = hits >= need and workers_match
    detail = (
        f"{hits}/{n_seeds} seeds within 4 SE of {exact} at {samples} samples "
        f"(worst deviation {worst:.2f} SE); workers 1 vs 8 identical: {workers_match}"
    )
    return _result("mc_calibration", passed, detail, start)


def check_trend_report(full: bool, seed: int = 0) -> CheckResult:
    """Report-only: exponent trend table along gamma=1/4, lambda=1/8."""
    start = time.perf_counter()
    ns = (16, 24, 32, 40) if full else (16, 24)
    rows = trend_rows(ns=ns)
    finite = all(np.isfinite(r.theorem_exponent) and np.isfinite(r.lower_bound_log) for r in rows)
    detail = "non-asserted trend table:\n" + trend_text_table(rows)
    return _result("trend_report", finite, detail, start, asserted=False)


ALL_CHECKS = (
    check_variance_identity,
    check_path_agreement,
    check_product_expectation_dichotomy,
    check_moment_sandwich,
    check_circuit_lower_bound,
    check_zero_sum_counting,
    check_krawtchouk_identities,
    check_holder_domination,
    check_dual_character_sum,
    check_psi_diagnostics,
    check_mc_calibration,
    check_trend_report,
)


def run_verification(level: str = "quick", seed: int = 0) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    full = level == "full"
    return [check(full, seed) for check in ALL_CHECKS]
