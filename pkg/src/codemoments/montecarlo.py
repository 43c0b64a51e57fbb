"""Seeded Monte Carlo estimation of the codeword-count distribution.

Determinism contract: the estimate is a pure function of (params, k_max,
samples, seed) and is identical for any worker count.  Sample index s draws
its matrix from its own slice of a Philox counter-based stream (numpy's
``numpy.random.Philox`` keyed by the seed): each sample owns a fixed number
of 4-word counter blocks, and a worker assigned samples [a, b) jumps the
counter to block a and draws its whole range in one vectorized batch.

Per-sample values are accumulated as an exact histogram of X (a sufficient
statistic for every power sum), so moments are formed in exact integer /
rational arithmetic and divided once at the end; no floating-point
cancellation can occur.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np
from numpy.random import Philox

from .errors import BudgetExceededError
from .exact_arith import binomial
from .gf2 import enumerate_weight, kernel_weight_count
from .moments_exact import EnsembleParams

DEFAULT_SAMPLE_BUDGET = 10**8
_WORDS_PER_BLOCK = 4  # Philox advances in 4-output counter blocks
_CHUNK_SAMPLES = 1 << 15


@dataclass(frozen=True)
class McConfig:
    params: EnsembleParams
    k_max: int
    samples: int
    seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _words_per_row(n: int) -> int:
    return (n + 63) // 64


def _blocks_per_sample(params: EnsembleParams) -> int:
    words = params.m * _words_per_row(params.n)
    return (words + _WORDS_PER_BLOCK - 1) // _WORDS_PER_BLOCK


def sample_X(params: EnsembleParams, rng_stream, budget: int = DEFAULT_SAMPLE_BUDGET) -> int:
    """Draw one matrix from the raw word stream and count weight-i kernel
    vectors.  ``rng_stream`` needs a ``random_raw(size)`` method (a Philox
    bit generator positioned at the sample's block, or a test stub)."""
    size = binomial(params.n, params.i)
    if size > budget:
        raise BudgetExceededError("sample_X weight class size", size, budget)
    w = _words_per_row(params.n)
    blocks = _blocks_per_sample(params)
    raw = np.asarray(rng_stream.random_raw(blocks * _WORDS_PER_BLOCK), dtype=np.uint64)
    rows = _assemble_rows(raw[: params.m * w].reshape(params.m, w), params.n)
    return kernel_weight_count(rows, params.n, params.i, budget=budget)


def _assemble_rows(words: np.ndarray, n: int) -> list[int]:
    """(m, w) uint64 words -> list of n-bit row ints (word 0 = bits 0..63)."""
    rows = []
    for sample_words in words:
        r = 0
        for pos, word in enumerate(sample_words):
            r |= int(word) << (64 * pos)
        rows.append(r & ((1 << n) - 1))
    return rows


def _chunk_histogram(params: EnsembleParams, L_words: np.ndarray, seed: int, start: int, count: int) -> Counter[int]:
    """Exact histogram of X over samples [start, start+count)."""
    n, m = params.n, params.m
    w = _words_per_row(n)
    blocks = _blocks_per_sample(params)
    bg = Philox(key=seed)
    if start:
        bg.advance(start * blocks)
    raw = bg.random_raw(count * blocks * _WORDS_PER_BLOCK)
    raw = raw.reshape(count, blocks * _WORDS_PER_BLOCK)[:, : m * w].reshape(count, m, w)
    if n % 64:
        mask = np.uint64((1 << (n % 64)) - 1)
        raw[:, :, w - 1] &= mask

    x = np.zeros(count, dtype=np.int64)
    odd = np.empty((count, m), dtype=np.uint64)
    for vec_words in L_words:
        odd[:] = 0
        for pos in range(w):
            odd ^= np.bitwise_count(raw[:, :, pos] & vec_words[pos])
        in_kernel = ((odd & np.uint64(1)) == 0).all(axis=1)
        x += in_kernel
    values, counts = np.unique(x, return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(values, counts)})


@dataclass(frozen=True)
class McMomentRow:
    k: int
    raw_moment: Fraction
    central_moment: Fraction
    normalized: float
    normalized_empirical: float | None
    stderr: float


@dataclass(frozen=True)
class McReport:
    config: McConfig
    histogram: dict[int, int]
    rows: tuple[McMomentRow, ...]

    def to_json_dict(self) -> dict:
        p = self.config.params
        return {
            "schema_version": 1,
            "params": {"n": p.n, "i": p.i, "m": p.m},
            "k_max": self.config.k_max,
            "samples": self.config.samples,
            "seed": self.config.seed,
            "exact_mean": _rat(p.mean),
            "exact_variance": _rat(p.variance),
            "histogram": {str(x): c for x, c in sorted(self.histogram.items())},
            "rows": [
                {
                    "k": r.k,
                    "raw_moment": _rat(r.raw_moment),
                    "central_moment": _rat(r.central_moment),
                    "normalized": r.normalized,
                    "normalized_empirical": r.normalized_empirical,
                    "stderr": r.stderr,
                }
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["k", "raw_moment", "central_moment", "normalized", "stderr", "normalized_empirical"])
        for r in self.rows:
            w.writerow(
                [
                    r.k,
                    f"{float(r.raw_moment):.12g}",
                    f"{float(r.central_moment):.12g}",
                    f"{r.normalized:.12g}",
                    f"{r.stderr:.12g}",
                    "" if r.normalized_empirical is None else f"{r.normalized_empirical:.12g}",
                ]
            )
        return buf.getvalue()


def _rat(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def estimate(cfg: McConfig, budget: int = DEFAULT_SAMPLE_BUDGET) -> McReport:
    """Estimate central moments for k = 1..k_max; see the module docstring
    for the determinism contract."""
    params = cfg.params
    size = binomial(params.n, params.i)
    if size > budget:
        raise BudgetExceededError("per-sample weight class size", size, budget)
    w = _words_per_row(params.n)
    L_words = np.array(
        [[(v >> (64 * pos)) & ((1 << 64) - 1) for pos in range(w)] for v in enumerate_weight(params.n, params.i)],
        dtype=np.uint64,
    )

    spans: list[tuple[int, int]] = []
    base, extra = divmod(cfg.samples, cfg.workers)
    pos = 0
    for widx in range(cfg.workers):
        cnt = base + (1 if widx < extra else 0)
        if cnt:
            spans.append((pos, cnt))
            pos += cnt

    def run_span(span: tuple[int, int]) -> Counter[int]:
        start, cnt = span
        hist: Counter[int] = Counter()
        done = 0
        while done < cnt:
            step = min(_CHUNK_SAMPLES, cnt - done)
            hist += _chunk_histogram(params, L_words, cfg.seed, start + done, step)
            done += step
        return hist

    histogram: Counter[int] = Counter()
    if cfg.workers == 1:
        for span in spans:
            histogram += run_span(span)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for h in pool.map(run_span, spans):
                histogram += h

    return McReport(config=cfg, histogram=dict(histogram), rows=tuple(_rows_from_histogram(cfg, histogram)))


def _rows_from_histogram(cfg: McConfig, histogram: Counter[int]) -> list[McMomentRow]:
    params = cfg.params
    n_samples = cfg.samples
    mu = params.mean
    var_exact = params.variance

    # Central power sums around the exact mean, needed up to 2*k_max for
    # the standard error of each k-th moment statistic.
    central_sums: dict[int, Fraction] = {}
    for j in range(0, 2 * cfg.k_max + 1):
        central_sums[j] = sum(((Fraction(x) - mu) ** j) * c for x, c in histogram.items())
    raw_sums = {j: sum(Fraction(x) ** j * c for x, c in histogram.items()) for j in range(cfg.k_max + 1)}

    emp_var = central_sums[2] / n_samples

    rows = []
    for k in range(1, cfg.k_max + 1):
        central = central_sums[k] / n_samples
        second = central_sums[2 * k] / n_samples
        stat_var = second - central * central
        stderr = sqrt(float(stat_var) / n_samples) if stat_var > 0 else 0.0
        normalized = float(central) / float(var_exact) ** (k / 2)
        normalized_emp = None
        if emp_var > 0:
            normalized_emp = float(central) / float(emp_var) ** (k / 2)
        rows.append(
            McMomentRow(
                k=k,
                raw_moment=raw_sums[k] / n_samples,
                central_moment=central,
                normalized=normalized,
                normalized_empirical=normalized_emp,
                stderr=stderr,
            )
        )
    return rows
