"""Exact Krawtchouk tables and their norms under the uniform cube measure.

K_i(j) = sum_k (-1)^k C(j,k) C(n-j, i-k) is the value at Hamming weight j of
the degree-i Krawtchouk polynomial, i.e. the sum of all weight-i Walsh
characters evaluated on any weight-j point.  Norms use the expectation
convention ||f||_k^k = 2^-n * sum_j C(n,j) |f(j)|^k.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import BudgetExceededError
from .exact_arith import binomial, binomial_row
from .gf2 import enumerate_weight

DEFAULT_MAX_N = 4096
DEFAULT_MAX_K = 64
DEFAULT_WORK_BUDGET = 10**8


@dataclass(frozen=True)
class KrawtchoukTable:
    """Exact integer values K_i(j) for j = 0..n."""

    n: int
    i: int
    values: tuple[int, ...]


def build_table(n: int, i: int, max_n: int = DEFAULT_MAX_N) -> KrawtchoukTable:
    """Evaluate the explicit alternating-sum formula at every j (the
    reference implementation; see :func:`build_table_recurrence`)."""
    _check_params(n, i, max_n)
    vals = []
    for j in range(n + 1):
        row_j = binomial_row(j)
        row_nj = binomial_row(n - j)
        top = min(i, j)
        s = 0
        for k in range(top + 1):
            if i - k > n - j:
                continue
            term = row_j[k] * row_nj[i - k]
            s += -term if k & 1 else term
        vals.append(s)
    return KrawtchoukTable(n=n, i=i, values=tuple(vals))


def build_table_recurrence(n: int, i: int, max_n: int = DEFAULT_MAX_N) -> KrawtchoukTable:
    """Same table via the three-term recurrence in the degree,
    (c+1) K_{c+1}(j) = (n-2j) K_c(j) - (n-c+1) K_{c-1}(j);
    must agree with :func:`build_table` bit for bit."""
    _check_params(n, i, max_n)
    prev = [1] * (n + 1)
    if i == 0:
        return KrawtchoukTable(n=n, i=i, values=tuple(prev))
    cur = [n - 2 * j for j in range(n + 1)]
    for c in range(1, i):
        nxt = []
        for j in range(n + 1):
            num = (n - 2 * j) * cur[j] - (n - c + 1) * prev[j]
            q, rem = divmod(num, c + 1)
            if rem:
                raise ArithmeticError("recurrence produced a non-integer value")
            nxt.append(q)
        prev, cur = cur, nxt
    return KrawtchoukTable(n=n, i=i, values=tuple(cur))


def _check_params(n: int, i: int, max_n: int) -> None:
    if not 0 <= i <= n:
        raise ValueError(f"need 0 <= i <= n, got i={i}, n={n}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the configured cap {max_n}")


def _check_k(k: int, max_k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > max_k:
        raise ValueError(f"k={k} exceeds the configured cap {max_k}")


def abs_norm_k(table: KrawtchoukTable, k: int, max_k: int = DEFAULT_MAX_K) -> Fraction:
    """||K_i||_k^k = 2^-n sum_j C(n,j) |K_i(j)|^k, exact."""
    _check_k(k, max_k)
    row = binomial_row(table.n)
    s = sum(row[j] * abs(v) ** k for j, v in enumerate(table.values))
    return Fraction(s, 1 << table.n)


def signed_moment_k(table: KrawtchoukTable, k: int, max_k: int = DEFAULT_MAX_K) -> Fraction:
    """E K_i^k = 2^-n sum_j C(n,j) K_i(j)^k, exact.

    For every (n, i, k) this equals the number of ordered k-tuples of
    weight-i vectors with XOR-sum zero, hence is a nonnegative integer.
    """
    _check_k(k, max_k)
    row = binomial_row(table.n)
    s = sum(row[j] * v**k for j, v in enumerate(table.values))
    return Fraction(s, 1 << table.n)


def zero_sum_count_bruteforce(n: int, i: int, k: int, budget: int = DEFAULT_WORK_BUDGET) -> int:
    """Ordered k-tuples in L^k with XOR-sum zero, by direct enumeration.

    Independent oracle for :func:`signed_moment_k`.  For k >= 3 the tuple
    space is split meet-in-the-middle, so the work is ~C(n,i)^ceil(k/2).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    size = binomial(n, i)
    if k > 1 and size**(k - 1) > budget:
        raise BudgetExceededError(f"zero_sum_count_bruteforce({n},{i},{k})", size**(k - 1), budget)
    L = list(enumerate_weight(n, i, budget=budget))
    if k == 1:
        return sum(1 for v in L if v == 0)
    left = k // 2
    right = k - left
    left_counts: Counter[int] = Counter()
    for tup in product(L, repeat=left):
        x = 0
        for v in tup:
            x ^= v
        left_counts[x] += 1
    total = 0
    for tup in product(L, repeat=right):
        x = 0
        for v in tup:
            x ^= v
        total += left_counts.get(x, 0)
    return total


def mass_outside_sign_region(table: KrawtchoukTable, k: int, max_k: int = DEFAULT_MAX_K) -> Fraction:
    """Diagnostic: fraction of sum_j C(n,j)|K(j)|^k carried by j outside the
    closed interval between the first and last sign change (1 if none)."""
    _check_k(k, max_k)
    # root region: indices where the value opposes the (positive) value at 0
    flipped = [j for j, v in enumerate(table.values) if v * table.values[0] < 0]
    total = abs_norm_k(table, k, max_k=max_k)
    if not flipped or total == 0:
        return Fraction(1)
    lo, hi = flipped[0], flipped[-1]
    row = binomial_row(table.n)
    inside = sum(row[j] * abs(table.values[j]) ** k for j in range(lo, hi + 1))
    return 1 - Fraction(inside, 1 << table.n) / total


def signed_abs_ratio(table: KrawtchoukTable, k: int, max_k: int = DEFAULT_MAX_K) -> float | None:
    """Diagnostic ratio E K^k / E |K|^k in [0, 1]; None when the norm is 0."""
    norm = abs_norm_k(table, k, max_k=max_k)
    if norm == 0:
        return None
    return float(signed_moment_k(table, k, max_k=max_k) / norm)


def table_to_json_dict(table: KrawtchoukTable) -> dict:
    row = binomial_row(table.n)
    return {
        "n": table.n,
        "i": table.i,
        "values": [str(v) for v in table.values],
        "binomials": [str(b) for b in row],
    }


def table_to_csv(table: KrawtchoukTable) -> str:
    """CSV with columns j, C(n,j), K_i(j)."""
    row = binomial_row(table.n)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["j", "binom", "value"])
    for j, v in enumerate(table.values):
        w.writerow([j, row[j], v])
    return buf.getvalue()
