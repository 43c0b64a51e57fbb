"""Exact integer/rational helpers: binomials, binary entropy, base-2 logs.

Arbitrary-precision integers are plain Python ints; exact rationals are
``fractions.Fraction`` (always in lowest terms, never rounded).  The one
inexact quantity a caller can ask for is a base-2 logarithm, returned as a
:class:`FixedLog` with an explicit accuracy guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Rational = Fraction | int


def binomial(n: int, k: int) -> int:
    """C(n, k) exactly; 0 when k > n or k < 0."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=256)
def binomial_row(n: int) -> tuple[int, ...]:
    """The full row (C(n,0), ..., C(n,n)), memoized for repeated sweeps."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    row = [1] * (n + 1)
    for k in range(1, n + 1):
        row[k] = row[k - 1] * (n - k + 1) // k
    return tuple(row)


def entropy(t: Rational | float) -> float:
    """Binary entropy h(t) = t*log2(1/t) + (1-t)*log2(1/(1-t)), h(0)=h(1)=0.

    The argument is reduced to min(t, 1-t) in exact arithmetic first, so
    h(t) and h(1-t) are bit-identical.
    """
    q = Fraction(t)
    if q < 0 or q > 1:
        raise ValueError(f"entropy argument must lie in [0, 1], got {t}")
    if q == 0 or q == 1:
        return 0.0
    s = min(q, 1 - q)
    a = float(s)
    b = float(1 - s)
    return -(a * math.log2(a) + b * math.log2(b))


@dataclass(frozen=True)
class FixedLog:
    """A base-2 logarithm as a signed fixed-point value.

    ``raw / 2**frac_bits`` approximates the log; the producer guarantees
    absolute error at most ``2**-precision_bits`` for the input it was
    computed from.
    """

    raw: int
    frac_bits: int
    precision_bits: int

    def to_float(self) -> float:
        return self.raw / (1 << self.frac_bits)

    def __float__(self) -> float:
        return self.to_float()


def log2_rat(q: Rational, precision_bits: int = 64) -> FixedLog:
    """log2 of a positive rational, accurate to within 2**-precision_bits.

    Integer part from bit lengths; fraction bits by repeated squaring of a
    truncated fixed-point mantissa (deterministic, platform-independent).
    Exact for powers of two.
    """
    if precision_bits < 1:
        raise ValueError("precision_bits must be positive")
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"log2_rat requires a positive argument, got {q}")
    a, b = q.numerator, q.denominator

    # Integer exponent e with 2^e <= q < 2^(e+1).
    e = a.bit_length() - b.bit_length()
    if e >= 0:
        if a < (b << e):
            e -= 1
    else:
        if (a << -e) < b:
            e -= 1

    frac_bits = max(precision_bits + 2, 64)
    work_bits = frac_bits + 16  # guard bits absorb per-step truncation

    # Mantissa of q / 2^e in [1, 2) as a work_bits fixed-point integer.
    if e >= 0:
        mant = (a << work_bits) // (b << e)
    else:
        mant = (a << (work_bits - e)) // b
    one = 1 << work_bits
    two = one << 1

    frac = 0
    for _ in range(frac_bits):
        frac <<= 1
        if mant == one:
            continue  # exactly 1: all remaining bits are 0
        mant = (mant * mant) >> work_bits
        if mant >= two:
            frac |= 1
            mant >>= 1
    return FixedLog(raw=(e << frac_bits) + frac, frac_bits=frac_bits, precision_bits=precision_bits)
