"""GF(2) vector/matrix helpers on int bitsets.

Vectors of length n are Python ints with bit j = coordinate j; matrices are
sequences of row ints.  XOR is vector addition, ``int.bit_count`` is Hamming
weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceededError
from .exact_arith import binomial

DEFAULT_WORK_BUDGET = 10**8


def weight(v: int) -> int:
    """Hamming weight of a packed bit vector."""
    return v.bit_count()


def _reduce(v: int, basis: dict[int, int]) -> int:
    """Reduce v against a pivot-indexed XOR basis; 0 iff v is in its span."""
    while v:
        top = v.bit_length() - 1
        row = basis.get(top)
        if row is None:
            return v
        v ^= row
    return 0


def _insert(v: int, basis: dict[int, int]) -> bool:
    """Insert v into the basis; True iff it increased the rank."""
    v = _reduce(v, basis)
    if v == 0:
        return False
    basis[v.bit_length() - 1] = v
    return True


def rank(vectors: Iterable[int]) -> int:
    """GF(2) rank via elimination; duplicates and zeros contribute nothing."""
    basis: dict[int, int] = {}
    r = 0
    for v in vectors:
        if _insert(v, basis):
            r += 1
    return r


def in_span(v: int, vectors: Iterable[int]) -> bool:
    """Whether v lies in the GF(2) span of the given vectors."""
    basis: dict[int, int] = {}
    for u in vectors:
        _insert(u, basis)
    return _reduce(v, basis) == 0


@dataclass(frozen=True)
class VectorSequence:
    """An ordered k-tuple of n-bit vectors, repeats allowed.

    ``distinct`` lists the distinct vectors in first-occurrence order and
    ``multiplicities`` their counts (summing to k).  Zero vectors are
    rejected unless ``allow_zero=True``.
    """

    vectors: tuple[int, ...]
    n: int
    allow_zero: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        limit = 1 << self.n
        for v in self.vectors:
            if not 0 <= v < limit:
                raise ValueError(f"vector {v:#x} does not fit in {self.n} bits")
            if v == 0 and not self.allow_zero:
                raise ValueError("zero vector not permitted (pass allow_zero=True to override)")

    @property
    def k(self) -> int:
        return len(self.vectors)

    @cached_property
    def distinct(self) -> tuple[int, ...]:
        seen: dict[int, None] = {}
        for v in self.vectors:
            seen.setdefault(v)
        return tuple(seen)

    @cached_property
    def multiplicities(self) -> tuple[int, ...]:
        counts = {v: 0 for v in self.distinct}
        for v in self.vectors:
            counts[v] += 1
        return tuple(counts[v] for v in self.distinct)

    @property
    def xor_sum(self) -> int:
        s = 0
        for v in self.vectors:
            s ^= v
        return s

    def rank(self) -> int:
        return rank(self.distinct)


def coloop_positions(seq: VectorSequence) -> frozenset[int]:
    """0-based positions whose vector is outside the span of all the rest.

    A vector appearing twice or more is never a coloop (it lies in the span
    of its own other copy).
    """
    out: set[int] = set()
    distinct = seq.distinct
    mult = seq.multiplicities
    for d, v in enumerate(distinct):
        if mult[d] != 1:
            continue
        others = [u for j, u in enumerate(distinct) if j != d]
        if not in_span(v, others):
            out.add(seq.vectors.index(v))
    return frozenset(out)


def enumerate_weight(n: int, i: int, budget: int = DEFAULT_WORK_BUDGET) -> Iterator[int]:
    """All weight-i vectors of length n in colexicographic order.

    Colex order on fixed-weight sets coincides with increasing numeric order
    of the packed masks, so this walks masks with Gosper's hack.
    """
    if not 0 <= i <= n:
        raise ValueError(f"need 0 <= i <= n, got i={i}, n={n}")
    count = binomial(n, i)
    if count > budget:
        raise BudgetExceededError(f"enumerate_weight({n},{i})", count, budget)
    if i == 0:
        yield 0
        return
    v = (1 << i) - 1
    limit = 1 << n
    while v < limit:
        yield v
        low = v & -v
        ripple = v + low
        v = ripple | (((v ^ ripple) >> 2) // low)


def kernel_weight_count(rows: Sequence[int], n: int, i: int, budget: int = DEFAULT_WORK_BUDGET) -> int:
    """Number of weight-i vectors u with Mu = 0 over GF(2)."""
    total = 0
    for u in enumerate_weight(n, i, budget=budget):
        if all((r & u).bit_count() % 2 == 0 for r in rows):
            total += 1
    return total


def kernel_size(rows: Sequence[int], n: int) -> int:
    """|ker M| = 2^(n - rank M)."""
    return 1 << (n - rank(rows))


def matrix_to_json_dict(rows: Sequence[int], n: int) -> dict:
    """Hex-packed row representation for JSON fixtures (bit j = column j)."""
    return {"n": n, "m": len(rows), "rows": [f"{r:#x}" for r in rows]}


def matrix_from_json_dict(obj: dict) -> tuple[list[int], int]:
    """Inverse of :func:`matrix_to_json_dict`; validates row widths."""
    n = int(obj["n"])
    rows = [int(s, 16) for s in obj["rows"]]
    if "m" in obj and int(obj["m"]) != len(rows):
        raise ValueError("row count does not match declared m")
    for r in rows:
        if not 0 <= r < (1 << n):
            raise ValueError(f"row {r:#x} does not fit in {n} bits")
    return rows, n
