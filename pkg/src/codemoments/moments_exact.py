"""Exact central moments of the weight-i codeword count of a random code.

The model: M is an m x n matrix with i.i.d. uniform GF(2) entries, the code
is C = ker M, L is the set of weight-i vectors, X = |L ∩ C|, p = 2^-m is the
probability that a fixed nonzero vector lies in C.

Two independent exact routes to E (X - EX)^k are provided:

* the subset-sum closed form for E prod (1_{u in C} - p) over a vector
  sequence (``product_expectation``), summed over tuples in L^k, and
* full enumeration of the matrix ensemble (``method="ensemble"``), organized
  as an exact distribution over kernel intersection patterns so that all
  2^(mn) matrices are accounted for without materializing each one.

Everything here is exact rational arithmetic; there is no floating point on
any value-producing path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial

import numpy as np

from .errors import BudgetExceededError
from .exact_arith import binomial, entropy
from .gf2 import VectorSequence, coloop_positions, enumerate_weight
from .krawtchouk import KrawtchoukTable, abs_norm_k

DEFAULT_WORK_BUDGET = 10**8
DEFAULT_MAX_MATRIX_BITS = 26
DEFAULT_MAX_DISTINCT = 24
DEFAULT_MAX_DUAL_BITS = 24


@dataclass(frozen=True)
class EnsembleParams:
    """The tuple (n, i, m): length, target weight, parity-check rows."""

    n: int
    i: int
    m: int

    def __post_init__(self) -> None:
        if not 0 < self.i <= self.n:
            raise ValueError(f"need 0 < i <= n, got i={self.i}, n={self.n}")
        if not 0 < self.m < self.n:
            raise ValueError(f"need 0 < m < n, got m={self.m}, n={self.n}")

    @property
    def p(self) -> Fraction:
        return Fraction(1, 1 << self.m)

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.i, self.n)

    @property
    def lam(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def mean(self) -> Fraction:
        """E X = C(n,i) * p."""
        return binomial(self.n, self.i) * self.p

    @property
    def variance(self) -> Fraction:
        """Var X = C(n,i) * p(1-p)."""
        return binomial(self.n, self.i) * self.p * (1 - self.p)

    def regime_flags(self) -> dict[str, bool]:
        """Advisory flags for the asymptotic regime (not preconditions)."""
        return {
            "i_even": self.i % 2 == 0,
            "gamma_below_half": self.gamma < Fraction(1, 2),
            "rate_below_entropy": float(self.lam) < entropy(self.gamma),
        }


def product_expectation(seq: VectorSequence, p: Fraction, max_distinct: int = DEFAULT_MAX_DISTINCT) -> Fraction:
    """E prod_r (1_{u_r in C} - p) for a sequence of nonzero vectors, exact.

    Subset-sum form over the t distinct vectors (multiplicities s_1..s_t):

        (-1)^k p^k sum_{x subseteq [t]} (-1)^|x| p^(r(x) - s(x))
                       prod_{d in x} (p^{s_d} - (p-1)^{s_d})

    with r(x) the GF(2) rank of the selected vectors and s(x) the sum of
    their multiplicities.  Evaluates to exactly 0 whenever the sequence has
    a coloop; no shortcut is taken, the cancellation happens in the sum.
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got {p}")
    if 0 in seq.vectors:
        raise ValueError("sequence must not contain the zero vector")
    distinct = seq.distinct
    mult = seq.multiplicities
    t = len(distinct)
    if t > max_distinct:
        raise BudgetExceededError("product_expectation distinct vectors", t, max_distinct)
    k = seq.k

    factors = [p**s - (p - 1) ** s for s in mult]

    total = Fraction(0)

    def walk(d: int, basis: dict[int, int], r: int, s: int, prod_f: Fraction, parity: int) -> None:
        nonlocal total
        if d == t:
            term = p ** (r - s) * prod_f
            total += -term if parity else term
            return
        walk(d + 1, basis, r, s, prod_f, parity)
        v = distinct[d]
        sub = dict(basis)
        while v:
            top = v.bit_length() - 1
            if top in sub:
                v ^= sub[top]
            else:
                sub[top] = v
                break
        walk(d + 1, sub, r + (1 if v else 0), s + mult[d], prod_f * factors[d], parity ^ 1)

    walk(0, {}, 0, 0, Fraction(1), 0)
    result = p**k * total
    return -result if k & 1 else result


def product_expectation_oracle(
    seq: VectorSequence,
    params: EnsembleParams,
    max_matrix_bits: int = DEFAULT_MAX_MATRIX_BITS,
) -> Fraction:
    """The same expectation, averaged over the full matrix ensemble.

    Exactly sum_M prod_r (1_{M u_r = 0} - p) / 2^(mn), with the sum over all
    2^(mn) matrices carried out row by row: rows are i.i.d., so the count of
    matrices realizing each kernel-membership pattern of the distinct
    vectors follows from repeated AND-convolution of the single-row pattern
    counts.  Rank and subset-sum machinery is deliberately not used here.
    """
    n, m = params.n, params.m
    if seq.n != n:
        raise ValueError(f"sequence length {seq.n} does not match params n={n}")
    if m * n > max_matrix_bits:
        raise BudgetExceededError("product_expectation_oracle matrix bits", m * n, max_matrix_bits)
    if 0 in seq.vectors:
        raise ValueError("sequence must not contain the zero vector")
    distinct = seq.distinct
    mult = seq.multiplicities
    t = len(distinct)
    p = params.p

    row_pattern: Counter[int] = Counter()
    for r in range(1 << n):
        pat = 0
        for d, u in enumerate(distinct):
            if (r & u).bit_count() % 2 == 0:
                pat |= 1 << d
        row_pattern[pat] += 1

    dist: Counter[int] = Counter({(1 << t) - 1: 1})
    for _ in range(m):
        nxt: Counter[int] = Counter()
        for pat, c in dist.items():
            for rpat, rc in row_pattern.items():
                nxt[pat & rpat] += c * rc
        dist = nxt

    total = Fraction(0)
    for pat, c in dist.items():
        term = Fraction(1)
        for d in range(t):
            member = 1 if (pat >> d) & 1 else 0
            term *= (member - p) ** mult[d]
        total += c * term
    return total / (1 << (m * n))


def _multiset_tuples(n: int, i: int, k: int, budget: int):
    """Yield (sorted tuple of vectors, number of orderings) covering L^k."""
    size = binomial(n, i)
    if size**k > budget:
        raise BudgetExceededError(f"tuple enumeration over L^{k}", size**k, budget)
    L = list(enumerate_weight(n, i, budget=budget))
    k_fact = factorial(k)
    for combo in combinations_with_replacement(L, k):
        perms = k_fact
        run = 1
        for a, b in zip(combo, combo[1:]):
            if a == b:
                run += 1
            else:
                perms //= factorial(run)
                run = 1
        perms //= factorial(run)
        yield combo, perms


def sandwich_sum(params: EnsembleParams, k: int, budget: int = DEFAULT_WORK_BUDGET) -> Fraction:
    """sum over coloop-free S in L^k of p^rank(S), exact."""
    return _sandwich_sum_raw(params.n, params.i, params.p, k, budget)


def _sandwich_sum_raw(n: int, i: int, p: Fraction, k: int, budget: int) -> Fraction:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    total = Fraction(0)
    for combo, perms in _multiset_tuples(n, i, k, budget):
        seq = VectorSequence(vectors=combo, n=n)
        if coloop_positions(seq):
            continue
        total += perms * p ** seq.rank()
    return total


@dataclass(frozen=True)
class RankProfile:
    """Coloop-free sequence counts in L^k, bucketed by GF(2) rank.

    ``circuit_count`` is the number of ordered zero-XOR-sum sequences of
    rank exactly k-1, reported separately: it need not equal counts[k-1]
    (lower-rank zero-sum tuples exist) and the two are not asserted equal.
    """

    n: int
    i: int
    k: int
    counts: dict[int, int]
    circuit_count: int


def rank_profile(n: int, i: int, k: int, budget: int = DEFAULT_WORK_BUDGET) -> RankProfile:
    """Classify every coloop-free sequence in L^k by rank, exactly."""
    counts: dict[int, int] = {}
    circuits = 0
    for combo, perms in _multiset_tuples(n, i, k, budget):
        seq = VectorSequence(vectors=combo, n=n)
        if coloop_positions(seq):
            continue
        r = seq.rank()
        counts[r] = counts.get(r, 0) + perms
        if seq.xor_sum == 0 and r == k - 1:
            circuits += perms
    return RankProfile(n=n, i=i, k=k, counts=counts, circuit_count=circuits)


def _kernel_mask_distribution(n: int, m: int, L: list[int]) -> Counter[int]:
    """Exact matrix counts by kernel pattern over L.

    Bit l of a pattern says whether L[l] is orthogonal to every row drawn so
    far; AND-convolving the single-row pattern counts m times enumerates the
    whole ensemble with matrix multiplicity.
    """
    row_masks: Counter[int] = Counter()
    for r in range(1 << n):
        mask = 0
        for idx, u in enumerate(L):
            if (r & u).bit_count() % 2 == 0:
                mask |= 1 << idx
        row_masks[mask] += 1
    dist: Counter[int] = Counter({(1 << len(L)) - 1: 1})
    for _ in range(m):
        nxt: Counter[int] = Counter()
        for mask, c in dist.items():
            for rmask, rc in row_masks.items():
                nxt[mask & rmask] += c * rc
        dist = nxt
    return dist


def resolve_method(params: EnsembleParams, method: str, max_matrix_bits: int = DEFAULT_MAX_MATRIX_BITS) -> str:
    """Resolve "auto" to a concrete route: ensemble when the matrix space
    fits the cap and n is small, else the tuple sum."""
    if method != "auto":
        return method
    return "ensemble" if (params.m * params.n <= max_matrix_bits and params.n <= 10) else "tuple-sum"


def central_moment_exact(
    params: EnsembleParams,
    k: int,
    method: str = "auto",
    max_matrix_bits: int = DEFAULT_MAX_MATRIX_BITS,
    budget: int = DEFAULT_WORK_BUDGET,
) -> Fraction:
    """E (X - EX)^k, exact, via either route.

    ``method`` is "ensemble" (enumerate the matrix ensemble), "tuple-sum"
    (sum product_expectation over L^k), or "auto".  The two methods agree
    exactly; tests compare them as rationals.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n, i, m = params.n, params.i, params.m
    method = resolve_method(params, method, max_matrix_bits)
    if method == "ensemble":
        if m * n > max_matrix_bits:
            raise BudgetExceededError("ensemble enumeration matrix bits", m * n, max_matrix_bits)
        L = list(enumerate_weight(n, i, budget=budget))
        dist = _kernel_mask_distribution(n, m, L)
        denom = 1 << (m * n)
        power_sums = [0] * (k + 1)
        for mask, c in dist.items():
            x = mask.bit_count()
            xp = 1
            for j in range(k + 1):
                power_sums[j] += c * xp
                xp *= x
        mu = params.mean
        total = Fraction(0)
        for j in range(k + 1):
            total += binomial(k, j) * Fraction(power_sums[j], denom) * (-mu) ** (k - j)
        return total
    if method == "tuple-sum":
        total = Fraction(0)
        for combo, perms in _multiset_tuples(n, i, k, budget):
            seq = VectorSequence(vectors=combo, n=n)
            total += perms * product_expectation(seq, params.p)
        return total
    raise ValueError(f"unknown method {method!r}")


def moment_record(
    params: EnsembleParams,
    k: int,
    method: str,
    value: Fraction,
    wall_time_ms: float,
) -> dict:
    """The JSON record shape for one exact moment computation."""
    return {
        "params": {"n": params.n, "i": params.i, "m": params.m},
        "k": k,
        "method": method,
        "value": {"num": str(value.numerator), "den": str(value.denominator)},
        "wall_time_ms": wall_time_ms,
    }


@dataclass(frozen=True)
class CoverConfig:
    """A staircase cover of [r] by v subsets, as in the tuple-counting bound.

    Sets are 0-based subsets of range(r); each S_d is nonempty, brings at
    least one index not covered by S_1..S_{d-1}, and together they cover
    all of range(r).  The derived profile a_d = |S_d \\ union_before| + 1
    satisfies a_d >= 2 and sum a_d = r + v.
    """

    r: int
    v: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.r < 1 or self.v < 1:
            raise ValueError("need r >= 1 and v >= 1")
        if len(self.sets) != self.v:
            raise ValueError(f"expected {self.v} sets, got {len(self.sets)}")
        universe = frozenset(range(self.r))
        covered: frozenset[int] = frozenset()
        for d, s in enumerate(self.sets):
            if not s:
                raise ValueError(f"S_{d} is empty")
            if not s <= universe:
                raise ValueError(f"S_{d} is not a subset of range({self.r})")
            if s <= covered:
                raise ValueError(f"S_{d} adds no new index")
            covered |= s
        if covered != universe:
            raise ValueError("the sets do not cover range(r)")

    @property
    def num_tuples(self) -> int:
        """m = r + v, the length of the constrained tuples."""
        return self.r + self.v

    @property
    def a_profile(self) -> tuple[int, ...]:
        out = []
        covered: frozenset[int] = frozenset()
        for s in self.sets:
            out.append(len(s - covered) + 1)
            covered |= s
        assert sum(out) == self.r + self.v
        return tuple(out)


def enumerate_cover_configs(r: int, v: int) -> list[CoverConfig]:
    """All valid CoverConfigs for given (r, v); small r, v only."""
    universe = frozenset(range(r))
    subsets = [frozenset(s) for s in _nonempty_subsets(r)]
    out: list[CoverConfig] = []
    for choice in product(subsets, repeat=v):
        covered: frozenset[int] = frozenset()
        ok = True
        for s in choice:
            if s <= covered:
                ok = False
                break
            covered |= s
        if ok and covered == universe:
            out.append(CoverConfig(r=r, v=v, sets=tuple(choice)))
    return out


def _nonempty_subsets(r: int):
    for mask in range(1, 1 << r):
        yield {b for b in range(r) if (mask >> b) & 1}


def structured_tuple_count(n: int, i: int, cfg: CoverConfig, budget: int = DEFAULT_WORK_BUDGET) -> int:
    """|A|: tuples (x_1..x_m) in L^m with x_{r+d} = XOR of x over S_d.

    The first r entries range freely over L; the remaining v are determined,
    so the count checks whether each determined vector lands back in L.
    """
    size = binomial(n, i)
    if size**cfg.r > budget:
        raise BudgetExceededError(f"structured tuple enumeration L^{cfg.r}", size**cfg.r, budget)
    L = list(enumerate_weight(n, i, budget=budget))
    total = 0
    for xs in product(L, repeat=cfg.r):
        for s in cfg.sets:
            acc = 0
            for idx in s:
                acc ^= xs[idx]
            if acc.bit_count() != i:
                break
        else:
            total += 1
    return total


def holder_bound(cfg: CoverConfig, table: KrawtchoukTable) -> Fraction:
    """prod_d ||K_i||_{a_d}^{a_d}, the norm-product bound dominating |A|."""
    out = Fraction(1)
    for a in cfg.a_profile:
        out *= abs_norm_k(table, a)
    return out


def config_matrix(cfg: CoverConfig) -> list[int]:
    """The r x m generator [I_r | char(S_1) .. char(S_v)] as row bitmasks
    (bit j of row b = entry in column j)."""
    rows = []
    for b in range(cfg.r):
        row = 1 << b
        for d, s in enumerate(cfg.sets):
            if b in s:
                row |= 1 << (cfg.r + d)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class DualCheckVerdict:
    """Outcome of one character-sum evaluation against its predicted value."""

    total: int
    in_dual: bool
    expected: int

    @property
    def ok(self) -> bool:
        return self.total == self.expected


def dual_character_sum_check(
    cfg: CoverConfig,
    n: int,
    sample: tuple[int, ...],
    max_bits: int = DEFAULT_MAX_DUAL_BITS,
) -> DualCheckVerdict:
    """Evaluate sum over the constrained tuple space B of prod w_{x_i}(y_i).

    B consists of the m-row matrices whose every column lies in the row
    space of the config generator; its 2^(rn) elements are indexed by the n
    per-column coefficient vectors.  The walk evaluates the character
    product for every element (each coefficient bit contributes a fixed,
    precomputed sign) and sums, then compares against 2^(rn) * 1{sample has
    every column annihilated by the generator}.
    """
    m = cfg.num_tuples
    if len(sample) != m:
        raise ValueError(f"sample must have {m} entries, got {len(sample)}")
    if m * n > max_bits:
        raise BudgetExceededError("dual character sum bits", m * n, max_bits)
    for y in sample:
        if not 0 <= y < (1 << n):
            raise ValueError("sample entry out of range")
    rows = config_matrix(cfg)
    r = cfg.r

    # Sign contributed by coefficient bit (column j, generator row b):
    # toggling it flips entry (i, j) of the tuple matrix for every i in the
    # generator row's support, multiplying the product by (-1)^{y_i[j]}.
    neg_bits = 0
    pos = 0
    for j in range(n):
        for b in range(r):
            par = 0
            for idx in range(m):
                if (rows[b] >> idx) & 1:
                    par ^= (sample[idx] >> j) & 1
            if par:
                neg_bits |= 1 << pos
            pos += 1

    total = 0
    space = 1 << (r * n)
    chunk = 1 << 20
    for start in range(0, space, chunk):
        stop = min(start + chunk, space)
        alphas = np.arange(start, stop, dtype=np.uint64)
        parities = np.bitwise_count(alphas & np.uint64(neg_bits)) & np.uint8(1)
        total += int(stop - start) - 2 * int(parities.sum())

    in_dual = True
    for j in range(n):
        col = 0
        for idx in range(m):
            col |= ((sample[idx] >> j) & 1) << idx
        for b in range(r):
            if (rows[b] & col).bit_count() % 2 == 1:
                in_dual = False
                break
        if not in_dual:
            break
    expected = space if in_dual else 0
    return DualCheckVerdict(total=total, in_dual=in_dual, expected=expected)


def sample_dual_tuple(cfg: CoverConfig, n: int, rng: np.random.Generator) -> tuple[int, ...]:
    """A uniform element of the dual tuple space B* for the given config:
    every column is a random combination of the dual generator rows
    [char(S_d) | I_v]."""
    m = cfg.num_tuples
    dual_rows = []
    for d, s in enumerate(cfg.sets):
        row = 1 << (cfg.r + d)
        for b in s:
            row |= 1 << b
        dual_rows.append(row)
    ys = [0] * m
    for j in range(n):
        col = 0
        for row in dual_rows:
            if rng.integers(0, 2):
                col ^= row
        for idx in range(m):
            if (col >> idx) & 1:
                ys[idx] |= 1 << j
    return tuple(ys)
