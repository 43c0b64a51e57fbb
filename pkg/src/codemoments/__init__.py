"""Moment structure of weight distributions of random binary linear codes.

Exact (rational-arithmetic) and seeded Monte Carlo computation of the
central moments of X = #{weight-i codewords} for the kernel of a random
m x n GF(2) matrix, together with the Krawtchouk-norm machinery and
exponent analytics that predict their growth.
"""

__version__ = "0.1.0"

from .errors import BudgetExceededError
from .exact_arith import FixedLog, binomial, entropy, log2_rat
from .exponents import (
    DiagnosticFlag,
    ExponentReport,
    exponent_grid,
    f_n,
    find_k0,
    psi_diagnostics,
    psi_n,
    theorem_exponent,
)
from .gf2 import VectorSequence, coloop_positions, enumerate_weight, kernel_weight_count, rank
from .krawtchouk import (
    KrawtchoukTable,
    abs_norm_k,
    build_table,
    signed_moment_k,
    zero_sum_count_bruteforce,
)
from .moments_exact import (
    CoverConfig,
    DualCheckVerdict,
    EnsembleParams,
    RankProfile,
    central_moment_exact,
    dual_character_sum_check,
    holder_bound,
    product_expectation,
    product_expectation_oracle,
    rank_profile,
    sandwich_sum,
    structured_tuple_count,
)
from .montecarlo import McConfig, McReport, estimate, sample_X
from .verify import CheckResult, run_verification

__all__ = [
    "BudgetExceededError",
    "CheckResult",
    "CoverConfig",
    "DiagnosticFlag",
    "DualCheckVerdict",
    "EnsembleParams",
    "ExponentReport",
    "FixedLog",
    "KrawtchoukTable",
    "McConfig",
    "McReport",
    "RankProfile",
    "VectorSequence",
    "abs_norm_k",
    "binomial",
    "build_table",
    "central_moment_exact",
    "coloop_positions",
    "dual_character_sum_check",
    "entropy",
    "enumerate_weight",
    "estimate",
    "exponent_grid",
    "f_n",
    "find_k0",
    "holder_bound",
    "kernel_weight_count",
    "log2_rat",
    "product_expectation",
    "product_expectation_oracle",
    "psi_diagnostics",
    "psi_n",
    "rank",
    "rank_profile",
    "run_verification",
    "sample_X",
    "sandwich_sum",
    "signed_moment_k",
    "structured_tuple_count",
    "theorem_exponent",
    "zero_sum_count_bruteforce",
]
