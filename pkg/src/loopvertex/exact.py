"""Exact big-integer combinatorics.

Fuss-Catalan numbers C_n^(p) = binom(pn, n) / ((p-1)n + 1), the series
coefficients binom(pn, n) of F_p, the perturbative coefficients of the
partition function, Cayley tree counts, and the degree-refined tree
majorant that controls the convergence of the tree expansion.

Everything here is computed in arbitrary precision (int / Fraction) and
converted to floating point only at final summation, so these functions
double as oracles for the floating-point modules.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ContractError

__all__ = [
    "fuss_catalan_number",
    "binom_pn_n",
    "z_series_coefficient",
    "perturbative_partial_sum",
    "log_partition_series_coefficients",
    "cayley_count",
    "majorant_term",
    "majorant_partial_sum",
    "fit_majorant_constant",
]


def _check_order(p: int) -> None:
    if not isinstance(p, int) or p < 2:
        raise ContractError(f"interaction order must be an integer >= 2, got {p!r}")


def fuss_catalan_number(p: int, n: int) -> int:
    """n-th Fuss-Catalan number of order p, exactly.

    Defined equivalently as binom(pn+1, n)/(pn+1) or binom(pn, n)/((p-1)n+1);
    both quotients are exact integers.
    """
    _check_order(p)
    if n < 0:
        raise ContractError("n must be >= 0")
    num = math.comb(p * n, n)
    den = (p - 1) * n + 1
    q, r = divmod(num, den)
    if r:  # divisibility is a theorem; a remainder means a bug
        raise AssertionError(f"(p-1)n+1 does not divide binom(pn, n) at p={p}, n={n}")
    return q


def binom_pn_n(p: int, n: int) -> int:
    """binom(pn, n) = (pn)! / (n! ((p-1)n)!), the coefficient of z^n in F_p."""
    _check_order(p)
    if n < 0:
        raise ContractError("n must be >= 0")
    return math.comb(p * n, n)


def z_series_coefficient(p: int, n: int, q: int) -> Fraction:
    """Exact coefficient of lambda^n (Jbar J)^q in the source-dependent
    partition function: (-1)^n (pn+q)! / (n! (q!)^2)."""
    _check_order(p)
    if n < 0 or q < 0:
        raise ContractError("n and q must be >= 0")
    sign = -1 if n % 2 else 1
    return Fraction(sign * math.factorial(p * n + q),
                    math.factorial(n) * math.factorial(q) ** 2)


def perturbative_partial_sum(spec, n_max: int, q: int = 0) -> complex:
    """Partial sum over n <= n_max of the exact lambda-series at fixed q.

    The series is divergent; the caller decides what the partial sum means.
    Coefficients stay exact, floating point enters per term at summation.
    """
    if n_max < 0:
        raise ContractError("n_max must be >= 0")
    lam = complex(spec.lam)
    total = 0j
    power = 1.0 + 0j
    for n in range(n_max + 1):
        total += float(z_series_coefficient(spec.p, n, q)) * power
        power *= lam
    return total


def log_partition_series_coefficients(p: int, n_max: int) -> list[Fraction]:
    """Exact coefficients c_1..c_n_max of the formal log of the q = 0
    lambda-series of the partition function.

    With a_n = z_series_coefficient(p, n, 0) the recurrence is
    c_n = a_n - (1/n) sum_{k<n} k c_k a_{n-k}.  For p = 2 this gives
    -2, 10, -296/3, 1412, ...  Like the series itself, the log series is
    divergent; it is an asymptotic oracle, not a convergent one.
    """
    if n_max < 1:
        raise ContractError("n_max must be >= 1")
    a = [z_series_coefficient(p, n, 0) for n in range(n_max + 1)]
    c: list[Fraction] = []
    for n in range(1, n_max + 1):
        acc = a[n]
        for k in range(1, n):
            acc -= Fraction(k, n) * c[k - 1] * a[n - k]
        c.append(acc)
    return c


def cayley_count(n: int) -> int:
    """Number of labeled trees on n vertices: n^(n-2) for n >= 2, 1 for n = 1."""
    if n < 1:
        raise ContractError("n must be >= 1")
    return 1 if n == 1 else n ** (n - 2)


def majorant_term(p: int, abs_lambda: float, K: float, n: int) -> float:
    """Order-n term of the tree-expansion majorant.

    For n >= 2 every labeled tree with degree sequence (d_1..d_n),
    sum d_i = 2n-2, is counted with Cayley's refinement (n-2)!/prod (d_i-1)!
    and bounded by prod (d_i-1)! K^{d_i} |lambda|^{d_i/(2p-2)}; the factorials
    cancel, leaving

        (1/n!) * #compositions(2n-2 into n parts >= 1)
               * (n-2)! * K^{2n-2} * |lambda|^{(2n-2)/(2p-2)}.

    The n = 1 term is the single-vertex surrogate K |lambda|^{1/(2p-2)}
    (a convention: the bound for the derivative-free vertex is handled by
    integration by parts and has no sharp counterpart here).
    """
    _check_order(p)
    if K <= 0 or abs_lambda <= 0:
        raise ContractError("K and abs_lambda must be > 0")
    if n < 1:
        raise ContractError("n must be >= 1")
    if n == 1:
        return K * abs_lambda ** (1.0 / (2 * p - 2))
    n_seqs = math.comb(2 * n - 3, n - 1)
    exponent = (2 * n - 2) / (2 * p - 2)
    return (math.factorial(n - 2) / math.factorial(n)) * n_seqs \
        * K ** (2 * n - 2) * abs_lambda ** exponent


def majorant_partial_sum(p: int, abs_lambda: float, K: float, n_max: int) -> float:
    """Sum of majorant_term over 1 <= n <= n_max."""
    if n_max < 1:
        raise ContractError("n_max must be >= 1")
    return math.fsum(majorant_term(p, abs_lambda, K, n) for n in range(1, n_max + 1))


def fit_majorant_constant(p: int, abs_lambda: float,
                          order_magnitudes: list[float]) -> float:
    """Smallest K such that majorant_term dominates each observed |order-n|.

    ``order_magnitudes[i]`` is the magnitude of the order n = i+1 term of the
    tree expansion.  Returns the max over n of the K solving equality.
    """
    fitted = 0.0
    for i, mag in enumerate(order_magnitudes):
        n = i + 1
        if mag <= 0.0:
            continue
        base = majorant_term(p, abs_lambda, 1.0, n)  # K = 1 reference
        k_exp = 1 if n == 1 else (2 * n - 2)
        fitted = max(fitted, (mag / base) ** (1.0 / k_exp))
    return fitted
