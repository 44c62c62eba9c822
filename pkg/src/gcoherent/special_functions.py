"""Scalar kernels: associated Laguerre polynomials, Pochhammer symbols,
falling factorials, binomials and log-Gamma ratios.

Everything here is a pure function of plain Python numbers.  Integer
combinatorics are exact (Python ints) until they are converted to float;
anything that would overflow a double goes through log space instead.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

# Largest tolerated sum|t| / |sum t| before switching to exact summation.
CANCELLATION_LIMIT = 1e3

__all__ = [
    "binomial",
    "falling_factorial",
    "laguerre_assoc",
    "log_factorial",
    "log_gamma_ratio",
    "pochhammer",
]


def _check_index(name: str, value: int) -> None:
    if int(value) != value or value < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {value!r}")


def binomial(n: int, k: int) -> float:
    """C(n, k) as a float: correctly rounded, inf past the double range."""
    _check_index("n", n)
    if k < 0 or k > n:
        return 0.0
    exact = math.comb(int(n), int(k))
    try:
        return float(exact)
    except OverflowError:
        return math.inf


def log_factorial(n: int) -> float:
    _check_index("n", n)
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


def laguerre_assoc(n: int, alpha: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^(alpha)(x) from its explicit sum

        sum_{j=0}^{n} (-1)^j C(n + alpha, n - j) x^j / j!

    The terms alternate, so they are accumulated with ``math.fsum``.  fsum
    only rounds the sum of already-rounded terms; when the terms cancel by
    more than three digits (large x) the sum is redone over the rationals
    from the double x, which makes the result correctly rounded.
    """
    _check_index("n", n)
    _check_index("alpha", alpha)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if n == 0:
        return 1.0
    terms = []
    power = 1.0  # x^j / j!
    for j in range(n + 1):
        if j:
            power *= x / j
        c = binomial(n + alpha, n - j)
        terms.append(-c * power if j % 2 else c * power)
    if all(math.isfinite(t) for t in terms):
        total = math.fsum(terms)
        if math.fsum(abs(t) for t in terms) <= CANCELLATION_LIMIT * abs(total):
            return total
    xf = Fraction(x)
    exact = Fraction(0)
    term = Fraction(1)  # x^j / j!
    for j in range(n + 1):
        if j:
            term = term * xf / j
        c = math.comb(n + alpha, n - j)
        exact += -c * term if j % 2 else c * term
    try:
        return float(exact)
    except OverflowError:
        return math.inf if exact > 0 else -math.inf


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1."""
    _check_index("n", n)
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def falling_factorial(N: int, n: int) -> float:
    """N! / (N-n)!, written _N P_n in the su(2) normalisation; inf on overflow."""
    _check_index("N", N)
    _check_index("n", n)
    if n > N:
        raise DomainError(f"falling factorial needs n <= N, got N={N}, n={n}")
    exact = math.perm(int(N), int(n))
    try:
        return float(exact)
    except OverflowError:
        return math.inf


def log_gamma_ratio(a: float, k: int) -> float:
    """log(Gamma(a+k) / Gamma(a)) = log (a)_k, for a > 0."""
    _check_index("k", k)
    if not a > 0:
        raise DomainError(f"log_gamma_ratio needs a > 0, got {a!r}")
    return math.fsum(math.log(a + i) for i in range(k))
