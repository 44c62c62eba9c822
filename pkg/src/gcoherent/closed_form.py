"""Closed-form matrix elements of U(z), V(z) and W(z).

    <n|U(z)|m>      Heisenberg-Weyl, associated Laguerre form
    <K,n|V(z)|K,m>  su(1,1), finite sum in kappa = sinh|z| z/|z|
    <J,n|W(z)|J,m>  su(2),   starred finite sum in kappa = sin|z| z/|z|

All three are evaluated in log space with the phase carried separately, so
indices into the hundreds do not overflow.  The su(1,1) and su(2) sums
alternate in sign and can cancel catastrophically for large n, m (the
su(1,1) sum at |z| = 1, n = 60, m = 15 loses every digit in double
precision).  When the ratio sum|t| / |sum t| says more than three digits
would be lost, the same finite sum is re-evaluated exactly over the
rationals from the double-precision inputs, then rounded once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .errors import DomainError, NoClosedFormError, PoleError
from .representations import Algebra, AlgebraSpec
from .special_functions import laguerre_assoc, log_factorial, log_gamma_ratio

__all__ = [
    "DisplacementFrame",
    "ElementQuery",
    "POLE_TOL",
    "element",
    "frame",
    "u_element",
    "v_element",
    "w_element",
]

POLE_TOL = 1e-12
# Largest tolerated sum|t| / |sum t| before switching to exact summation.
CANCELLATION_LIMIT = 1e3


@dataclass(frozen=True)
class DisplacementFrame:
    z: complex
    zeta_or_eta: Optional[complex]
    kappa: complex
    pole: bool = False


@dataclass(frozen=True)
class ElementQuery:
    """One matrix element <n| X(z, t) |m>; n is the bra index."""

    algebra: AlgebraSpec
    n: int
    m: int
    z: complex
    t: float = 0.0

    def __post_init__(self):
        self.algebra.check_index(self.n)
        self.algebra.check_index(self.m)
        z = complex(self.z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError(f"z must be finite, got {self.z!r}")
        if not math.isfinite(self.t):
            raise DomainError(f"t must be finite, got {self.t!r}")
        if self.t and self.algebra.kind is Algebra.HW:
            raise DomainError("the t parameter is defined for su(1,1) and su(2) only")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", float(self.t))


def _scaled(z: complex, fn: Callable[[float], float]) -> complex:
    """fn(|z|) z / |z| with the analytic value 0 at z = 0."""
    r = abs(z)
    if r == 0:
        return 0j
    return z * (fn(r) / r)


def frame(spec: AlgebraSpec, z: complex, strict: bool = False) -> DisplacementFrame:
    """zeta (su(1,1)) or eta (su(2)) together with kappa.

    At an eta pole (cos|z| = 0) kappa is still returned, eta is None and
    ``pole`` is set; with ``strict=True`` a PoleError is raised instead.
    """
    z = complex(z)
    if spec.kind is Algebra.SU11:
        return DisplacementFrame(z, _scaled(z, math.tanh), _scaled(z, math.sinh))
    if spec.kind is Algebra.SU2:
        kappa = _scaled(z, math.sin)
        if abs(math.cos(abs(z))) < POLE_TOL:
            if strict:
                raise PoleError(f"eta = tan|z| z/|z| has a pole at |z| = {abs(z)!r}")
            return DisplacementFrame(z, None, kappa, pole=True)
        return DisplacementFrame(z, _scaled(z, math.tan), kappa)
    raise DomainError("frame() is defined for su(1,1) and su(2) only")


def _xlogy(k: float, v: float) -> float:
    """k*log(v) with the convention 0*log(0) = 0."""
    if k == 0:
        return 0.0
    if v == 0:
        return -math.inf
    return k * math.log(v)


def _log_abs_fraction(f: Fraction) -> float:
    return math.log(abs(f.numerator)) - math.log(f.denominator)


def _signed_log_sum(
    terms: Sequence[Tuple[int, float]], exact: Callable[[], Tuple[Fraction, float]]
) -> Tuple[int, float]:
    """Return (sign, log|S|) for S = sum sign_j exp(logmag_j).

    ``exact`` recomputes S as (F, offset) with S = F exp(offset), F a
    Fraction; it is only called when the float sum is untrustworthy.
    """
    top = max(l for _, l in terms)
    if top == -math.inf:
        return 0, -math.inf
    vals = [s * math.exp(l - top) for s, l in terms]
    total = math.fsum(vals)
    spread = math.fsum(abs(v) for v in vals)
    if total != 0 and spread <= CANCELLATION_LIMIT * abs(total):
        return (1 if total > 0 else -1), top + math.log(abs(total))
    f, offset = exact()
    if f == 0 or offset == -math.inf:
        return 0, -math.inf
    return (1 if f > 0 else -1), offset + _log_abs_fraction(f)


def _phase_power(kappa: complex, n: int, m: int) -> complex:
    """Unit-modulus part of kappa^(n-m) (n >= m) or (-conj kappa)^(m-n)."""
    if n == m:
        return 1 + 0j
    unit = kappa / abs(kappa)
    if n > m:
        return unit ** (n - m)
    return (-unit.conjugate()) ** (m - n)


def u_element(n: int, m: int, z: complex) -> complex:
    """<n|U(z)|m> for U(z) = exp(z a^dagger - conj(z) a)."""
    AlgebraSpec.hw().check_index(n)
    AlgebraSpec.hw().check_index(m)
    z = complex(z)
    r = abs(z)
    if r == 0:
        return 1 + 0j if n == m else 0j
    x = r * r
    d = abs(n - m)
    lo = min(n, m)
    # sqrt(lo!/hi!) e^{-|z|^2/2} |z|^d
    log_mag = 0.5 * (log_factorial(lo) - log_factorial(max(n, m))) - 0.5 * x + _xlogy(d, r)
    lag = laguerre_assoc(lo, d, x)
    return math.exp(log_mag) * lag * _phase_power(z, n, m)


def v_element(K: float, n: int, m: int, z: complex) -> complex:
    """<K,n|V(z)|K,m> for V(z) = exp(z K_+ - conj(z) K_-), any K > 0.

    sqrt(n! m! / ((2K)_n (2K)_m)) kappa^(n-m) (1+|kappa|^2)^-(K+(n+m)/2)
      * sum_j (-1)^(lo-j) Gamma(2K+n+m-j) / (Gamma(2K) (m-j)! (n-j)! j!)
              (1+|kappa|^2)^j |kappa|^(2(lo-j))
    with lo = min(n, m) and kappa^(n-m) read as (-conj kappa)^(m-n) when n < m.
    """
    spec = AlgebraSpec.su11(K)
    K = spec.spin
    spec.check_index(n)
    spec.check_index(m)
    z = complex(z)
    r = abs(z)
    if r == 0:
        return 1 + 0j if n == m else 0j
    kappa = _scaled(z, math.sinh)
    x = math.sinh(r) ** 2
    onepx = math.cosh(r) ** 2
    lo, d = min(n, m), abs(n - m)
    two_k = 2.0 * K

    log_pref = (
        0.5 * (log_factorial(n) + log_factorial(m) - log_gamma_ratio(two_k, n) - log_gamma_ratio(two_k, m))
        - (K + 0.5 * (n + m)) * math.log(onepx)
        + _xlogy(d, abs(kappa))
    )
    terms = [
        (
            -1 if (lo - j) % 2 else 1,
            log_gamma_ratio(two_k, n + m - j)
            - log_factorial(m - j)
            - log_factorial(n - j)
            - log_factorial(j)
            + _xlogy(j, onepx)
            + _xlogy(lo - j, x),
        )
        for j in range(lo + 1)
    ]

    def exact() -> Tuple[Fraction, float]:
        xf = Fraction(x)
        yf = xf + 1
        a = Fraction(two_k)
        rising = Fraction(1)  # (2K)_{n+m-lo}
        for i in range(n + m - lo):
            rising *= a + i
        total = Fraction(0)
        # j runs downward so the rising factorial grows by one factor per step
        for j in range(lo, -1, -1):
            coeff = rising / (math.factorial(m - j) * math.factorial(n - j) * math.factorial(j))
            term = coeff * yf**j * xf ** (lo - j)
            total += -term if (lo - j) % 2 else term
            rising *= a + n + m - j
        return total, 0.0

    sign, log_sum = _signed_log_sum(terms, exact)
    if sign == 0:
        return 0j
    return sign * math.exp(log_pref + log_sum) * _phase_power(kappa, n, m)


def w_element(J: float, n: int, m: int, z: complex) -> complex:
    """<J,n|W(z)|J,m> for W(z) = exp(z J_+ - conj(z) J_-), 0 <= n, m <= 2J.

    sqrt(n! m! / (P(2J,n) P(2J,m))) kappa^(n-m) (1-|kappa|^2)^(J-(n+m)/2)
      * sum*_j (-1)^(lo-j) (2J)! / ((2J-m-n+j)! (m-j)! (n-j)! j!)
               (1-|kappa|^2)^j |kappa|^(2(lo-j))
    where sum* keeps only 2J - m - n + j >= 0.  On that range the merged
    power J - (n+m)/2 + j is never negative, so the prefactor power is folded
    into each term and |kappa| = 1 (cos|z| = 0) needs no special handling.

    (1-|kappa|^2)^p stands for cos|z|^(2p).  When 2J - n - m is odd that
    power is odd, so for cos|z| < 0 the element carries an extra sign that
    the square-root reading of (cos^2)^p would drop.
    """
    spec = AlgebraSpec.su2(J)
    spec.check_index(n)
    spec.check_index(m)
    J = spec.spin
    two_j = spec.two_j
    z = complex(z)
    r = abs(z)
    if r == 0:
        return 1 + 0j if n == m else 0j
    kappa = _scaled(z, math.sin)
    x = math.sin(r) ** 2
    c = math.cos(r) ** 2
    lo, d = min(n, m), abs(n - m)
    j0 = max(0, n + m - two_j)
    if j0 > lo:
        return 0j

    log_pref = (
        0.5
        * (
            log_factorial(n)
            + log_factorial(m)
            - (log_factorial(two_j) - log_factorial(two_j - n))
            - (log_factorial(two_j) - log_factorial(two_j - m))
        )
        + _xlogy(d, abs(kappa))
    )

    def power(j: int) -> float:
        return J - 0.5 * (n + m) + j

    terms = [
        (
            -1 if (lo - j) % 2 else 1,
            log_factorial(two_j)
            - log_factorial(two_j - m - n + j)
            - log_factorial(m - j)
            - log_factorial(n - j)
            - log_factorial(j)
            + _xlogy(power(j), c)
            + _xlogy(lo - j, x),
        )
        for j in range(j0, lo + 1)
    ]

    def exact() -> Tuple[Fraction, float]:
        # (1-x)^power(j0) is factored out in floating point; the remaining
        # integer powers use 1 - x exactly so that x + (1-x) = 1 holds.
        xf = Fraction(x)
        cf = 1 - xf
        total = Fraction(0)
        for j in range(j0, lo + 1):
            coeff = Fraction(
                math.factorial(two_j),
                math.factorial(two_j - m - n + j)
                * math.factorial(m - j)
                * math.factorial(n - j)
                * math.factorial(j),
            )
            term = coeff * cf ** (j - j0) * xf ** (lo - j)
            total += -term if (lo - j) % 2 else term
        return total, _xlogy(power(j0), c)

    sign, log_sum = _signed_log_sum(terms, exact)
    if sign == 0:
        return 0j
    if math.cos(r) < 0 and (two_j - n - m) % 2:
        sign = -sign
    return sign * math.exp(log_pref + log_sum) * _phase_power(kappa, n, m)


def element(q: ElementQuery) -> complex:
    """Dispatch a t = 0 query to the matching closed form."""
    if q.t != 0:
        raise NoClosedFormError(
            "no closed form is known for t != 0; evaluate it with the oracle instead"
        )
    kind = q.algebra.kind
    if kind is Algebra.HW:
        return u_element(q.n, q.m, q.z)
    if kind is Algebra.SU11:
        return v_element(q.algebra.spin, q.n, q.m, q.z)
    return w_element(q.algebra.spin, q.n, q.m, q.z)
