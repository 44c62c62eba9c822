"""Numerical checks of the operator identities behind the closed forms.

* exchange relations  e^{aX_-} e^{2bX_3} e^{cX_+} = e^{xX_+} e^{2yX_3} e^{zX_-}
  for su(1,1) and su(2), in the 2x2 fundamental representation and in the
  spin representation;
* disentangling formulas for U(z), V(z), W(z), both orderings;
* the elementary BCH formula behind U(z);
* the group law U(z+w) = e^{-(z w* - z* w)/2} U(z) U(w);
* the two factorization formulas for associated Laguerre polynomials.

Exponentials of a single ladder operator are nilpotent on a truncated space
and are built exactly from band products (``expm_ladder``), so the only
truncation error in a normal-ordered product is none at all, and in an
anti-normal-ordered product it is the tail of a convergent sum.  Truncated
residuals are measured on a stable top-left block: at most D // 8 states
(n + m <= D/4), and shrunk further until the floating-point rounding bound
eps * (|A| |B| |C|) of the triple product plus its truncation tail is
below a tenth of the check's tolerance.  The ordered sums cancel heavily at high Fock index (terms of
1e14 summing to O(1) are typical), so beyond that block double precision
has nothing left to compare.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .closed_form import frame, u_element
from .errors import DomainError, SingularExchangeError, TailNotConvergedError
from .oracle import OracleConfig, operator_matrix, oracle_block
from .representations import Algebra, AlgebraSpec, fundamental_matrices, ladder_matrices
from .special_functions import laguerre_assoc

__all__ = [
    "ExchangeParams",
    "IdentityCheck",
    "bch_check",
    "exchange_params_su11",
    "exchange_params_su2",
    "exchange_residuals",
    "expm_ladder",
    "factorization_check",
    "factorization_rhs",
    "group_law_check",
    "group_law_oracle_check",
    "verify_disentangling",
    "verify_exchange",
]

SINGULAR_F = 1e-12
TAIL_TERM = 1e-14
DEFAULT_DIM = 128


@dataclass
class IdentityCheck:
    name: str
    params: Dict[str, Any]
    residual: float
    tol: float
    passed: bool = field(init=False)
    dim_used: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.residual = float(self.residual)
        # NaN never passes
        self.passed = bool(self.residual <= self.tol)


@dataclass(frozen=True)
class ExchangeParams:
    a: complex
    b: complex
    c: complex
    x: complex
    y: complex
    z_out: complex


def _exchange(a, b, c, sign: float, algebra: str) -> ExchangeParams:
    a, b, c = complex(a), complex(b), complex(c)
    eb = cmath.exp(b)
    f = cmath.exp(-b) + sign * a * c * eb
    if abs(f) <= SINGULAR_F:
        raise SingularExchangeError(f"{algebra} exchange: f = e^-b {'+' if sign > 0 else '-'} ac e^b vanishes")
    return ExchangeParams(a, b, c, c * eb / f, -cmath.log(f), a * eb / f)


def exchange_params_su11(a: complex, b: complex, c: complex) -> ExchangeParams:
    """x, y, z with f = e^{-b} - ac e^{b}: x = c e^b / f, y = -log f, z = a e^b / f."""
    return _exchange(a, b, c, -1.0, "su(1,1)")


def exchange_params_su2(a: complex, b: complex, c: complex) -> ExchangeParams:
    """As ``exchange_params_su11`` with f = e^{-b} + ac e^{b}."""
    return _exchange(a, b, c, 1.0, "su(2)")


def expm_ladder(m: np.ndarray) -> np.ndarray:
    """exp(M) for M with a single non-zero first super- or sub-diagonal.

    (M^k / k!) lives on the k-th band and its entries are products of k
    consecutive band values, so the series is summed exactly band by band.
    """
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    sup = np.diagonal(m, 1)
    sub = np.diagonal(m, -1)
    if sup.any() and sub.any():
        raise DomainError("expm_ladder needs a single off-diagonal band")
    rest = m - np.diag(sup, 1) - np.diag(sub, -1)
    if rest.any():
        raise DomainError("expm_ladder needs a matrix supported on one first off-diagonal")
    upper = not sub.any()
    ell = sup if upper else sub
    out = np.eye(d, dtype=complex)
    band = np.ones(d, dtype=complex)
    idx = np.arange(d)
    for k in range(1, d):
        band = band[:-1] * ell[k - 1 :] / k
        if not band.any():
            break
        if upper:
            out[idx[: d - k], idx[k:]] = band
        else:
            out[idx[k:], idx[: d - k]] = band
    return out


def _rel_maxdiff(ref: np.ndarray, other: np.ndarray) -> float:
    return float(np.max(np.abs(ref - other)) / max(1.0, np.max(np.abs(ref))))


def _block(dim: int) -> int:
    return max(dim // 8, 1)


# an entry is stable when its error bound is below this fraction of the tolerance
STABLE_FRACTION = 0.1
DIM_MAX = 1024
_EPS = float(np.finfo(float).eps)


def _ordered(
    ladder, order: str, alpha: complex, sigma: complex, beta: complex, size: int, truncated: bool, scalar: complex = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    """Top-left ``size`` block of scalar * e^{alpha X} e^{sigma D} e^{beta Y} and an error bound.

    order "LR" means X = lower, Y = raise; "RL" the reverse.  Because
    [D, raise] = raise and [D, lower] = -lower, the diagonal factor splits
    into e^{sigma D / 2} on either side and rescales the ladder exponents by
    e^{+-sigma/2}; the inner sum over intermediate states then has no
    exponentially large weights.  The bound is the rounding estimate of that
    sum plus, on a truncated space, the last 8 intermediate states as a tail
    proxy.
    """
    lower, raise_, diag = ladder
    h = cmath.exp(sigma / 2) if order == "LR" else cmath.exp(-sigma / 2)
    first, second = (lower, raise_) if order == "LR" else (raise_, lower)
    # rows far below the block may overflow; the block never reads them
    with np.errstate(over="ignore", invalid="ignore"):
        left = expm_ladder(alpha * h * first)[:size]
        right = expm_ladder(beta * h * second)[:, :size]
    outer = np.exp(0.5 * sigma * np.diagonal(diag)[:size])
    inner = scalar * (left @ right)
    bound = _EPS * abs(scalar) * (np.abs(left) @ np.abs(right))
    if truncated:
        bound = bound + abs(scalar) * (np.abs(left[:, -8:]) @ np.abs(right[-8:, :]))
    weight = np.abs(outer)
    return outer[:, None] * inner * outer[None, :], weight[:, None] * bound * weight[None, :]


def _stable_size(bound: np.ndarray, cap: int, limit: float, ref: Optional[np.ndarray] = None) -> int:
    """Largest s <= cap with bound[:s, :s] <= limit * max(1, max |ref[:s, :s]|)."""
    s = 0
    while s < cap:
        scale = 1.0 if ref is None else max(1.0, float(np.max(np.abs(ref[: s + 1, : s + 1]))))
        if not np.all(bound[: s + 1, : s + 1] <= limit * scale):
            break
        s += 1
    return s


def _exchange_sides(ladder, p: ExchangeParams, size: int, truncated: bool):
    lhs = _ordered(ladder, "LR", p.a, 2 * p.b, p.c, size, truncated)
    rhs = _ordered(ladder, "RL", p.x, 2 * p.y, p.z_out, size, truncated)
    return lhs, rhs


def exchange_residuals(
    spec: AlgebraSpec,
    a: complex,
    b: complex,
    c: complex,
    dim: int = DEFAULT_DIM,
    dim_max: int = DIM_MAX,
    tol: float = 1e-8,
) -> Tuple[float, float, int, int]:
    """(fundamental, representation, block, dim) relative max-norm residuals.

    su(2) is compared on the whole space, both sides summed exactly.  For
    su(1,1) the left-hand side
    is an infinite sum over intermediate states that converges only when
    |a c e^{2b}| < 1 (required), and slowly near 1, so the cutoff is
    doubled from ``dim`` up to ``dim_max`` until the stable block reaches
    dim // 8 states.  The right-hand side is normal ordered and exact on
    any top-left block, so it sets the scale.  Stability is judged
    against ``tol``.
    """
    if spec.kind is Algebra.SU11:
        p = exchange_params_su11(a, b, c)
        if abs(p.a * p.c * cmath.exp(2 * p.b)) >= 1:
            raise DomainError("su(1,1) exchange in the spin representation needs |a c e^{2b}| < 1")
    elif spec.kind is Algebra.SU2:
        p = exchange_params_su2(a, b, c)
    else:
        raise DomainError("exchange relations are defined for su(1,1) and su(2)")
    (lhs, _), (rhs, _) = _exchange_sides(fundamental_matrices(spec.kind), p, 2, False)
    fundamental = _rel_maxdiff(rhs, lhs)
    if spec.finite_dim is not None:
        n = spec.finite_dim
        lhs = _exact_ordered_su2(spec, "LR", p.a, cmath.exp(p.b), p.c)
        rhs = _exact_ordered_su2(spec, "RL", p.x, cmath.exp(p.y), p.z_out)
        return fundamental, _rel_maxdiff(rhs, lhs), n, n
    want = _block(dim)
    d = dim
    while True:
        (lhs, lb), (rhs, rb) = _exchange_sides(ladder_matrices(spec, d), p, want, True)
        s = _stable_size(np.maximum(lb, rb), want, STABLE_FRACTION * tol, rhs)
        if s == want or d >= dim_max:
            break
        d = min(2 * d, dim_max)
    if s == 0:
        return fundamental, math.inf, 0, d
    return fundamental, _rel_maxdiff(rhs[:s, :s], lhs[:s, :s]), s, d


def verify_exchange(
    spec: AlgebraSpec, a: complex, b: complex, c: complex, dim: int = DEFAULT_DIM, tol: float = 1e-8
) -> IdentityCheck:
    fundamental, rep, block, used = exchange_residuals(spec, a, b, c, dim, tol=tol)
    return IdentityCheck(
        f"exchange_{spec.kind.value}",
        {"spin": spec.spin, "a": complex(a), "b": complex(b), "c": complex(c)},
        max(fundamental, rep),
        tol,
        dim_used=used,
        details={"fundamental": fundamental, "representation": rep, "block": block},
    )


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cpow(a, k: int):
    if k < 0:
        norm = a[0] * a[0] + a[1] * a[1]
        a, k = (a[0] / norm, -a[1] / norm), -k
    out = (Fraction(1), Fraction(0))
    for _ in range(k):
        out = _cmul(out, a)
    return out


def _crat(z: complex):
    z = complex(z)
    return (Fraction(z.real), Fraction(z.imag))


def _exact_ordered_su2(spec: AlgebraSpec, order: str, alpha: complex, mu: complex, beta: complex) -> np.ndarray:
    """e^{alpha X} mu^{2 J_3} e^{beta Y} on the full su(2) space, summed exactly.

    order "LR" means X = J_-, Y = J_+; "RL" the reverse.

    With s_n = prod_{l <= n} sqrt(l (2J - l + 1)) the similarity diag(s)^-1
    turns J_- into the integer matrix l (2J - l + 1) and J_+ into ones, so
    for rational (double) inputs every entry is an exact complex rational,
    rounded once.  In floating point the alternating sums behind these
    products lose about cos|z|^-4J in relative accuracy near the eta pole;
    summed exactly they lose nothing.
    """
    two_j = spec.two_j
    dim = two_j + 1
    c2 = [0] + [n * (two_j - n + 1) for n in range(1, dim)]
    al, be, m = _crat(alpha), _crat(beta), _crat(mu)
    zero = (Fraction(0), Fraction(0))

    def lower_exp(coef, i, k):  # <i| e^{coef L~} |k>, k >= i
        w = Fraction(math.prod(c2[i + 1 : k + 1]), math.factorial(k - i))
        v = _cpow(coef, k - i)
        return (v[0] * w, v[1] * w)

    def raise_exp(coef, k, j):  # <k| e^{coef R~} |j>, k >= j
        w = Fraction(1, math.factorial(k - j))
        v = _cpow(coef, k - j)
        return (v[0] * w, v[1] * w)

    weights = [_cpow(m, 2 * k - two_j) for k in range(dim)]
    out = np.empty((dim, dim), dtype=complex)
    log_s = [0.0]
    for n in range(1, dim):
        log_s.append(log_s[-1] + 0.5 * math.log(c2[n]))
    for i in range(dim):
        for j in range(dim):
            acc = zero
            ks = range(max(i, j), dim) if order == "LR" else range(0, min(i, j) + 1)
            for k in ks:
                if order == "LR":
                    a, b = lower_exp(al, i, k), raise_exp(be, k, j)
                else:
                    a, b = raise_exp(al, i, k), lower_exp(be, k, j)
                t = _cmul(_cmul(a, weights[k]), b)
                acc = (acc[0] + t[0], acc[1] + t[1])
            out[i, j] = complex(float(acc[0]), float(acc[1])) * math.exp(log_s[i] - log_s[j])
    return out


def _disentangled(spec: AlgebraSpec, z: complex, dim: int, size: int):
    """Normal- and anti-normal-ordered products equal to exp(z X_+ - z* X_-)
    on a truncated space, each as (top-left block, error bound)."""
    ladder = ladder_matrices(spec, dim)
    r = abs(z)
    if spec.kind is Algebra.HW:
        x = r * r
        normal = _ordered(ladder, "RL", z, 0.0, -z.conjugate(), size, True, math.exp(-x / 2))
        anti = _ordered(ladder, "LR", -z.conjugate(), 0.0, z, size, True, math.exp(x / 2))
        return normal, anti
    if math.sinh(r) >= 1:
        raise DomainError("the anti-normal su(1,1) product only converges for sinh|z| < 1")
    zeta = frame(spec, z).zeta_or_eta
    s = -2.0 * math.log(math.cosh(r))  # log(1 - |zeta|^2)
    normal = _ordered(ladder, "RL", zeta, s, -zeta.conjugate(), size, True)
    anti = _ordered(ladder, "LR", -zeta.conjugate(), -s, zeta, size, True)
    return normal, anti


def verify_disentangling(
    spec: AlgebraSpec,
    z: complex,
    dim: int = DEFAULT_DIM,
    cfg: Optional[OracleConfig] = None,
    tol: float = 1e-8,
    dim_max: int = DIM_MAX,
) -> IdentityCheck:
    """Direct exponential vs both ordered products (and the two against each other).

    su(2) is compared on the whole exact matrix, with the ordered products
    summed exactly.
    Truncated representations use the stable block, growing the cutoff up
    to ``dim_max`` until it holds dim // 8 states.
    """
    z = complex(z)
    cfg = cfg or OracleConfig(tol=1e-12)
    if spec.finite_dim is not None:
        size = used = spec.finite_dim
        eta = frame(spec, z, strict=True).zeta_or_eta
        mu = 1.0 / math.cos(abs(z))  # e^{s/2}; negative past the pole
        normal = _exact_ordered_su2(spec, "RL", eta, mu, -eta.conjugate())
        anti = _exact_ordered_su2(spec, "LR", -eta.conjugate(), 1.0 / mu, eta)
        direct = operator_matrix(spec, None, z)
    else:
        want = _block(dim)
        d = dim
        while True:
            (normal, nb), (anti, ab) = _disentangled(spec, z, d, want)
            size = _stable_size(np.maximum(nb, ab), want, STABLE_FRACTION * tol)
            if size == want or d >= dim_max:
                break
            d = min(2 * d, dim_max)
        params = {"spin": spec.spin, "z": z, "dim": d}
        if size == 0:
            parts = {"normal": math.inf, "anti_normal": math.inf, "normal_vs_anti": math.inf}
            return IdentityCheck(
                f"disentangling_{spec.kind.value}", params, math.inf, tol, dim_used=d, details={**parts, "block": 0}
            )
        ob = oracle_block(spec, z, size=size, cfg=cfg)
        direct, used = ob.values, max(d, ob.dim_used)
        normal, anti = normal[:size, :size], anti[:size, :size]
    parts = {
        "normal": float(np.max(np.abs(direct - normal))),
        "anti_normal": float(np.max(np.abs(direct - anti))),
        "normal_vs_anti": float(np.max(np.abs(normal - anti))),
    }
    return IdentityCheck(
        f"disentangling_{spec.kind.value}",
        {"spin": spec.spin, "z": z, "dim": used},
        max(parts.values()),
        tol,
        dim_used=used,
        details={**parts, "block": size},
    )


def bch_check(z: complex, dim: int = DEFAULT_DIM, cfg: Optional[OracleConfig] = None, tol: float = 1e-9) -> IdentityCheck:
    """e^{A+B} = e^{-[A,B]/2} e^A e^B with A = z a^dagger, B = -z* a.

    [A, B] is read off the truncated matrices away from the cutoff row, where
    it must be a multiple of the identity that commutes with A and B.
    """
    z = complex(z)
    cfg = cfg or OracleConfig(tol=1e-12)
    lower, raise_, _ = ladder_matrices(AlgebraSpec.hw(), dim)
    A = z * raise_
    B = -z.conjugate() * lower
    comm = (A @ B - B @ A)[: dim - 1, : dim - 1]
    scalar = complex(np.mean(np.diagonal(comm)))
    not_central = float(np.max(np.abs(comm - scalar * np.eye(dim - 1))))
    size = _block(dim)
    ob = oracle_block(AlgebraSpec.hw(), z, size=size, cfg=cfg)
    product = cmath.exp(-scalar / 2) * (expm_ladder(A) @ expm_ladder(B))
    residual = float(np.max(np.abs(ob.values - product[:size, :size])))
    return IdentityCheck(
        "bch_hw",
        {"z": z, "dim": dim},
        max(residual, not_central),
        tol,
        dim_used=ob.dim_used,
        details={"commutator": scalar, "commutator_not_scalar": not_central, "product": residual},
    )


def group_law_check(
    z: complex, w: complex, n: int, m: int, kmax: Optional[int] = None, tol: float = 1e-10
) -> IdentityCheck:
    """<n|U(z+w)|m> against e^{-(z w* - z* w)/2} sum_k <n|U(z)|k><k|U(w)|m>."""
    z, w = complex(z), complex(w)
    if kmax is None:
        kmax = n + m + 60
    if kmax < n + m + 40:
        raise DomainError(f"kmax must be at least n + m + 40 = {n + m + 40}, got {kmax}")
    lhs = u_element(n, m, z + w)
    phase = cmath.exp(-(z * w.conjugate() - z.conjugate() * w) / 2)
    terms = [u_element(n, k, z) * u_element(k, m, w) for k in range(kmax + 1)]
    rhs = phase * complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    return IdentityCheck(
        "group_law",
        {"z": z, "w": w, "n": n, "m": m, "kmax": kmax},
        abs(lhs - rhs),
        tol,
    )


def group_law_oracle_check(z: complex, w: complex, dim: int = DEFAULT_DIM, tol: float = 1e-8) -> IdentityCheck:
    """Group law on oracle matrices: converged U(z+w) vs phase * U_D(z) U_D(w)."""
    z, w = complex(z), complex(w)
    size = _block(dim)
    hw = AlgebraSpec.hw()
    direct = oracle_block(hw, z + w, size=size)
    phase = cmath.exp(-(z * w.conjugate() - z.conjugate() * w) / 2)
    product = phase * (operator_matrix(hw, dim, z) @ operator_matrix(hw, dim, w))
    return IdentityCheck(
        "group_law_oracle",
        {"z": z, "w": w, "dim": dim},
        float(np.max(np.abs(direct.values - product[:size, :size]))),
        tol,
        dim_used=max(dim, direct.dim_used),
    )


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def factorization_rhs(
    m: int, N: int, z: complex, w: complex, kmax: Optional[int] = None, general: Optional[bool] = None
) -> Tuple[complex, int, float]:
    """Right-hand side of the Laguerre factorization formula for L_m^(N)(|z+w|^2).

    Returns (value, last k included, |last tail term|).  With ``kmax=None``
    the infinite k-sum runs until three consecutive terms are below 1e-14;
    with an explicit ``kmax`` a last term above 1e-14 raises.

    ``general`` picks the N >= 1 form; it defaults to N >= 1 but may be
    forced at N = 0 to check that the general form specializes correctly.
    """
    if m < 0 or N < 0:
        raise DomainError("m and N must be non-negative")
    if general is None:
        general = N >= 1
    z, w = complex(z), complex(w)
    if general and z + w == 0:
        raise DomainError("the N >= 1 formula needs z + w != 0")
    az, aw = abs(z) ** 2, abs(w) ** 2
    zwbar = -z * w.conjugate()
    zbarw = -z.conjugate() * w
    fact = math.factorial

    if not general:
        if N:
            raise DomainError("the N = 0 formula needs N = 0")
        head = _csum(
            fact(k) / fact(m) * zwbar ** (m - k) * laguerre_assoc(k, m - k, az) * laguerre_assoc(k, m - k, aw)
            for k in range(m + 1)
        )
        start, tail_scale = m + 1, 1.0

        def tail(k):
            return fact(m) / fact(k) * zbarw ** (k - m) * laguerre_assoc(m, k - m, az) * laguerre_assoc(m, k - m, aw)

    else:
        s = z + w
        head = (z / s) ** N * _csum(
            fact(k) / fact(m) * zwbar ** (m - k) * laguerre_assoc(k, m + N - k, az) * laguerre_assoc(k, m - k, aw)
            for k in range(m + 1)
        )
        head += (1 / s) ** N * _csum(
            z ** (m + N - k) * w ** (k - m) * laguerre_assoc(k, m + N - k, az) * laguerre_assoc(m, k - m, aw)
            for k in range(m + 1, m + N + 1)
        )
        start, tail_scale = m + N + 1, (w / s) ** N

        def tail(k):
            return (
                fact(m + N) / fact(k) * zbarw ** (k - m - N)
                * laguerre_assoc(m + N, k - m - N, az) * laguerre_assoc(m, k - m, aw)
            )

    prefactor = cmath.exp(z.conjugate() * w)
    scale = abs(prefactor * tail_scale)
    terms = []
    k = start
    if kmax is not None:
        for k in range(start, kmax + 1):
            terms.append(tail(k))
        last = abs(terms[-1]) * scale if terms else 0.0
        if last >= TAIL_TERM:
            raise TailNotConvergedError(f"tail term at k={kmax} is {last:.3g} >= {TAIL_TERM:g}")
        k_last = kmax
    else:
        small = 0
        while small < 3:
            if k > start + 2000:
                raise TailNotConvergedError("factorization tail did not fall below 1e-14 within 2000 terms")
            t = tail(k)
            terms.append(t)
            small = small + 1 if abs(t) * scale < TAIL_TERM else 0
            k += 1
        k_last = k - 1
        last = abs(terms[-1]) * scale
    value = prefactor * (head + tail_scale * _csum(terms))
    return value, k_last, last


def factorization_check(
    m: int,
    N: int,
    z: complex,
    w: complex,
    kmax: Optional[int] = None,
    tol: float = 1e-8,
    general: Optional[bool] = None,
) -> IdentityCheck:
    """|L_m^(N)(|z+w|^2) - RHS| / max(1, |LHS|)."""
    z, w = complex(z), complex(w)
    if general is None:
        general = N >= 1
    lhs = laguerre_assoc(m, N, abs(z + w) ** 2)
    rhs, k_last, last = factorization_rhs(m, N, z, w, kmax, general)
    return IdentityCheck(
        "factorization_N" if general else "factorization_N0",
        {"m": m, "N": N, "z": z, "w": w},
        abs(lhs - rhs) / max(1.0, abs(lhs)),
        tol,
        details={"kmax": k_last, "last_term": last, "lhs": lhs, "rhs": rhs},
    )
