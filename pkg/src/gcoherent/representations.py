"""Matrix realizations of the three ladder-operator triples.

Matrices act on column vectors indexed by the Fock label n, so
``raise_[n + 1, n]`` is the coefficient of |n+1> in raise|n>.  Returned
arrays are read-only; copy before mutating.

Heisenberg-Weyl (a, a^dagger, N):
    a|n> = sqrt(n)|n-1>,  N|n> = n|n>
su(1,1), spin K > 0 (K_-, K_+, K_3), infinite dimensional:
    K_-|K,n> = sqrt(n(2K+n-1))|K,n-1>,  K_3|K,n> = (K+n)|K,n>
su(2), spin J with 2J a positive integer (J_-, J_+, J_3), dimension 2J+1:
    J_-|J,n> = sqrt(n(2J-n+1))|J,n-1>,  J_3|J,n> = (-J+n)|J,n>
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "Algebra",
    "AlgebraSpec",
    "Ladder",
    "fundamental_matrices",
    "generator",
    "ladder_matrices",
    "squeezed_generators",
]


class Algebra(str, enum.Enum):
    HW = "hw"
    SU11 = "su11"
    SU2 = "su2"


@dataclass(frozen=True)
class AlgebraSpec:
    """Operator family plus its spin (K for su(1,1), J for su(2))."""

    kind: Algebra
    spin: Optional[float] = None

    def __post_init__(self):
        kind = Algebra(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Algebra.HW:
            if self.spin is not None:
                raise DomainError("the Heisenberg-Weyl algebra takes no spin")
            return
        if self.spin is None:
            raise DomainError(f"{kind.value} needs a spin")
        spin = float(self.spin)
        if not (math.isfinite(spin) and spin > 0):
            raise DomainError(f"spin must be a positive finite number, got {self.spin!r}")
        if kind is Algebra.SU2 and 2 * spin != round(2 * spin):
            raise DomainError(f"su(2) spin must be a half-integer, got {spin!r}")
        object.__setattr__(self, "spin", spin)

    @classmethod
    def hw(cls) -> "AlgebraSpec":
        return cls(Algebra.HW)

    @classmethod
    def su11(cls, K: float) -> "AlgebraSpec":
        return cls(Algebra.SU11, K)

    @classmethod
    def su2(cls, J: float) -> "AlgebraSpec":
        return cls(Algebra.SU2, J)

    @property
    def two_j(self) -> int:
        """2J for su(2); the representation has 2J + 1 states."""
        if self.kind is not Algebra.SU2:
            raise DomainError("two_j is only defined for su(2)")
        return int(round(2 * self.spin))

    @property
    def finite_dim(self) -> Optional[int]:
        return self.two_j + 1 if self.kind is Algebra.SU2 else None

    def check_index(self, n: int) -> None:
        if int(n) != n or n < 0:
            raise DomainError(f"state index must be a non-negative integer, got {n!r}")
        if self.kind is Algebra.SU2 and n > self.two_j:
            raise DomainError(f"su(2) spin {self.spin} has states 0..{self.two_j}, got {n}")

    def label(self) -> str:
        if self.kind is Algebra.HW:
            return "hw"
        return f"{self.kind.value}(spin={self.spin:g})"


class Ladder(NamedTuple):
    lower: np.ndarray
    raise_: np.ndarray
    diag: np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _lowering_coefficients(spec: AlgebraSpec, dim: int) -> np.ndarray:
    """Entries lower[n-1, n] for n = 1..dim-1."""
    n = np.arange(1, dim, dtype=float)
    if spec.kind is Algebra.HW:
        return np.sqrt(n)
    if spec.kind is Algebra.SU11:
        return np.sqrt(n * (2 * spec.spin + n - 1))
    return np.sqrt(n * (2 * spec.spin - n + 1))


def _diagonal(spec: AlgebraSpec, dim: int) -> np.ndarray:
    n = np.arange(dim, dtype=float)
    if spec.kind is Algebra.HW:
        return n
    if spec.kind is Algebra.SU11:
        return spec.spin + n
    return n - spec.spin


def _check_dim(spec: AlgebraSpec, dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise DomainError(f"dim must be an integer >= 2, got {dim!r}")
    if spec.kind is Algebra.SU2 and dim != spec.finite_dim:
        raise DomainError(f"su(2) spin {spec.spin} is {spec.finite_dim}-dimensional, got dim={dim}")
    return int(dim)


def ladder_matrices(spec: AlgebraSpec, dim: Optional[int] = None) -> Ladder:
    """(lower, raise, diag) on the first ``dim`` basis states.

    ``dim`` defaults to 2J+1 for su(2) and is required otherwise.  Note that
    su(2) with J = 1/2 is 2-dimensional, so dim >= 2 always holds there.
    """
    if dim is None:
        if spec.finite_dim is None:
            raise DomainError(f"{spec.label()} is infinite dimensional; pass a cutoff dim")
        dim = spec.finite_dim
    dim = _check_dim(spec, dim)
    lower = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(1, dim)
    lower[idx - 1, idx] = _lowering_coefficients(spec, dim)
    raise_ = lower.conj().T.copy()
    diag = np.diag(_diagonal(spec, dim)).astype(complex)
    return Ladder(_frozen(lower), _frozen(raise_), _frozen(diag))


def generator(spec: AlgebraSpec, dim: Optional[int], z: complex, t: float = 0.0) -> np.ndarray:
    """z*raise - conj(z)*lower + 2i*t*diag, anti-Hermitian by construction.

    t = 0 gives the exponent of U(z), V(z), W(z); t != 0 the extended
    operators V(z,t), W(z,t).
    """
    lower, raise_, diag = ladder_matrices(spec, dim)
    z = complex(z)
    g = z * raise_ - z.conjugate() * lower
    if t:
        g = g + (2j * float(t)) * diag
    return _frozen(g)


def fundamental_matrices(kind: Algebra) -> Ladder:
    """2x2 Weyl basis of su(1,1) or su(2) inside sl(2, C).

    su(1,1): k_+ = [[0,1],[0,0]], k_- = [[0,0],[-1,0]], k_3 = diag(1/2,-1/2)
    su(2):   j_+ = [[0,1],[0,0]], j_- = [[0,0],[1,0]],  j_3 = diag(1/2,-1/2)
    """
    kind = Algebra(kind)
    if kind is Algebra.HW:
        raise DomainError("the Heisenberg-Weyl algebra has no 2x2 fundamental representation")
    sign = -1.0 if kind is Algebra.SU11 else 1.0
    lower = np.array([[0, 0], [sign, 0]], dtype=complex)
    raise_ = np.array([[0, 1], [0, 0]], dtype=complex)
    diag = np.diag([0.5, -0.5]).astype(complex)
    return Ladder(_frozen(lower), _frozen(raise_), _frozen(diag))


def squeezed_generators(dim: int) -> Ladder:
    """K_- = a^2/2, K_+ = (a^dagger)^2/2, K_3 = (N + 1/2)/2 on a truncated
    oscillator space.  Restricted to even (odd) Fock states this is the
    su(1,1) representation with K = 1/4 (K = 3/4).
    """
    a, adag, number = ladder_matrices(AlgebraSpec.hw(), dim)
    lower = 0.5 * (a @ a)
    raise_ = 0.5 * (adag @ adag)
    diag = 0.5 * (number + 0.5 * np.eye(dim))
    return Ladder(_frozen(lower), _frozen(raise_), _frozen(diag))
