"""Ground truth by brute force: exponentiate the truncated generator.

For su(2) the representation is finite, so the exponential at D = 2J+1 is
exact.  For the Heisenberg-Weyl and su(1,1) ladders the cutoff D is grown
geometrically until the requested block stops changing.  Note that this
exponentiates the truncated generator, which is not the same matrix as a
truncation of the true exponential; the cutoff sequence is what bridges
the two, and ``est_error`` is the size of the last step.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .closed_form import ElementQuery
from .errors import DomainError, NoConvergence
from .representations import AlgebraSpec, generator

__all__ = [
    "OracleBlock",
    "OracleConfig",
    "OracleResult",
    "expm_antihermitian",
    "operator_matrix",
    "oracle_block",
    "oracle_element",
]

log = logging.getLogger(__name__)

DIM_MAX_ENV = "ORACLE_DIM_MAX"
DEFAULT_DIM_MAX = 2048


def default_dim_max() -> int:
    raw = os.environ.get(DIM_MAX_ENV)
    if not raw:
        return DEFAULT_DIM_MAX
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{DIM_MAX_ENV} must be an integer, got {raw!r}") from None
    if value < 2:
        raise DomainError(f"{DIM_MAX_ENV} must be >= 2, got {value}")
    return value


@dataclass(frozen=True)
class OracleConfig:
    tol: float = 1e-10
    dim0: Optional[int] = None  # None: n + m + 32 (or 2*size + 32 for blocks)
    dim_max: int = field(default_factory=default_dim_max)
    growth: int = 2

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if self.growth < 2 or int(self.growth) != self.growth:
            raise DomainError(f"growth must be an integer >= 2, got {self.growth!r}")
        if self.dim0 is not None and self.dim0 > self.dim_max:
            raise DomainError(f"dim0={self.dim0} exceeds dim_max={self.dim_max}")


@dataclass(frozen=True)
class OracleResult:
    value: complex
    dim_used: int
    est_error: float
    history: Tuple[float, ...] = ()


@dataclass(frozen=True)
class OracleBlock:
    """Top-left ``size`` x ``size`` block of exp(generator)."""

    values: np.ndarray
    dim_used: int
    est_error: float
    history: Tuple[float, ...] = ()


def expm_antihermitian(g: np.ndarray) -> np.ndarray:
    """exp(G) for anti-Hermitian G via the Hermitian eigenproblem of -iG.

    With -iG = V diag(lam) V^dagger, exp(G) = V diag(exp(i lam)) V^dagger,
    which is unitary up to the orthogonality of V.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {g.shape}")
    skew = np.max(np.abs(g + g.conj().T)) if g.size else 0.0
    if skew > 1e-13:
        raise DomainError(f"matrix is not anti-Hermitian (max |G + G^dagger| = {skew:.3g})")
    h = -1j * g
    h = 0.5 * (h + h.conj().T)
    lam, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * lam)) @ vecs.conj().T


def operator_matrix(spec: AlgebraSpec, dim: Optional[int], z: complex, t: float = 0.0) -> np.ndarray:
    """exp(z X_+ - conj(z) X_- + 2it X_3) on a cutoff (or the full su(2)) space."""
    if dim is None:
        dim = spec.finite_dim
    return expm_antihermitian(generator(spec, int(dim), complex(z), float(t)))


def _converge(spec: AlgebraSpec, z: complex, t: float, rows: slice, cols: slice, dim0: int, cfg: OracleConfig):
    if spec.finite_dim is not None:
        full = operator_matrix(spec, None, z, t)
        return full[rows, cols].copy(), spec.finite_dim, 0.0, ()
    dim = max(dim0, 2)
    if dim > cfg.dim_max:
        raise NoConvergence(f"starting cutoff {dim} already exceeds dim_max={cfg.dim_max}")
    prev = None
    history = []
    while True:
        block = operator_matrix(spec, dim, z, t)[rows, cols]
        if prev is not None:
            est = float(np.max(np.abs(block - prev)))
            history.append(est)
            if len(history) > 1 and est > history[-2]:
                log.warning(
                    "oracle cutoff step grew at D=%d for %s z=%s t=%s: %.3g > %.3g",
                    dim, spec.label(), z, t, est, history[-2],
                )
            if est <= cfg.tol:
                return block.copy(), dim, est, tuple(history)
            if dim >= cfg.dim_max:
                raise NoConvergence(
                    f"{spec.label()} z={z} t={t}: est_error {est:.3g} > tol {cfg.tol:g} at dim_max={cfg.dim_max}",
                    value=block.copy(),
                    dim_used=dim,
                    est_error=est,
                )
        prev = block
        dim = min(dim * cfg.growth, cfg.dim_max)


def oracle_element(q: ElementQuery, cfg: Optional[OracleConfig] = None) -> OracleResult:
    """<n| exp(generator) |m> with an adaptive cutoff; the only evaluator for t != 0."""
    cfg = cfg or OracleConfig()
    dim0 = cfg.dim0 if cfg.dim0 is not None else q.n + q.m + 32
    if q.algebra.finite_dim is None and dim0 < q.n + q.m + 2:
        raise DomainError(f"dim0={dim0} must be at least n + m + 2 = {q.n + q.m + 2}")
    vals, dim, est, history = _converge(
        q.algebra, q.z, q.t, slice(q.n, q.n + 1), slice(q.m, q.m + 1), dim0, cfg
    )
    return OracleResult(complex(vals[0, 0]), dim, est, history)


def oracle_block(
    spec: AlgebraSpec, z: complex, t: float = 0.0, size: Optional[int] = None, cfg: Optional[OracleConfig] = None
) -> OracleBlock:
    """Converged top-left block; for su(2) the whole exact matrix by default."""
    cfg = cfg or OracleConfig()
    if size is None:
        if spec.finite_dim is None:
            raise DomainError(f"{spec.label()} is infinite dimensional; pass a block size")
        size = spec.finite_dim
    if spec.finite_dim is not None and size > spec.finite_dim:
        raise DomainError(f"block size {size} exceeds dimension {spec.finite_dim}")
    dim0 = cfg.dim0 if cfg.dim0 is not None else 2 * (size - 1) + 32
    return _cached_block(spec, complex(z), float(t), int(size), int(dim0), cfg)


@lru_cache(maxsize=1024)
def _cached_block(spec: AlgebraSpec, z: complex, t: float, size: int, dim0: int, cfg: OracleConfig) -> OracleBlock:
    vals, dim, est, history = _converge(spec, z, t, slice(0, size), slice(0, size), dim0, cfg)
    vals.flags.writeable = False
    return OracleBlock(vals, dim, est, history)
