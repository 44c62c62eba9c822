"""Verification suites, one per acceptance criterion.

Each suite is a function ``(options) -> list[IdentityCheck]``.  Random
parameter points come from ``numpy.random.default_rng((seed, index))`` with
a fixed per-suite index, so a subset run draws exactly the points the full
run would.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import closed_form as cf
from .identities import (
    IdentityCheck,
    bch_check,
    exchange_params_su11,
    exchange_params_su2,
    exchange_residuals,
    factorization_check,
    group_law_check,
    group_law_oracle_check,
    verify_disentangling,
)
from .oracle import OracleConfig, operator_matrix, oracle_block
from .representations import Algebra, AlgebraSpec

__all__ = ["SUITES", "SuiteOptions", "VerificationReport", "run_suites"]

RADII = (0.25, 0.5, 1.0, 2.0)
PHASES = (1, 1j, (1 + 1j) / math.sqrt(2))
SU11_SPINS = (0.25, 0.75, 1.0, 2.5)
SU2_ELEMENT_SPINS = (0.5, 1.0, 1.5, 3.0, 5.0)
SU2_EXCHANGE_SPINS = (0.5, 1.0, 1.5, 5.0)


@dataclass(frozen=True)
class SuiteOptions:
    seed: int = 0
    m_max: Optional[int] = None  # caps the index ranges that have a built-in default
    oracle: OracleConfig = field(default_factory=OracleConfig)


@dataclass
class VerificationReport:
    suite: str
    checks: List[IdentityCheck]
    wall_clock: Optional[float] = None

    @property
    def total(self) -> int:
        return len(self.checks)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    @property
    def worst(self) -> Optional[IdentityCheck]:
        """The check closest to (or furthest past) its tolerance."""
        if not self.checks:
            return None

        def ratio(c: IdentityCheck) -> float:
            return math.inf if math.isnan(c.residual) else c.residual / c.tol

        return max(self.checks, key=ratio)

    @property
    def oracle_dims(self) -> List[int]:
        return sorted({c.dim_used for c in self.checks if c.dim_used is not None})


def _cap(default: int, opts: SuiteOptions) -> int:
    return default if opts.m_max is None else min(default, opts.m_max)


def _z_grid(max_radius: float = math.inf) -> List[complex]:
    return [r * complex(p) for r in RADII if r <= max_radius for p in PHASES]


def _rng(opts: SuiteOptions, index: int) -> np.random.Generator:
    return np.random.default_rng((opts.seed, index))


def _disk(rng: np.random.Generator, radius: float) -> complex:
    """Uniform point in the closed disk |z| <= radius."""
    r = radius * math.sqrt(rng.random())
    phi = 2 * math.pi * rng.random()
    return complex(r * math.cos(phi), r * math.sin(phi))


def _closed_block(spec: AlgebraSpec, z: complex, size: int) -> np.ndarray:
    return np.array([[cf.element(cf.ElementQuery(spec, n, m, z)) for m in range(size)] for n in range(size)])


def _element_suite(spec: AlgebraSpec, zs: Iterable[complex], size: int, tol: float, opts: SuiteOptions):
    out = []
    for z in zs:
        ob = oracle_block(spec, z, size=size, cfg=opts.oracle)
        closed = _closed_block(spec, z, size)
        diff = np.abs(closed - ob.values)
        n, m = np.unravel_index(int(np.argmax(diff)), diff.shape)
        out.append(
            IdentityCheck(
                f"closed_vs_oracle_{spec.kind.value}",
                {"spin": spec.spin, "z": z, "n_max": size - 1},
                float(diff[n, m]),
                tol,
                dim_used=ob.dim_used,
                details={"worst_n": int(n), "worst_m": int(m), "oracle_est_error": ob.est_error},
            )
        )
    return out


def suite_hw_elements(opts: SuiteOptions) -> List[IdentityCheck]:
    return _element_suite(AlgebraSpec.hw(), _z_grid(), _cap(20, opts) + 1, 1e-9, opts)


def suite_su11_elements(opts: SuiteOptions) -> List[IdentityCheck]:
    out = []
    for K in SU11_SPINS:
        out += _element_suite(AlgebraSpec.su11(K), _z_grid(1.5), _cap(15, opts) + 1, 1e-8, opts)
    return out


def _su2_grid() -> List[complex]:
    axis = np.linspace(-1.2, 1.2, 5)
    return [complex(x, y) for x in axis for y in axis]


def suite_su2_elements(opts: SuiteOptions) -> List[IdentityCheck]:
    out = []
    for J in SU2_ELEMENT_SPINS:
        spec = AlgebraSpec.su2(J)
        out += _element_suite(spec, _su2_grid(), min(spec.finite_dim, _cap(spec.finite_dim - 1, opts) + 1), 1e-10, opts)
    return out


def _element_grids(opts: SuiteOptions):
    yield AlgebraSpec.hw(), _z_grid(), _cap(20, opts)
    for K in SU11_SPINS:
        yield AlgebraSpec.su11(K), _z_grid(1.5), _cap(15, opts)
    for J in SU2_ELEMENT_SPINS:
        spec = AlgebraSpec.su2(J)
        yield spec, _su2_grid(), _cap(spec.two_j, opts)


def suite_symmetry(opts: SuiteOptions) -> List[IdentityCheck]:
    """element(n, m, z) = conj(element(m, n, -z)) over every element grid."""
    out = []
    for spec, zs, top in _element_grids(opts):
        for z in zs:
            worst = 0.0
            for n in range(top + 1):
                for m in range(top + 1):
                    a = cf.element(cf.ElementQuery(spec, n, m, z))
                    b = cf.element(cf.ElementQuery(spec, m, n, -z)).conjugate()
                    worst = max(worst, abs(a - b))
            out.append(IdentityCheck(f"conjugation_{spec.kind.value}", {"spin": spec.spin, "z": z, "n_max": top}, worst, 1e-12))
    return out


def _column_norm(spec: AlgebraSpec, m: int, z: complex, top: int) -> float:
    return math.fsum(abs(cf.element(cf.ElementQuery(spec, n, m, z))) ** 2 for n in range(top + 1))


def suite_unitarity(opts: SuiteOptions) -> List[IdentityCheck]:
    """Column norms from the closed forms; HW and su(1,1) cut at n = m + 60."""
    out = []
    for spec, zs, top in _element_grids(opts):
        zs = [z for z in zs if abs(z) <= 1.5]
        finite = spec.finite_dim is not None
        for z in zs:
            for m in range(top + 1):
                cutoff = spec.two_j if finite else m + 60
                norm = _column_norm(spec, m, z, cutoff)
                out.append(
                    IdentityCheck(
                        f"unitarity_{spec.kind.value}",
                        {"spin": spec.spin, "z": z, "m": m, "cutoff": cutoff},
                        abs(norm - 1.0),
                        1e-12 if finite else 1e-10,
                    )
                )
    return out


def suite_factorization(opts: SuiteOptions) -> List[IdentityCheck]:
    rng = _rng(opts, 6)
    points = []
    while len(points) < 20:
        z, w = _disk(rng, 1.0), _disk(rng, 1.0)
        if abs(z + w) >= 0.2:
            points.append((z, w))
    out = []
    top = _cap(8, opts)
    for z, w in points:
        for m in range(top + 1):
            out.append(factorization_check(m, 0, z, w))
            # the general form must specialize to the N = 0 one
            out.append(factorization_check(m, 0, z, w, general=True))
            for N in range(1, 5):
                out.append(factorization_check(m, N, z, w))
    return out


def suite_group_law(opts: SuiteOptions) -> List[IdentityCheck]:
    rng = _rng(opts, 7)
    pairs = [(_disk(rng, 1.5), _disk(rng, 1.5)) for _ in range(10)]
    top = _cap(6, opts)
    out = [group_law_check(z, w, n, m, kmax=n + m + 60) for z, w in pairs for n in range(top + 1) for m in range(top + 1)]
    out += [group_law_oracle_check(z, w) for z, w in pairs[:3]]
    return out


# su(1,1) points also need |a c e^{2b}| <= 0.5 for the spin-representation sum
SU11_EXCHANGE_RHO = 0.5


def _exchange_points(rng: np.random.Generator, kind: Algebra, count: int):
    params = exchange_params_su11 if kind is Algebra.SU11 else exchange_params_su2
    sign = -1.0 if kind is Algebra.SU11 else 1.0
    points = []
    while len(points) < count:
        a, b, c = (_disk(rng, 0.8) for _ in range(3))
        f = np.exp(-b) + sign * a * c * np.exp(b)
        if abs(f) <= 0.1 or abs(np.angle(f)) >= 3:
            continue
        if kind is Algebra.SU11 and abs(a * c * np.exp(2 * b)) > SU11_EXCHANGE_RHO:
            continue
        params(a, b, c)
        points.append((a, b, c))
    return points


def suite_exchange(opts: SuiteOptions) -> List[IdentityCheck]:
    out = []
    for kind, spins, rep_tol, index in (
        (Algebra.SU11, SU11_SPINS, 1e-8, 81),
        (Algebra.SU2, SU2_EXCHANGE_SPINS, 1e-10, 82),
    ):
        points = _exchange_points(_rng(opts, index), kind, 50)
        for spin in spins:
            spec = AlgebraSpec(kind, spin)
            for a, b, c in points:
                fundamental, rep, block, used = exchange_residuals(spec, a, b, c, tol=rep_tol)
                params = {"spin": spin, "a": a, "b": b, "c": c}
                out.append(IdentityCheck(f"exchange_{kind.value}_fundamental", params, fundamental, 1e-12))
                out.append(
                    IdentityCheck(
                        f"exchange_{kind.value}_representation", params, rep, rep_tol, dim_used=used, details={"block": block}
                    )
                )
    return out


def _su2_disentangling_points(rng: np.random.Generator, count: int) -> List[complex]:
    points = []
    while len(points) < count:
        r = math.pi * rng.random()
        if abs(math.cos(r)) < 0.1:
            continue
        phi = 2 * math.pi * rng.random()
        points.append(complex(r * math.cos(phi), r * math.sin(phi)))
    return points


def suite_disentangling(opts: SuiteOptions) -> List[IdentityCheck]:
    rng = _rng(opts, 9)
    cfg = OracleConfig(tol=1e-12, dim_max=opts.oracle.dim_max)
    out = []
    hw_points = [_disk(rng, 2.0) for _ in range(10)]
    for z in hw_points:
        out.append(verify_disentangling(AlgebraSpec.hw(), z, cfg=cfg))
        out.append(bch_check(z, cfg=cfg))
    # the anti-normal su(1,1) sum needs sinh|z| < 1
    for i in range(10):
        z = _disk(rng, 0.85)
        out.append(verify_disentangling(AlgebraSpec.su11(SU11_SPINS[i % 4]), z, cfg=cfg))
    for i, z in enumerate(_su2_disentangling_points(rng, 10)):
        out.append(verify_disentangling(AlgebraSpec.su2(SU2_EXCHANGE_SPINS[i % 4]), z))
    return out


def suite_extended(opts: SuiteOptions) -> List[IdentityCheck]:
    """Oracle-only V(z, t) and W(z, t): unitarity, and the t = 0 reduction."""
    rng = _rng(opts, 10)
    out = []
    for kind, spins in ((Algebra.SU11, SU11_SPINS), (Algebra.SU2, SU2_EXCHANGE_SPINS)):
        for i in range(10):
            spec = AlgebraSpec(kind, spins[i % len(spins)])
            z = _disk(rng, 1.0)
            t = float(rng.uniform(-2.0, 2.0))
            size = spec.finite_dim or 8
            ob = oracle_block(spec, z, t=t, size=size, cfg=opts.oracle)
            full = operator_matrix(spec, ob.dim_used if spec.finite_dim is None else None, z, t)
            defect = float(np.max(np.abs(full.conj().T @ full - np.eye(full.shape[0]))))
            params = {"spin": spec.spin, "z": z, "t": t}
            out.append(
                IdentityCheck(
                    f"extended_unitarity_{kind.value}", params, defect, 1e-11, dim_used=ob.dim_used,
                    details={"oracle_est_error": ob.est_error},
                )
            )
            at_zero = oracle_block(spec, z, t=0.0, size=size, cfg=opts.oracle)
            gap = float(np.max(np.abs(at_zero.values - _closed_block(spec, z, size))))
            out.append(
                IdentityCheck(f"extended_t0_{kind.value}", {**params, "t": 0.0}, gap, 1e-9, dim_used=at_zero.dim_used)
            )
    return out


SUITES: Dict[str, Callable[[SuiteOptions], List[IdentityCheck]]] = {
    "hw_elements": suite_hw_elements,
    "su11_elements": suite_su11_elements,
    "su2_elements": suite_su2_elements,
    "symmetry": suite_symmetry,
    "unitarity": suite_unitarity,
    "factorization": suite_factorization,
    "group_law": suite_group_law,
    "exchange": suite_exchange,
    "disentangling": suite_disentangling,
    "extended": suite_extended,
}


def run_suites(
    names: Optional[Sequence[str]] = None, options: Optional[SuiteOptions] = None, timing: bool = False
) -> List[VerificationReport]:
    """Run the named suites (all, in canonical order, by default)."""
    options = options or SuiteOptions()
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    reports = []
    for name in names:
        start = time.perf_counter()
        checks = SUITES[name](options)
        elapsed = time.perf_counter() - start
        reports.append(VerificationReport(name, checks, elapsed if timing else None))
    return reports


def jsonable(value: Any) -> Any:
    """Complex numbers become "re,im" strings with 17 significant digits."""
    if isinstance(value, (complex, np.complexfloating)):
        v = complex(value)
        return f"{v.real:.17g},{v.imag:.17g}"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def check_record(c: IdentityCheck) -> Dict[str, Any]:
    return jsonable(
        {
            "name": c.name,
            "params": c.params,
            "residual": c.residual,
            "tol": c.tol,
            "passed": c.passed,
            "dim_used": c.dim_used,
            "details": c.details,
        }
    )


def report_record(r: VerificationReport) -> Dict[str, Any]:
    worst = r.worst
    out: Dict[str, Any] = {
        "suite": r.suite,
        "total": r.total,
        "passed": r.passed,
        "failed": r.failed,
        "worst": None if worst is None else {"name": worst.name, "residual": worst.residual, "tol": worst.tol, "params": worst.params},
        "oracle_dims": r.oracle_dims,
        "checks": [check_record(c) for c in r.checks],
    }
    if r.wall_clock is not None:
        out["wall_clock"] = r.wall_clock
    return jsonable(out)
