import cmath
import math

import numpy as np
import pytest
import scipy.linalg

from gcoherent.closed_form import ElementQuery
from gcoherent.errors import DomainError, NoConvergence
from gcoherent.oracle import (
    OracleConfig,
    default_dim_max,
    expm_antihermitian,
    operator_matrix,
    oracle_block,
    oracle_element,
)
from gcoherent.representations import AlgebraSpec, generator


def test_expm_zero_is_identity():
    np.testing.assert_array_equal(expm_antihermitian(np.zeros((4, 4))), np.eye(4))


def test_expm_rotation():
    got = expm_antihermitian(np.array([[0, -1], [1, 0]], dtype=complex))
    c, s = math.cos(1), math.sin(1)
    np.testing.assert_allclose(got, [[c, -s], [s, c]], atol=1e-15)


def test_expm_diagonal():
    got = expm_antihermitian(1j * np.diag([1.0, 2.0]))
    np.testing.assert_allclose(got, np.diag([cmath.exp(1j), cmath.exp(2j)]), atol=1e-15)


def test_expm_rejects_non_antihermitian():
    with pytest.raises(DomainError):
        expm_antihermitian(np.array([[1.0, 0], [0, 0]]))
    with pytest.raises(DomainError):
        expm_antihermitian(np.zeros((2, 3)))


SCIPY_CASES = [
    (spec, dim, z, t)
    for spec, dim in [
        (AlgebraSpec.hw(), 30),
        (AlgebraSpec.su11(0.25), 30),
        (AlgebraSpec.su11(2.5), 24),
        (AlgebraSpec.su2(3.5), 8),
    ]
    for z, t in [(0.7 - 0.2j, 0.0), (1.3j, 0.0), (0.4 + 0.4j, 0.9)]
    if not (spec.kind.value == "hw" and t)
]


@pytest.mark.parametrize("spec,dim,z,t", SCIPY_CASES)
def test_expm_matches_scipy(spec, dim, z, t):
    g = np.array(generator(spec, dim, z, t))
    np.testing.assert_allclose(operator_matrix(spec, dim, z, t), scipy.linalg.expm(g), atol=1e-12)


@pytest.mark.parametrize("spec", [AlgebraSpec.hw(), AlgebraSpec.su11(1.0), AlgebraSpec.su2(2)])
def test_operator_matrix_is_unitary(spec):
    u = operator_matrix(spec, spec.finite_dim or 50, 1.1 - 0.6j, 0.0 if spec.kind.value == "hw" else 0.3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12)


def test_hw_vacuum_example():
    res = oracle_element(ElementQuery(AlgebraSpec.hw(), 0, 0, 1.0), OracleConfig(tol=1e-10))
    assert abs(res.value - math.exp(-0.5)) <= 1e-10
    assert res.dim_used <= 64
    assert res.est_error <= 1e-10


def test_su2_spin_half_example():
    res = oracle_element(ElementQuery(AlgebraSpec.su2(0.5), 1, 0, 0.7))
    assert res.value == pytest.approx(math.sin(0.7), abs=1e-14)
    assert res.dim_used == 2 and res.est_error == 0.0


def test_su11_diagonal_generator_example():
    res = oracle_element(ElementQuery(AlgebraSpec.su11(0.75), 0, 0, 0.0, t=1.0))
    assert abs(res.value - cmath.exp(1.5j)) <= 1e-12


def test_su2_full_matrix_is_two_by_two_rotation():
    z = 0.3 + 0.8j
    r = abs(z)
    blk = oracle_block(AlgebraSpec.su2(0.5), z)
    # raise is the subdiagonal here, so the 2x2 exponential is transposed
    # relative to the fundamental (row 0 is the lowest weight)
    expected = [[math.cos(r), -z.conjugate() * math.sin(r) / r], [z * math.sin(r) / r, math.cos(r)]]
    np.testing.assert_allclose(blk.values, expected, atol=1e-15)


def test_non_convergence_raises_with_partial_result():
    cfg = OracleConfig(tol=1e-10, dim_max=40)
    with pytest.raises(NoConvergence) as info:
        oracle_element(ElementQuery(AlgebraSpec.hw(), 0, 0, 6.0), cfg)
    err = info.value
    assert err.dim_used == 40
    assert err.est_error > 1e-10
    assert err.value is not None


def test_env_var_caps_cutoff(monkeypatch):
    monkeypatch.setenv("ORACLE_DIM_MAX", "40")
    assert default_dim_max() == 40
    assert OracleConfig().dim_max == 40
    monkeypatch.setenv("ORACLE_DIM_MAX", "nope")
    with pytest.raises(DomainError):
        default_dim_max()
    monkeypatch.delenv("ORACLE_DIM_MAX")
    assert default_dim_max() == 2048


def test_config_validation():
    with pytest.raises(DomainError):
        OracleConfig(tol=0)
    with pytest.raises(DomainError):
        OracleConfig(growth=1)
    with pytest.raises(DomainError):
        OracleConfig(dim0=100, dim_max=50)


def test_block_is_read_only_and_cached():
    a = oracle_block(AlgebraSpec.hw(), 0.5, size=4)
    b = oracle_block(AlgebraSpec.hw(), 0.5, size=4)
    assert a is b
    with pytest.raises(ValueError):
        a.values[0, 0] = 1


def test_block_needs_size_for_infinite_reps():
    with pytest.raises(DomainError):
        oracle_block(AlgebraSpec.su11(1.0), 0.5)
    with pytest.raises(DomainError):
        oracle_block(AlgebraSpec.su2(1.0), 0.5, size=4)


def test_small_dim0_rejected():
    with pytest.raises(DomainError):
        oracle_element(ElementQuery(AlgebraSpec.hw(), 5, 5, 0.5), OracleConfig(dim0=8))
