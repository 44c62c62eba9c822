import math

import numpy as np
import pytest

from gcoherent.errors import DomainError
from gcoherent.representations import (
    Algebra,
    AlgebraSpec,
    fundamental_matrices,
    generator,
    ladder_matrices,
    squeezed_generators,
)


def comm(a, b):
    return a @ b - b @ a


def test_su2_spin_half_example():
    lower, raise_, diag = ladder_matrices(AlgebraSpec.su2(0.5), 2)
    np.testing.assert_array_equal(raise_, [[0, 0], [1, 0]])
    np.testing.assert_array_equal(diag, np.diag([-0.5, 0.5]))


def test_hw_raise_entries():
    _, raise_, _ = ladder_matrices(AlgebraSpec.hw(), 3)
    np.testing.assert_allclose(np.diagonal(raise_, -1), [1.0, math.sqrt(2)])


def test_su11_quarter_spin_raise_entry():
    _, raise_, _ = ladder_matrices(AlgebraSpec.su11(0.25), 2)
    assert raise_[1, 0] == pytest.approx(1 / math.sqrt(2))


def test_generator_examples():
    np.testing.assert_array_equal(generator(AlgebraSpec.hw(), 2, 1.0), [[0, -1], [1, 0]])
    np.testing.assert_allclose(generator(AlgebraSpec.su2(0.5), None, 1j), [[0, 1j], [1j, 0]])
    for spec in (AlgebraSpec.hw(), AlgebraSpec.su11(1.0), AlgebraSpec.su2(2)):
        g = generator(spec, spec.finite_dim or 5, 0.0)
        assert not g.any()


@pytest.mark.parametrize("spec", [AlgebraSpec.hw(), AlgebraSpec.su11(0.75), AlgebraSpec.su2(2.5)])
def test_generator_is_antihermitian(spec):
    t = 0.0 if spec.kind is Algebra.HW else -0.4
    g = generator(spec, spec.finite_dim or 12, 0.3 - 1.1j, t)
    np.testing.assert_allclose(g + g.conj().T, 0, atol=1e-15)


def test_raise_is_adjoint_of_lower():
    for spec in (AlgebraSpec.hw(), AlgebraSpec.su11(2.5), AlgebraSpec.su2(3)):
        lower, raise_, _ = ladder_matrices(spec, spec.finite_dim or 9)
        np.testing.assert_array_equal(raise_, lower.conj().T)


def test_hw_commutator_away_from_cutoff():
    a, adag, number = ladder_matrices(AlgebraSpec.hw(), 10)
    np.testing.assert_allclose(comm(a, adag)[:9, :9], np.eye(9), atol=1e-14)
    np.testing.assert_allclose(comm(number, adag), adag, atol=1e-14)


@pytest.mark.parametrize("K", [0.25, 0.75, 1.0, 2.5])
def test_su11_commutators(K):
    km, kp, k3 = ladder_matrices(AlgebraSpec.su11(K), 10)
    np.testing.assert_allclose(comm(kp, km)[:9, :9], -2 * k3[:9, :9], atol=1e-13)
    np.testing.assert_allclose(comm(k3, kp), kp, atol=1e-13)
    np.testing.assert_allclose(comm(k3, km), -km, atol=1e-13)


@pytest.mark.parametrize("J", [0.5, 1, 1.5, 5])
def test_su2_commutators_are_exact(J):
    jm, jp, j3 = ladder_matrices(AlgebraSpec.su2(J))
    np.testing.assert_allclose(comm(jp, jm), 2 * j3, atol=1e-13)
    np.testing.assert_allclose(comm(j3, jp), jp, atol=1e-13)
    casimir = jp @ jm + j3 @ j3 - j3
    np.testing.assert_allclose(casimir, J * (J + 1) * np.eye(int(2 * J + 1)), atol=1e-12)


def test_fundamental_matrices():
    km, kp, k3 = fundamental_matrices(Algebra.SU11)
    np.testing.assert_array_equal(comm(kp, km), -2 * k3)
    jm, jp, j3 = fundamental_matrices(Algebra.SU2)
    np.testing.assert_array_equal(comm(jp, jm), 2 * j3)
    with pytest.raises(DomainError):
        fundamental_matrices(Algebra.HW)


@pytest.mark.parametrize("parity,K", [(0, 0.25), (1, 0.75)])
def test_squeezed_realization(parity, K):
    dim = 40
    lower, raise_, diag = squeezed_generators(dim)
    idx = np.arange(parity, dim, 2)[:15]
    km, kp, k3 = ladder_matrices(AlgebraSpec.su11(K), len(idx))
    np.testing.assert_allclose(lower[np.ix_(idx, idx)], km, atol=1e-13)
    np.testing.assert_allclose(raise_[np.ix_(idx, idx)], kp, atol=1e-13)
    np.testing.assert_allclose(diag[np.ix_(idx, idx)], k3, atol=1e-13)


def test_matrices_are_read_only():
    lower, _, _ = ladder_matrices(AlgebraSpec.hw(), 4)
    with pytest.raises(ValueError):
        lower[0, 1] = 2


@pytest.mark.parametrize(
    "kind,spin",
    [(Algebra.HW, 1.0), (Algebra.SU11, None), (Algebra.SU11, 0.0), (Algebra.SU11, -1), (Algebra.SU2, 0.3), (Algebra.SU2, math.inf)],
)
def test_spec_validation(kind, spin):
    with pytest.raises(DomainError):
        AlgebraSpec(kind, spin)


def test_spec_from_string_and_dims():
    spec = AlgebraSpec("su2", 1.5)
    assert spec.kind is Algebra.SU2 and spec.two_j == 3 and spec.finite_dim == 4
    assert AlgebraSpec.su11(1).finite_dim is None
    with pytest.raises(DomainError):
        AlgebraSpec.hw().two_j


def test_dim_validation():
    with pytest.raises(DomainError):
        ladder_matrices(AlgebraSpec.hw())
    with pytest.raises(DomainError):
        ladder_matrices(AlgebraSpec.hw(), 1)
    with pytest.raises(DomainError):
        ladder_matrices(AlgebraSpec.su2(1), 4)


def test_check_index():
    AlgebraSpec.su2(1).check_index(2)
    with pytest.raises(DomainError):
        AlgebraSpec.su2(1).check_index(3)
    with pytest.raises(DomainError):
        AlgebraSpec.hw().check_index(-1)
    with pytest.raises(DomainError):
        AlgebraSpec.hw().check_index(1.5)
