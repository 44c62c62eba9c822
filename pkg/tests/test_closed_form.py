import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcoherent.closed_form import (
    ElementQuery,
    element,
    frame,
    u_element,
    v_element,
    w_element,
)
from gcoherent.errors import DomainError, NoClosedFormError, PoleError
from gcoherent.oracle import oracle_block
from gcoherent.representations import AlgebraSpec

mpmath.mp.dps = 60


def v_reference(K, n, m, z):
    """The su(1,1) finite sum evaluated with 60 significant digits (n >= m)."""
    assert n >= m
    K = mpmath.mpf(K)
    r = mpmath.mpf(abs(z))
    x = mpmath.sinh(r) ** 2
    s = mpmath.mpf(0)
    for j in range(m + 1):
        s += (-1) ** (m - j) * mpmath.gamma(2 * K + n + m - j) / (
            mpmath.gamma(2 * K) * mpmath.factorial(m - j) * mpmath.factorial(n - j) * mpmath.factorial(j)
        ) * (1 + x) ** j * x ** (m - j)
    pref = mpmath.sqrt(mpmath.factorial(n) * mpmath.factorial(m) / (mpmath.rf(2 * K, n) * mpmath.rf(2 * K, m)))
    val = pref * mpmath.sqrt(x) ** (n - m) * (1 + x) ** (-(K + mpmath.mpf(n + m) / 2)) * s
    phase = cmath.exp(1j * cmath.phase(z) * (n - m)) if z else 1
    return complex(val) * phase


# examples


def test_u_examples():
    assert u_element(3, 3, 0) == 1
    assert u_element(0, 0, 1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert u_element(2, 0, 1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2), abs=1e-15)


def test_v_examples():
    assert v_element(0.25, 0, 0, 0) == 1
    assert v_element(1.0, 0, 0, 1.0) == pytest.approx(math.cosh(1) ** -2, abs=1e-15)


def test_v_quarter_spin_first_column():
    # The single-term sum gives sqrt(2K) kappa (1 + kappa^2)^-(K + 1/2), i.e.
    # tanh(0.5) / sqrt(2 cosh(0.5)) here.  The "about 0.1542" quoted alongside
    # this example is half of it; the oracle sides with the formula.
    expected = math.tanh(0.5) / math.sqrt(2 * math.cosh(0.5))
    got = v_element(0.25, 1, 0, 0.5)
    assert got == pytest.approx(expected, abs=1e-15)
    assert got == pytest.approx(0.3077191764583705, abs=1e-15)
    oracle = oracle_block(AlgebraSpec.su11(0.25), 0.5, size=2).values[1, 0]
    assert abs(got - oracle) < 1e-12


def test_w_examples():
    z = 0.7
    assert w_element(0.5, 1, 0, z) == pytest.approx(math.sin(0.7), abs=1e-15)
    assert w_element(3, 0, 0, 0) == 1
    assert w_element(1, 2, 0, math.pi / 4) == pytest.approx(0.5, abs=1e-15)
    assert w_element(1, 1, 1, math.pi / 2) == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("z", [0.7, 0.3 + 0.8j, -1.1j, 2.4 - 0.5j])
def test_w_spin_half_is_the_two_by_two_exponential(z):
    r = abs(z)
    expected = np.array([[math.cos(r), -z.conjugate() * math.sin(r) / r], [z * math.sin(r) / r, math.cos(r)]])
    got = np.array([[w_element(0.5, n, m, z) for m in range(2)] for n in range(2)])
    np.testing.assert_allclose(got, expected, atol=1e-15)


def test_element_dispatch():
    assert element(ElementQuery(AlgebraSpec.hw(), 0, 0, 0)) == 1
    assert element(ElementQuery(AlgebraSpec.su2(0.5), 0, 0, 1.0)) == pytest.approx(math.cos(1), abs=1e-15)
    with pytest.raises(NoClosedFormError):
        element(ElementQuery(AlgebraSpec.su11(1.0), 0, 0, 0.5, t=0.3))


def test_query_validation():
    with pytest.raises(DomainError):
        ElementQuery(AlgebraSpec.hw(), 0, 0, 0.5, t=0.1)
    with pytest.raises(DomainError):
        ElementQuery(AlgebraSpec.su2(1), 3, 0, 0.5)
    with pytest.raises(DomainError):
        ElementQuery(AlgebraSpec.hw(), 0, 0, complex(math.nan, 0))
    with pytest.raises(DomainError):
        ElementQuery(AlgebraSpec.su11(1), 0, 0, 0.5, t=math.inf)


def test_frame_examples():
    f = frame(AlgebraSpec.su11(1), 0)
    assert f.zeta_or_eta == 0 and f.kappa == 0
    assert frame(AlgebraSpec.su11(1), 1.0).kappa == pytest.approx(math.sinh(1))
    pole = frame(AlgebraSpec.su2(1), math.pi / 2)
    assert pole.pole and pole.zeta_or_eta is None
    assert pole.kappa == pytest.approx(1.0)
    with pytest.raises(PoleError):
        frame(AlgebraSpec.su2(1), math.pi / 2, strict=True)
    with pytest.raises(DomainError):
        frame(AlgebraSpec.hw(), 1.0)


def test_frame_keeps_direction():
    z = 0.6 - 0.8j
    f = frame(AlgebraSpec.su2(1), z)
    assert f.zeta_or_eta == pytest.approx(math.tan(1.0) * z)
    assert f.kappa == pytest.approx(math.sin(1.0) * z)


# against the oracle, off the acceptance grids


@pytest.mark.parametrize("z", [0.37 - 1.21j, 1.9, -0.05j])
def test_u_block_against_oracle(z):
    blk = oracle_block(AlgebraSpec.hw(), z, size=12)
    got = np.array([[u_element(n, m, z) for m in range(12)] for n in range(12)])
    np.testing.assert_allclose(got, blk.values, atol=1e-10)


@pytest.mark.parametrize("K", [0.1, 1.7, 4.0])
def test_v_block_against_oracle_non_grid_spins(K):
    z = 0.8 * cmath.exp(0.4j)
    blk = oracle_block(AlgebraSpec.su11(K), z, size=10)
    got = np.array([[v_element(K, n, m, z) for m in range(10)] for n in range(10)])
    np.testing.assert_allclose(got, blk.values, atol=1e-9)


@pytest.mark.parametrize("J", [0.5, 2, 3.5])
@pytest.mark.parametrize("r", [1.7, 2.6, 3.1, 4.0])
def test_w_past_the_pole(J, r):
    # cos|z| < 0: the odd powers of cos|z| must keep their sign
    z = r * cmath.exp(-0.9j)
    blk = oracle_block(AlgebraSpec.su2(J), z)
    dim = int(2 * J + 1)
    got = np.array([[w_element(J, n, m, z) for m in range(dim)] for n in range(dim)])
    np.testing.assert_allclose(got, blk.values, atol=1e-12)


def test_w_at_the_pole_is_finite():
    z = math.pi / 2 * cmath.exp(0.3j)
    blk = oracle_block(AlgebraSpec.su2(2), z)
    got = np.array([[w_element(2, n, m, z) for m in range(5)] for n in range(5)])
    np.testing.assert_allclose(got, blk.values, atol=1e-12)


# cancellation in the alternating sums


@pytest.mark.parametrize("n,m,z", [(60, 15, 1.0), (75, 15, 1.0), (40, 30, 1.3j), (90, 5, 0.7 + 0.7j)])
def test_v_large_index_against_high_precision(n, m, z):
    ref = v_reference(1.0, n, m, z)
    assert abs(v_element(1.0, n, m, z) - ref) <= 1e-13


def test_v_cancellation_regression():
    # the plain double-precision sum returns about -0.00429 here
    assert v_element(1.0, 60, 15, 1.0) == pytest.approx(-0.0073711671792908840, abs=1e-15)


def test_large_hw_indices_stay_finite():
    val = u_element(400, 380, 3 + 1j)
    assert math.isfinite(abs(val)) and abs(val) <= 1


# properties


spins11 = st.sampled_from([0.25, 0.5, 0.75, 1.0, 1.3, 2.5])
spins2 = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0, 5.0])
small_z = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 25), st.integers(0, 25), small_z)
def test_u_conjugation_symmetry(n, m, z):
    assert abs(u_element(n, m, z) - u_element(m, n, -z).conjugate()) <= 1e-13


@settings(max_examples=150, deadline=None)
@given(spins11, st.integers(0, 20), st.integers(0, 20), small_z)
def test_v_conjugation_symmetry(K, n, m, z):
    assert abs(v_element(K, n, m, z) - v_element(K, m, n, -z).conjugate()) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(spins2, st.data(), st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False))
def test_w_conjugation_symmetry(J, data, z):
    n = data.draw(st.integers(0, int(2 * J)))
    m = data.draw(st.integers(0, int(2 * J)))
    assert abs(w_element(J, n, m, z) - w_element(J, m, n, -z).conjugate()) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(spins2, st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False))
def test_w_columns_are_unit_vectors(J, z):
    dim = int(2 * J + 1)
    for m in range(dim):
        norm = math.fsum(abs(w_element(J, n, m, z)) ** 2 for n in range(dim))
        assert abs(norm - 1) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_u_columns_are_unit_vectors(m, z):
    norm = math.fsum(abs(u_element(n, m, z)) ** 2 for n in range(m + 61))
    assert abs(norm - 1) <= 1e-10


def _v_column_norm(K, m, z, tail=1e-17):
    """Sum |<n|V|m>|^2 over n until 20 consecutive terms are below ``tail``."""
    total, n, quiet = [], 0, 0
    while quiet < 20:
        p = abs(v_element(K, n, m, z)) ** 2
        total.append(p)
        quiet = quiet + 1 if n > m and p < tail else 0
        n += 1
    return math.fsum(total), n


@pytest.mark.parametrize("K", [0.25, 0.75, 1.0, 2.5])
@pytest.mark.parametrize("m", [0, 5, 15])
@pytest.mark.parametrize("z", [0.5j, 1.0, 1.5 * cmath.exp(0.7j)])
def test_v_columns_are_unit_vectors_with_adaptive_tail(K, m, z):
    # the tail here is spin and |z| dependent; it can need far more than m + 60 terms
    norm, used = _v_column_norm(K, m, z)
    assert abs(norm - 1) <= 1e-10, used


def test_hw_diagonal_vacuum():
    for r in np.linspace(0, 3, 11):
        assert abs(u_element(0, 0, r)) ** 2 == pytest.approx(math.exp(-r * r), rel=1e-13, abs=1e-300)


def test_phase_rotation_covariance():
    # rotating z by e^{i phi} multiplies <n|X|m> by e^{i (n - m) phi}
    z, phi = 0.9 + 0.2j, 0.77
    rot = cmath.exp(1j * phi)
    for f in (u_element, lambda n, m, z: v_element(1.5, n, m, z), lambda n, m, z: w_element(2.5, n, m, z)):
        for n, m in [(0, 3), (4, 1), (2, 2)]:
            assert f(n, m, z * rot) == pytest.approx(f(n, m, z) * rot ** (n - m), abs=1e-13)
