import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import ellipj

from delaycycles.elliptic import (
    EllipticOrbit,
    cn_series,
    complete_K,
    dn_series,
    jacobi,
    nome,
    sn_series,
)
from delaycycles.errors import DomainError


def test_K_circular_limit():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_K_at_half_uses_parameter_convention():
    # 1.854 only holds for m = k^2 = 1/2; modulus 1/2 would give 1.686
    assert round(complete_K(0.5), 3) == 1.854


def test_K_against_quadrature():
    m = 0.9
    ref, _ = quad(lambda th: 1.0 / math.sqrt(1.0 - m * math.sin(th) ** 2), 0.0, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert complete_K(m) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("m", [-0.1, 1.0, 1.5, 1 - 1e-13, float("nan")])
def test_K_domain(m):
    with pytest.raises(DomainError):
        complete_K(m)


def test_nome_symmetric_point():
    assert nome(0.5) == pytest.approx(math.exp(-math.pi), rel=1e-14)


def test_nome_small_m():
    assert nome(1e-6) < 1e-6
    qs = [nome(m) for m in np.geomspace(1e-8, 0.9, 30)]
    assert all(a < b for a, b in zip(qs, qs[1:]))


def test_nome_against_theta_inversion():
    # K = (pi/2) theta_3(q)^2 with theta_3(q) = 1 + 2 sum q^(n^2)
    m = 0.25
    q = nome(m)
    theta3 = 1.0 + 2.0 * sum(q ** (n * n) for n in range(1, 10))
    assert math.pi / 2 * theta3**2 == pytest.approx(complete_K(m), abs=1e-10)


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_nome_domain(m):
    with pytest.raises(DomainError):
        nome(m)


@pytest.mark.parametrize("m", [0.0, 0.3, 0.5, 0.9])
def test_jacobi_at_zero(m):
    assert jacobi(0.0, m) == pytest.approx((0.0, 1.0, 1.0), abs=1e-15)


def test_jacobi_circular():
    sn, cn, dn = jacobi(1.2, 0.0)
    assert (sn, cn, dn) == pytest.approx((math.sin(1.2), math.cos(1.2), 1.0), abs=1e-15)


def test_jacobi_quarter_period():
    K = complete_K(0.5)
    assert jacobi(K, 0.5) == pytest.approx((1.0, 0.0, math.sqrt(0.5)), abs=1e-14)


@pytest.mark.parametrize("m", [0.05, 0.3, 0.5, 0.75, 0.9])
def test_jacobi_against_scipy(m):
    z = np.linspace(-40.0, 40.0, 801)
    ours = jacobi(z, m)
    ref = ellipj(z, m)[:3]
    for a, b in zip(ours, ref):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_jacobi_array_shape():
    z = np.linspace(0, 3, 12).reshape(3, 4)
    sn, cn, dn = jacobi(z, 0.4)
    assert sn.shape == cn.shape == dn.shape == (3, 4)


@settings(max_examples=200, deadline=None)
@given(z=st.floats(-50.0, 50.0), m=st.floats(0.0, 0.9))
def test_pythagorean_identities(z, m):
    sn, cn, dn = jacobi(z, m)
    assert abs(sn * sn + cn * cn - 1.0) <= 1e-12
    assert abs(dn * dn + m * sn * sn - 1.0) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(z=st.floats(-50.0, 50.0), m=st.floats(0.0, 0.9))
def test_cn_period(z, m):
    K = complete_K(m)
    assert abs(jacobi(z + 4 * K, m)[1] - jacobi(z, m)[1]) <= 1e-12


def test_cn_series_at_zero():
    assert cn_series(0.0, 0.3, 8) == pytest.approx(1.0, abs=1e-9)


def test_one_term_cn_series():
    exact = jacobi(0.7, 0.5)[1]
    assert abs(cn_series(0.7, 0.5, 1) - exact) < 0.02


def test_converged_cn_series():
    assert cn_series(0.7, 0.5, 10) == pytest.approx(jacobi(0.7, 0.5)[1], abs=1e-10)


def test_dn_single_term_is_constant():
    K = complete_K(0.4)
    assert dn_series(1.3, 0.4, 1) == pytest.approx(math.pi / (2 * K), rel=1e-15)


@pytest.mark.parametrize("m", [0.01, 0.1, 0.25, 0.4, 0.5])
def test_series_match_exact(m):
    z = np.linspace(0.0, 4 * complete_K(m), 1001)
    sn, cn, dn = jacobi(z, m)
    assert np.max(np.abs(sn_series(z, m, 12) - sn)) <= 1e-9
    assert np.max(np.abs(cn_series(z, m, 12) - cn)) <= 1e-9
    assert np.max(np.abs(dn_series(z, m, 12) - dn)) <= 1e-9


@pytest.mark.parametrize("n_terms", [0, -1, 1.5])
def test_series_bad_terms(n_terms):
    with pytest.raises(DomainError):
        sn_series(0.3, 0.5, n_terms)


@settings(max_examples=200, deadline=None)
@given(a1=st.floats(1e-3, 200.0))
def test_orbit_relations(a1):
    orb = EllipticOrbit.from_amplitude(a1)
    assert orb.a2**2 == pytest.approx(orb.a1**2 + 1.0, rel=1e-14)
    assert orb.m == pytest.approx(a1 * a1 / (2 * (1 + a1 * a1)), rel=1e-14)
    assert 0.0 <= orb.m < 0.5
    assert 0.0 < orb.q < 1.0
    assert orb.P == pytest.approx(4 * orb.K / orb.a2, rel=1e-15) and orb.P > 0


def test_orbit_solves_conservative_oscillator():
    orb = EllipticOrbit.from_amplitude(7.0)
    t = np.linspace(0.0, orb.P, 257)
    x = orb.x(t)
    sn, cn, dn = jacobi(orb.a2 * t, orb.m)
    v = -orb.a1 * orb.a2 * sn * dn
    energy = 0.5 * v**2 + 0.5 * x**2 + 0.25 * x**4
    np.testing.assert_allclose(energy, 0.5 * 49 + 0.25 * 7**4, rtol=1e-12)
    assert orb.x(orb.P) == pytest.approx(orb.x(0.0), abs=1e-12)


def test_orbit_rejects_nonpositive():
    with pytest.raises(DomainError):
        EllipticOrbit.from_amplitude(0.0)
