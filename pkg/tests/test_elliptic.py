"""
타원함수 / 완전 타원적분 테스트 (scipy.special 을 기준값으로 사용)
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from delay_duffing.core.exceptions import EllipticDomainError
from delay_duffing.elliptic.elliptic import (
    EllipticParameter,
    cn,
    complete_E,
    complete_K,
    jacobi_sncndn,
    sn_dn,
)

PARAMETERS = [0.0, 1e-8, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99]


def test_quarter_period_constant():
    assert complete_K(0.5) == pytest.approx(1.8540746773013719, rel=1e-14)
    assert abs(4.0 * complete_K(0.5) - 7.4162987) < 1e-7


@pytest.mark.parametrize("m", PARAMETERS + [0.999, 0.999999])
def test_complete_integrals_match_scipy(m):
    assert complete_K(m) == pytest.approx(special.ellipk(m), rel=1e-14)
    assert complete_E(m) == pytest.approx(special.ellipe(m), rel=1e-13)


def test_zero_parameter_is_circular():
    assert complete_K(0.0) == pytest.approx(0.5 * math.pi, rel=1e-15)
    u = np.linspace(-10.0, 10.0, 201)
    sn, cn_values, dn = jacobi_sncndn(u, 0.0)
    np.testing.assert_allclose(sn, np.sin(u), atol=1e-13)
    np.testing.assert_allclose(cn_values, np.cos(u), atol=1e-13)
    np.testing.assert_allclose(dn, 1.0, atol=1e-15)


@pytest.mark.parametrize("m", PARAMETERS)
def test_jacobi_functions_match_scipy(m):
    u = np.linspace(-30.0, 30.0, 1201)
    sn, cn_values, dn = jacobi_sncndn(u, m)
    ref_sn, ref_cn, ref_dn, _ = special.ellipj(u, m)
    np.testing.assert_allclose(sn, ref_sn, atol=1e-12)
    np.testing.assert_allclose(cn_values, ref_cn, atol=1e-12)
    np.testing.assert_allclose(dn, ref_dn, atol=1e-12)


@pytest.mark.parametrize("m", [0.0, 0.1, 0.5, 0.9, 0.999])
def test_pythagorean_identities(m):
    u = np.linspace(-50.0, 50.0, 2001)
    sn, cn_values, dn = jacobi_sncndn(u, m)
    assert np.max(np.abs(sn ** 2 + cn_values ** 2 - 1.0)) < 1e-12
    assert np.max(np.abs(dn ** 2 + m * sn ** 2 - 1.0)) < 1e-12


def test_scalar_and_array_paths_agree():
    m = 0.5
    u = np.array([-7.3, -0.2, 0.0, 1.1, 5.9, 123.4])
    sn, cn_values, dn = jacobi_sncndn(u, m)
    for i, value in enumerate(u):
        s, c, d = jacobi_sncndn(float(value), m)
        assert isinstance(s, float)
        assert s == pytest.approx(sn[i], abs=1e-14)
        assert c == pytest.approx(cn_values[i], abs=1e-14)
        assert d == pytest.approx(dn[i], abs=1e-14)


def test_argument_reduction_keeps_precision():
    m = 0.5
    period = 4.0 * complete_K(m)
    u = np.linspace(0.0, period, 17)
    far = u + 1000.0 * period
    np.testing.assert_allclose(cn(far, m), cn(u, m), atol=1e-9)
    sn_far, dn_far = sn_dn(far, m)
    sn_near, dn_near = sn_dn(u, m)
    np.testing.assert_allclose(sn_far, sn_near, atol=1e-9)
    np.testing.assert_allclose(dn_far, dn_near, atol=1e-9)


def test_half_period_antisymmetry():
    m = 0.5
    K = complete_K(m)
    u = np.linspace(-3.0, 3.0, 61)
    np.testing.assert_allclose(cn(u + 2.0 * K, m), -cn(u, m), atol=1e-13)


@pytest.mark.parametrize("m", [1.0, 1.5, -0.1, float("nan"), float("inf")])
def test_parameter_outside_domain_is_rejected(m):
    with pytest.raises(EllipticDomainError):
        complete_K(m)
    with pytest.raises(EllipticDomainError):
        jacobi_sncndn(0.3, m)


def test_elliptic_parameter_model():
    assert complete_K(EllipticParameter(m=0.5)) == complete_K(0.5)
    with pytest.raises(ValidationError):
        EllipticParameter(m=1.0)
