"""
기준 주기해 테스트: 진폭 표, 주기-진폭 관계, 에너지 항등식
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from delay_duffing.core.exceptions import EllipticDomainError, NoRootError
from delay_duffing.orbit.orbit import (
    P_STAR,
    DuffingParams,
    admissible_orders,
    energy_identity,
    hamiltonian,
    make_orbit,
    orbit_state,
    period_by_quadrature,
    period_derivative,
    period_of_amplitude,
    rescaled_period,
    rescaled_state,
    solve_amplitude,
)

T_CRIT_PLUS = 3.8476494904855922866 + 0.1

# (T, n, A_n, 상대 허용오차)
AMPLITUDE_TABLE = [
    (0.6, 1, 6.29721145, 1e-8),
    (0.6, 2, 12.30144591494, 1e-10),
    (0.3, 1, 12.41931822569, 1e-10),
    (0.3, 2, 24.69151341060282, 1e-10),
    (0.3, 11, 135.97083402978303460, 1e-10),
    (0.3, 12, 148.32106281755626611, 1e-10),
    (0.9, 27, 111.25102887868052589, 1e-10),
    (0.9, 28, 115.35833191723956861, 1e-10),
    (0.9, 51, 210.13193020360773942, 1e-10),
    (0.9, 52, 214.24522922435665376, 1e-10),
    (T_CRIT_PLUS, 33, 31.021414799836585, 1e-10),
    (T_CRIT_PLUS, 34, 31.91443613945749, 1e-10),
]


def test_p_star_value():
    assert P_STAR == pytest.approx(7.4162987, abs=1e-7)
    assert P_STAR == pytest.approx(4.0 * special.ellipk(0.5), rel=1e-15)


@pytest.mark.parametrize("T, n, expected, rel", AMPLITUDE_TABLE)
def test_amplitude_table(T, n, expected, rel):
    orbit = solve_amplitude(DuffingParams(a=0.0, b=1.0, T=T), n)
    assert orbit.A == pytest.approx(expected, rel=rel)
    assert orbit.p == pytest.approx(2.0 * T / n, rel=1e-11)
    assert orbit.alpha == (-1.0 if n % 2 else 1.0)


def test_large_amplitude_scaling():
    # α 가 무시될 만큼 진폭이 크면 A_n ≈ n·p*/(2T)
    orbit = solve_amplitude(DuffingParams(a=0.0, b=1.0, T=0.01), 40)
    assert orbit.A == pytest.approx(40 * P_STAR / 0.02, rel=1e-4)


@pytest.mark.parametrize("T", [0.3, 0.9, 2.0])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_pure_cubic_doubling_law(T, n):
    # α = 0 이면 A_n = n·p*/(2T), 차수를 두 배로 하면 진폭은 두 배 주기는 절반
    params = DuffingParams(a=0.0, b=0.0, T=T)
    single = solve_amplitude(params, n)
    double = solve_amplitude(params, 2 * n)
    assert single.A == pytest.approx(n * P_STAR / (2.0 * T), rel=1e-10)
    assert double.A == pytest.approx(2.0 * single.A, rel=1e-10)
    assert double.p == pytest.approx(0.5 * single.p, rel=1e-10)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("A", [1.6, 2.0, 6.3, 25.0])
def test_period_matches_quadrature(alpha, A):
    p = period_of_amplitude(alpha, A)
    assert p == pytest.approx(period_by_quadrature(alpha, A), rel=1e-12)
    omega = math.sqrt(alpha + A * A)
    m = A * A / (2.0 * omega ** 2)
    assert p == pytest.approx(4.0 * special.ellipk(m) / omega, rel=1e-13)


def test_pure_cubic_period_scales_inversely():
    for A in (0.5, 1.0, 2.0, 10.0):
        assert period_of_amplitude(0.0, A) == pytest.approx(P_STAR / A, rel=1e-14)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0])
@pytest.mark.parametrize("A", [2.0, 6.3, 30.0])
def test_period_derivative_matches_finite_difference(alpha, A):
    h = 1e-5 * A
    numeric = (period_of_amplitude(alpha, A + h) - period_of_amplitude(alpha, A - h)) / (2.0 * h)
    assert period_derivative(alpha, A) == pytest.approx(numeric, rel=1e-7)
    assert period_derivative(alpha, A) < 0.0


def test_nonpositive_energy_is_rejected():
    # α = -1 이면 A² > 2 가 필요하다
    with pytest.raises(EllipticDomainError):
        period_of_amplitude(-1.0, 1.0)
    with pytest.raises(EllipticDomainError):
        make_orbit(-1.0, math.sqrt(2.0))


def test_orbit_conserves_energy_and_solves_ode():
    orbit = solve_amplitude(DuffingParams(a=0.0, b=1.0, T=0.6), 1)
    t = np.linspace(0.0, 3.0 * orbit.p, 301)
    x, v = orbit_state(orbit, t)
    np.testing.assert_allclose(hamiltonian(orbit.alpha, x, v), orbit.H, rtol=1e-11)

    h = 1e-5
    _, v_plus = orbit_state(orbit, t + h)
    _, v_minus = orbit_state(orbit, t - h)
    acceleration = (v_plus - v_minus) / (2.0 * h)
    residual = acceleration + orbit.alpha * x + x ** 3
    assert np.max(np.abs(residual)) < 1e-5 * orbit.A ** 3


def test_half_period_shift_flips_sign():
    orbit = solve_amplitude(DuffingParams(a=0.0, b=1.0, T=0.6), 2)
    t = np.linspace(0.0, orbit.p, 50)
    x, _ = orbit_state(orbit, t)
    x_shift, _ = orbit_state(orbit, t + 0.5 * orbit.p)
    np.testing.assert_allclose(x_shift, -x, atol=1e-10 * orbit.A)


def test_order_condition_violation_has_no_root():
    params = DuffingParams(a=0.0, b=1.0, T=10.0)
    # 짝수 n 은 α = +1 이므로 n > 10/π 가 필요하다
    with pytest.raises(NoRootError):
        solve_amplitude(params, 2)
    assert admissible_orders(params, 6) == [1, 3, 4, 5, 6]
    assert solve_amplitude(params, 4).p == pytest.approx(5.0, rel=1e-11)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        solve_amplitude(DuffingParams(T=0.6), 0)
    with pytest.raises(ValidationError):
        DuffingParams(T=0.0)
    with pytest.raises(ValidationError):
        DuffingParams(T=-1.0)


def test_rescaled_period_relation():
    for alpha in (-1.0, 1.0):
        A = 12.3
        assert rescaled_period(A ** -2, alpha) == pytest.approx(A * period_of_amplitude(alpha, A), rel=1e-13)
    assert rescaled_period(0.0, 1.0) == pytest.approx(P_STAR, rel=1e-15)
    x, xdot = rescaled_state(0.0, 0.0, 0.0)
    assert (x, xdot) == (1.0, 0.0)


def test_energy_identity_holds():
    integral, expected = energy_identity()
    assert abs(integral - expected) < 1e-9


def test_energy_identity_detects_perturbed_constant():
    integral, expected = energy_identity(P_STAR * (1.0 + 1e-4))
    assert abs(integral - expected) > 1e-6
