"""
기준 주기해 모듈

지연 없는 Duffing 진동자 x'' + αx + x³ = 0 (α = a + (-1)ⁿb) 의
양의 에너지 주기해 x_n(t) = A cn(ωt, m) 를 최소주기 p_n = 2T/n 에 맞춰 구성한다.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from delay_duffing.core.config import settings
from delay_duffing.core.exceptions import (
    ConvergenceError,
    EllipticDomainError,
    NoRootError,
)
from delay_duffing.elliptic.elliptic import complete_E, complete_K, jacobi_sncndn

logger = logging.getLogger(__name__)

# 순수 3차 진동자(α=0, A=1)의 최소주기 p* = 4K(1/2)
P_STAR = 4.0 * complete_K(0.5)


class DuffingParams(BaseModel):
    """지연 Duffing 진동자 x'' + ax + bx(t-T) + x³ = 0 의 계수"""

    model_config = ConfigDict(frozen=True)

    a: float = 0.0
    b: float = 1.0
    T: float

    @field_validator("T")
    @classmethod
    def _positive_delay(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError(f"지연 T 는 양수여야 합니다: T={value}")
        return value

    def alpha(self, n: int) -> float:
        """α = a + (-1)ⁿ b"""
        return self.a + parity_sign(n) * self.b


class PeriodicOrbit(BaseModel):
    """기준 주기해 x_n(t) = A cn(ωt, m)"""

    model_config = ConfigDict(frozen=True)

    n: int
    alpha: float
    A: float
    omega: float
    m: float
    p: float
    H: float

    @property
    def epsilon(self) -> float:
        """스케일링 파라미터 ε = A^{-2}"""
        return self.A ** -2


def parity_sign(n: int) -> int:
    """(-1)ⁿ"""
    return -1 if n % 2 else 1


def _elliptic_data(alpha: float, A: float) -> Tuple[float, float]:
    """(ω, m) 계산. H ≤ 0 이면 EllipticDomainError"""
    omega_sq = alpha + A * A
    # 분리선(m → 1) 근방은 반올림 오차 안에서 H = 0 으로 본다
    if A <= 0.0 or omega_sq <= 0.0 or A * A + 2.0 * alpha <= 1e-14 * A * A:
        raise EllipticDomainError(
            f"양의 에너지 조건 A² > max(0, -2α) 위반: alpha={alpha}, A={A}"
        )
    return math.sqrt(omega_sq), A * A / (2.0 * omega_sq)


def hamiltonian(alpha: float, x, xdot):
    """
    에너지 H = ½ẋ² + ½αx² + ¼x⁴

    Args:
        alpha: 선형 계수 α
        x: 위치 (스칼라 또는 배열)
        xdot: 속도 (스칼라 또는 배열)
    """
    x2 = x * x
    return 0.5 * xdot * xdot + 0.5 * alpha * x2 + 0.25 * x2 * x2


def period_of_amplitude(alpha: float, A: float) -> float:
    """
    진폭 A 인 주기해의 최소주기 p = 4K(m)/ω

    Args:
        alpha: 선형 계수 α
        A: 진폭 (A² > max(0, -2α))

    Returns:
        최소주기 p
    """
    omega, m = _elliptic_data(alpha, A)
    return 4.0 * complete_K(m) / omega


def period_derivative(alpha: float, A: float) -> float:
    """
    ∂p/∂A 해석식

    dK/dm = (E - (1-m)K) / (2m(1-m)), dm/dA = Aα/ω⁴, dω/dA = A/ω
    """
    omega, m = _elliptic_data(alpha, A)
    K = complete_K(m)
    dm_dA = A * alpha / omega ** 4
    if m > 0.0 and dm_dA != 0.0:
        dK_dm = (complete_E(m) - (1.0 - m) * K) / (2.0 * m * (1.0 - m))
    else:
        dK_dm = 0.0
    return 4.0 * dK_dm * dm_dA / omega - 4.0 * K * A / omega ** 3


def period_by_quadrature(alpha: float, A: float, nodes: int = 64) -> float:
    """
    진폭 적분의 직접 구적 (교차 검증용)

    x = A sinθ 치환으로 x = A 의 특이점을 없앤 뒤 Gauss-Legendre 적용:
    p/4 = ∫₀^{π/2} dθ / sqrt(α + A²(1 + sin²θ)/2)
    """
    _elliptic_data(alpha, A)
    points, weights = np.polynomial.legendre.leggauss(nodes)
    theta = 0.25 * math.pi * (points + 1.0)
    integrand = 1.0 / np.sqrt(alpha + 0.5 * A * A * (1.0 + np.sin(theta) ** 2))
    return 4.0 * 0.25 * math.pi * float(np.dot(weights, integrand))


def make_orbit(alpha: float, A: float, n: int = 1) -> PeriodicOrbit:
    """진폭 A 로부터 PeriodicOrbit 생성"""
    omega, m = _elliptic_data(alpha, A)
    return PeriodicOrbit(
        n=n,
        alpha=alpha,
        A=A,
        omega=omega,
        m=m,
        p=4.0 * complete_K(m) / omega,
        H=float(hamiltonian(alpha, A, 0.0)),
    )


def admissible_orders(params: DuffingParams, n_max: int) -> List[int]:
    """차수 조건 n > (T/π)·sqrt(α) (α > 0 일 때) 을 만족하는 n ≤ n_max"""
    orders = []
    for n in range(1, n_max + 1):
        alpha = params.alpha(n)
        if alpha <= 0.0 or n > params.T / math.pi * math.sqrt(alpha):
            orders.append(n)
    return orders


def solve_amplitude(params: DuffingParams, n: int,
                    rtol: Optional[float] = None,
                    max_iter: Optional[int] = None) -> PeriodicOrbit:
    """
    최소주기 2T/n 을 갖는 진폭 A_n 계산

    g(A) = p(α, A) - 2T/n 은 A 에 대해 단조감소하므로 구간을 유지하는
    Newton 법(구간 이탈 시 이분법)으로 푼다. 초기값은 A₀ = n·p*/(2T).

    Args:
        params: 진동자 계수
        n: 한 지연 구간 안의 반주기 개수
        rtol: |g| 허용 오차 (2T/n 대비 상대값)
        max_iter: 최대 반복 횟수

    Returns:
        PeriodicOrbit
    """
    if n < 1:
        raise ValueError(f"n 은 양의 정수여야 합니다: n={n}")
    rtol = settings.amplitude_rtol if rtol is None else rtol
    max_iter = settings.amplitude_max_iter if max_iter is None else max_iter

    alpha = params.alpha(n)
    target = 2.0 * params.T / n
    if alpha > 0.0 and not n > params.T / math.pi * math.sqrt(alpha):
        raise NoRootError(
            f"차수 조건 n > (T/π)√α 위반: n={n}, T={params.T}, alpha={alpha} "
            f"(진폭 0 극한 주기 {2.0 * math.pi / math.sqrt(alpha):.6g} ≤ 목표 주기 {target:.6g})"
        )

    def g(A: float) -> float:
        return period_of_amplitude(alpha, A) - target

    # 하한: H → 0 또는 A → 0 근방 (g > 0), 상한: g < 0 이 될 때까지 확장
    lower = math.sqrt(-2.0 * alpha) * (1.0 + 1e-12) if alpha < 0.0 else 0.0
    guess = n * P_STAR / (2.0 * params.T)
    upper = max(guess, lower) * 2.0 + 1.0
    while g(upper) > 0.0:
        lower, upper = upper, upper * 2.0
        if upper > 1e150:
            raise NoRootError(f"진폭 구간 확장 실패: n={n}, T={params.T}")

    A = min(max(guess, lower), upper)
    if A <= lower:
        A = 0.5 * (lower + upper)
    tolerance = rtol * target
    residual = float("nan")
    for iteration in range(1, max_iter + 1):
        residual = g(A)
        logger.debug(f"[amplitude n={n}] iter={iteration} A={A:.17g} g={residual:.3e}")
        if abs(residual) < tolerance:
            logger.info(f"진폭 계산 완료: n={n}, T={params.T}, A={A:.17g} ({iteration}회)")
            return make_orbit(alpha, A, n)
        if residual > 0.0:
            lower = A
        else:
            upper = A
        slope = period_derivative(alpha, A)
        candidate = A - residual / slope if slope < 0.0 else float("nan")
        if not lower < candidate < upper:
            candidate = 0.5 * (lower + upper)
        if candidate == A or upper - lower <= 4.0 * np.finfo(float).eps * upper:
            if abs(residual) < 1e3 * tolerance:
                return make_orbit(alpha, A, n)
            break
        A = candidate

    raise ConvergenceError(
        f"진폭 계산이 수렴하지 않았습니다: n={n}, T={params.T}",
        diagnostics={"lower": lower, "upper": upper, "A": A, "residual": residual},
    )


def orbit_state(orbit: PeriodicOrbit, t):
    """
    주기해 상태 (x, x') = (A cn(ωt), -Aω sn(ωt) dn(ωt))

    Args:
        orbit: 기준 주기해
        t: 시각 (스칼라 또는 배열)
    """
    sn, cn, dn = jacobi_sncndn(orbit.omega * t, orbit.m)
    return orbit.A * cn, -orbit.A * orbit.omega * sn * dn


def rescaled_period(epsilon: float, alpha: float) -> float:
    """정규화 주기 p(ε) = 4(1+εα)^{-1/2} K(1/(2(1+εα)))"""
    return period_of_amplitude(epsilon * alpha, 1.0)


def rescaled_state(epsilon: float, alpha: float, s):
    """
    정규화 주기해 x(ε, s) = cn((1+εα)^{1/2} s, 1/(2(1+εα))) 와 그 도함수

    Returns:
        (x, ẋ) 튜플
    """
    omega, m = _elliptic_data(epsilon * alpha, 1.0)
    sn, cn, dn = jacobi_sncndn(omega * s, m)
    return cn, -omega * sn * dn


def energy_identity(p_star: float = P_STAR, nodes: int = 200) -> Tuple[float, float]:
    """
    ∫₀^{p*/2} ẋ*² ds 와 p*/6 의 쌍

    p_star 를 바꾸면 적분 구간과 기대값이 함께 바뀐다 (결함 주입 검증용).
    """
    points, weights = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * p_star
    s = 0.5 * half * (points + 1.0)
    _, xdot = rescaled_state(0.0, 0.0, s)
    integral = 0.5 * half * float(np.dot(weights, xdot * xdot))
    return integral, p_star / 6.0


def orbit_summary(orbit: PeriodicOrbit) -> dict:
    """표 출력용 요약"""
    return {
        "n": orbit.n,
        "A": orbit.A,
        "p": orbit.p,
        "H": orbit.H,
        "omega": orbit.omega,
        "m": orbit.m,
    }
