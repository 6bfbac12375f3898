"""
Floquet 수치 계산 모듈

정규화된 주기해 x(ε, s) 를 따라 복소 계수 선형화 방정식
    y'' = -(c + 3x²) y,   c = ε(a + (-1)ⁿ b σ)
의 기본해 행렬(Wronski 행렬)을 고정 보폭 RK4 로 적분하고,
반주기 Floquet 특성방정식 μ² - tr W·μ + 1 = 0 을 자기무모순적으로 푼다.
"""
import cmath
import logging
import math
import warnings
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from delay_duffing.core.config import settings
from delay_duffing.core.exceptions import (
    ConvergenceError,
    IllConditionedWarning,
    IntegrationError,
    RootSelectionAmbiguityError,
)
from delay_duffing.floquet.analytic import Parity, eta_star
from delay_duffing.orbit.orbit import (
    P_STAR,
    DuffingParams,
    period_derivative,
    rescaled_period,
    rescaled_state,
    solve_amplitude,
)

logger = logging.getLogger(__name__)

DET_TOLERANCE = 1e-7
DEFAULT_EPSILONS = (1e-2, 5e-3, 2.5e-3)


class WronskiMatrix(BaseModel):
    """W(ε, σ, t1, t0): W(t0) = I 인 선형화 흐름 행렬"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray
    epsilon: float
    sigma: complex
    t1: float
    t0: float

    @property
    def trace(self) -> complex:
        return complex(self.entries[0, 0] + self.entries[1, 1])

    @property
    def det(self) -> complex:
        e = self.entries
        return complex(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])

    def __matmul__(self, other: "WronskiMatrix") -> np.ndarray:
        return self.entries @ other.entries


class CharacteristicSolution(BaseModel):
    """반주기 Floquet 승수 μ 와 σ = (-μ)^{-n}, μ = -1 + √ε·η"""

    model_config = ConfigDict(frozen=True)

    mu: complex
    sigma: complex
    eta: complex
    n: int
    n_effective: float
    epsilon: float
    trace: complex
    iterations: int

    @property
    def stable(self) -> bool:
        """|σ| > 1 이면 안정"""
        return abs(self.sigma) > 1.0

    def exponent(self, T: float) -> float:
        """해밀토니안 편차의 예상 기울기 -log|σ|/T (물리 시간 기준)"""
        return -math.log(abs(self.sigma)) / T

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "mu_re": self.mu.real,
            "mu_im": self.mu.imag,
            "sigma_abs": abs(self.sigma),
            "verdict": "stable" if self.stable else "unstable",
        }


@lru_cache(maxsize=64)
def _orbit_square_grid(epsilon: float, alpha: float, t0: float, t1: float, steps: int) -> Tuple[float, ...]:
    """반보폭 격자 위의 x(ε, s)² (2·steps + 1 개)"""
    s = np.linspace(t0, t1, 2 * steps + 1)
    x, _ = rescaled_state(epsilon, alpha, s)
    return tuple((x * x).tolist())


def _step_count(epsilon: float, alpha: float, t0: float, t1: float, steps: Optional[int]) -> int:
    per_period = steps or settings.wronskian_steps_per_period
    h_target = rescaled_period(epsilon, alpha) / per_period
    return max(1, int(math.ceil(abs(t1 - t0) / h_target - 1e-9)))


def wronskian(epsilon: float,
              sigma: complex,
              alpha: float,
              t1: float,
              t0: float = 0.0,
              signed_b: Optional[float] = None,
              steps: Optional[int] = None) -> WronskiMatrix:
    """
    선형화 방정식의 Wronski 행렬 W(ε, σ, t1, t0)

    두 열을 동시에 고정 보폭 RK4 로 적분한다. 주기해는 적분하지 않고
    닫힌 타원함수 꼴 x(ε, s) = cn((1+εα)^{1/2}s, 1/(2(1+εα))) 로 평가한다.

    Args:
        epsilon: ε = A^{-2} (≥ 0)
        sigma: 복소 파라미터 σ
        alpha: α = a + (-1)ⁿb
        t1: 종료 시각
        t0: 시작 시각
        signed_b: (-1)ⁿb (None 이면 a = 0 으로 보고 alpha 사용)
        steps: 주기당 보폭 수 (None 이면 설정값)

    Returns:
        WronskiMatrix

    Raises:
        IntegrationError: det W 가 1 에서 1e-7 이상 벗어난 경우
    """
    if epsilon < 0.0:
        raise ValueError(f"epsilon 은 0 이상이어야 합니다: {epsilon}")
    if signed_b is None:
        signed_b = alpha
    sigma = complex(sigma)
    coefficient = epsilon * (alpha + signed_b * (sigma - 1.0))

    N = _step_count(epsilon, alpha, t0, t1, steps)
    x2 = _orbit_square_grid(epsilon, alpha, t0, t1, N)
    h = (t1 - t0) / N
    hh = 0.5 * h
    h6 = h / 6.0

    # 두 열 (y, y') 을 동시에 진행
    ya, za = 1.0 + 0j, 0j
    yb, zb = 0j, 1.0 + 0j
    q_next = coefficient + 3.0 * x2[0]
    for i in range(N):
        q0 = q_next
        qm = coefficient + 3.0 * x2[2 * i + 1]
        q_next = coefficient + 3.0 * x2[2 * i + 2]

        k1y, k1z = za, -q0 * ya
        k2y, k2z = za + hh * k1z, -qm * (ya + hh * k1y)
        k3y, k3z = za + hh * k2z, -qm * (ya + hh * k2y)
        k4y, k4z = za + h * k3z, -q_next * (ya + h * k3y)
        ya += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        za += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)

        k1y, k1z = zb, -q0 * yb
        k2y, k2z = zb + hh * k1z, -qm * (yb + hh * k1y)
        k3y, k3z = zb + hh * k2z, -qm * (yb + hh * k2y)
        k4y, k4z = zb + h * k3z, -q_next * (yb + h * k3y)
        yb += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        zb += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)

    matrix = WronskiMatrix(
        entries=np.array([[ya, yb], [za, zb]], dtype=complex),
        epsilon=epsilon,
        sigma=sigma,
        t1=t1,
        t0=t0,
    )
    drift = abs(matrix.det - 1.0)
    if drift > DET_TOLERANCE:
        raise IntegrationError(
            f"Wronski 행렬식이 1 에서 벗어났습니다: |det-1|={drift:.3e} (ε={epsilon}, σ={sigma}, 보폭 {N}개)"
        )
    return matrix


def half_period_trace(epsilon: float, sigma: complex, alpha: float,
                      signed_b: Optional[float] = None, steps: Optional[int] = None) -> complex:
    """tr W(ε, σ, p(ε)/2, 0)"""
    half = 0.5 * rescaled_period(epsilon, alpha)
    return wronskian(epsilon, sigma, alpha, half, 0.0, signed_b=signed_b, steps=steps).trace


def trace_tau(epsilon: float,
              sigma: complex,
              n_parity: Union[Parity, str, int],
              b: float,
              a: float = 0.0,
              steps: Optional[int] = None) -> complex:
    """
    τ(ε, σ) = -(tr W(ε, σ, p(ε)/2, 0) + 2) / (2ε(σ-1))

    Args:
        epsilon: ε > 0
        sigma: σ ≠ 1
        n_parity: n 의 홀짝
        b: 지연 계수
        a: 비지연 선형 계수
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon 은 양수여야 합니다: {epsilon}")
    sigma = complex(sigma)
    if sigma == 1.0:
        raise ValueError("σ = 1 에서는 τ 가 정의되지 않습니다.")
    if abs(sigma - 1.0) < 1e-6:
        message = f"|σ-1| = {abs(sigma - 1.0):.3e} < 1e-6: τ 계산이 불안정할 수 있습니다."
        logger.warning(message)
        warnings.warn(message, IllConditionedWarning, stacklevel=2)
    signed_b = Parity.coerce(n_parity).sign * b
    trace = half_period_trace(epsilon, sigma, a + signed_b, signed_b=signed_b, steps=steps)
    return -(trace + 2.0) / (2.0 * epsilon * (sigma - 1.0))


def extrapolate_tau(sigma: complex,
                    n_parity: Union[Parity, str, int],
                    b: float,
                    a: float = 0.0,
                    epsilons: Sequence[float] = DEFAULT_EPSILONS,
                    steps: Optional[int] = None) -> complex:
    """
    τ(ε, σ) 의 ε → 0 Richardson 외삽

    주어진 ε 들에서 τ 를 계산한 뒤 (len-1) 차 보간 다항식의 ε = 0 값을 돌려준다.
    """
    epsilons = [float(e) for e in epsilons]
    if len(set(epsilons)) != len(epsilons) or len(epsilons) < 2:
        raise ValueError(f"서로 다른 ε 가 2개 이상 필요합니다: {epsilons}")
    values = [trace_tau(e, sigma, n_parity, b, a=a, steps=steps) for e in epsilons]
    degree = len(epsilons) - 1
    taus = np.array(values, dtype=complex)
    real = np.polynomial.Polynomial.fit(epsilons, taus.real, degree)
    imag = np.polynomial.Polynomial.fit(epsilons, taus.imag, degree)
    limit = complex(real(0.0), imag(0.0))
    logger.debug(f"[tau] σ={sigma}, ε={epsilons}, τ={values} → {limit}")
    return limit


def wronskian_closed_form(t: float) -> WronskiMatrix:
    """
    ε = 0 의 닫힌 꼴 W*(t, 0) = [[x + tẋ, -ẋ], [2ẋ + tẍ, -ẍ]] (x = x*(t), ẍ = -x³)

    σ 와 무관하다.
    """
    x, xdot = rescaled_state(0.0, 0.0, t)
    xddot = -x ** 3
    entries = np.array([[x + t * xdot, -xdot], [2.0 * xdot + t * xddot, -xddot]], dtype=complex)
    return WronskiMatrix(entries=entries, epsilon=0.0, sigma=1.0, t1=t, t0=0.0)


def closed_form_half_period() -> WronskiMatrix:
    """W*(p*/2, 0) = [[-1, 0], [p*/2, -1]]"""
    entries = np.array([[-1.0, 0.0], [0.5 * P_STAR, -1.0]], dtype=complex)
    return WronskiMatrix(entries=entries, epsilon=0.0, sigma=1.0, t1=0.5 * P_STAR, t0=0.0)


def half_period_lower_left(epsilon: float, alpha: float) -> float:
    """σ = 1 에서 W(ε, 1, p/2, 0) 의 좌하 성분 -½(1+εα)p_A (p_A 는 정규화 진폭에 대한 주기 도함수)"""
    return -0.5 * (1.0 + epsilon * alpha) * period_derivative(epsilon * alpha, 1.0)


def _sigma_of(mu: complex, n: float) -> complex:
    """σ = (-μ)^{-n} = exp(-n·Log(-μ)), 주 분지 로그"""
    return cmath.exp(-n * cmath.log(-mu))


def solve_characteristic_scaled(epsilon: float,
                                T: float,
                                b: float,
                                n_parity: Union[Parity, str, int],
                                a: float = 0.0,
                                n: Optional[float] = None,
                                tol: Optional[float] = None,
                                max_iter: Optional[int] = None,
                                steps: Optional[int] = None) -> CharacteristicSolution:
    """
    주어진 ε 에서 반주기 특성방정식 풀기

    μ = -1 + √ε·η 로 두면 μ² - tr W·μ + 1 = ε η² - (tr W + 2)μ 이므로
    자명근 η = 0 을 나눠낸 Ψ(η) = η - (tr W(ε, σ(η)) + 2)·μ/(εη) 의 근을
    복소 할선법으로 찾는다. 시작점은 η* 이다.

    Args:
        epsilon: ε > 0
        T: 지연
        b: 지연 계수
        n_parity: n 의 홀짝
        a: 비지연 선형 계수
        n: 반주기 개수 (None 이면 n_eff = 2T/(p(ε)√ε))
        tol: |Δμ| 수렴 기준
        max_iter: 최대 반복 횟수
        steps: Wronskian 주기당 보폭 수
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon 은 양수여야 합니다: {epsilon}")
    tol = settings.characteristic_tol if tol is None else tol
    max_iter = settings.characteristic_max_iter if max_iter is None else max_iter
    parity = Parity.coerce(n_parity)
    signed_b = parity.sign * b
    alpha = a + signed_b
    root_eps = math.sqrt(epsilon)
    half = 0.5 * rescaled_period(epsilon, alpha)
    n_eff = 2.0 * T / (2.0 * half * root_eps) if n is None else float(n)
    n_label = max(1, int(round(n_eff)))

    def trace_at(eta: complex) -> complex:
        mu = -1.0 + root_eps * eta
        sigma = _sigma_of(mu, n_eff)
        return wronskian(epsilon, sigma, alpha, half, 0.0, signed_b=signed_b, steps=steps).trace

    def psi(eta: complex) -> complex:
        mu = -1.0 + root_eps * eta
        return eta - (trace_at(eta) + 2.0) * mu / (epsilon * eta)

    # ε = 0 근사값 η* 에서 출발
    eta_prev = complex(eta_star(DuffingParams(a=a, b=b, T=T), 2 if parity is Parity.EVEN else 1))
    if abs(eta_prev) == 0.0:
        eta_prev = 1e-3 + 0j
    eta_curr = eta_prev * (1.0 + 1e-3) + 1e-6
    psi_prev, psi_curr = psi(eta_prev), psi(eta_curr)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        denominator = psi_curr - psi_prev
        if denominator == 0.0:
            break
        eta_next = eta_curr - psi_curr * (eta_curr - eta_prev) / denominator
        if abs(eta_next) < 1e-12:
            # 자명근 μ = -1 로의 붕괴 방지
            eta_next = 0.5 * eta_curr
        delta_mu = root_eps * abs(eta_next - eta_curr)
        logger.debug(f"[characteristic] iter={iterations} η={eta_next} |Δμ|={delta_mu:.3e}")
        eta_prev, psi_prev = eta_curr, psi_curr
        eta_curr = eta_next
        if delta_mu < tol:
            break
        psi_curr = psi(eta_curr)
    else:
        raise ConvergenceError(
            f"특성방정식 반복이 수렴하지 않았습니다: ε={epsilon}, T={T}, n={n_eff:.6g}",
            diagnostics={"eta": eta_curr, "iterations": iterations},
        )
    if root_eps * abs(eta_curr - eta_prev) >= tol:
        raise ConvergenceError(
            f"특성방정식 할선법이 정체되었습니다: ε={epsilon}, T={T}, n={n_eff:.6g}",
            diagnostics={"eta": eta_curr, "iterations": iterations},
        )

    mu = -1.0 + root_eps * eta_curr
    if abs(mu - 1.0 / mu) < 1e-6:
        raise RootSelectionAmbiguityError(
            f"특성방정식의 두 근이 구분되지 않습니다: μ={mu}",
            diagnostics={"mu": mu, "epsilon": epsilon},
        )
    sigma = _sigma_of(mu, n_eff)
    trace = trace_at(eta_curr)
    logger.info(f"특성방정식 해: n={n_eff:.6g}, ε={epsilon:.3e}, μ={mu:.12g}, |σ|={abs(sigma):.12g}")
    return CharacteristicSolution(
        mu=mu,
        sigma=sigma,
        eta=eta_curr,
        n=n_label,
        n_effective=n_eff,
        epsilon=epsilon,
        trace=trace,
        iterations=iterations,
    )


def solve_characteristic(params: DuffingParams, n: int,
                         tol: Optional[float] = None,
                         max_iter: Optional[int] = None,
                         steps: Optional[int] = None) -> CharacteristicSolution:
    """
    주기해 x_n 의 반주기 Floquet 승수

    ε = A_n^{-2} 로 두고 solve_characteristic_scaled 에 위임한다.
    """
    orbit = solve_amplitude(params, n)
    return solve_characteristic_scaled(
        orbit.epsilon, params.T, params.b, Parity.of_n(n), a=params.a, n=n,
        tol=tol, max_iter=max_iter, steps=steps,
    )
