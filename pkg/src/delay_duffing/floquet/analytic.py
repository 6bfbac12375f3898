"""
Floquet 해석식 모듈

ε → 0 극한의 닫힌 꼴 결과들: τ*, η*, σ*(T), 안정성 판정, 토러스 경계,
Pyragas 제어 매핑, 지연 복제
"""
import cmath
import logging
import math
from enum import Enum
from typing import Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from delay_duffing.core.exceptions import ConvergenceError, NoRootError, OutOfRangeError
from delay_duffing.orbit.orbit import P_STAR, DuffingParams, parity_sign

logger = logging.getLogger(__name__)

# 안정 조건 (-1)^{n+1} b T² < (3/2)π² 의 우변
STABILITY_BOUNDARY = 1.5 * math.pi ** 2

# 이 차수 미만은 점근 영역 밖으로 표시 (경험적 기준)
ASYMPTOTIC_MIN_ORDER = 5

_SERIES_RADIUS = 1e-4


class Parity(str, Enum):
    """n 의 홀짝"""

    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        """(-1)ⁿ"""
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def of_n(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD

    @classmethod
    def coerce(cls, value: Union["Parity", str, int]) -> "Parity":
        """Parity, "even"/"odd" 문자열, 또는 정수 n 을 Parity 로 변환"""
        if isinstance(value, Parity):
            return value
        if isinstance(value, int):
            return cls.of_n(value)
        return cls(str(value).lower())


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    BEYOND_VALIDITY = "beyond-validity"


class StabilityVerdict(BaseModel):
    """안정성 판정 결과"""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    n: int
    T: float
    b: float
    n_parity: Parity
    condition_value: float
    boundary: float = STABILITY_BOUNDARY
    predicted_exponent: float
    asymptotic: bool

    def as_row(self) -> dict:
        return {
            "T": self.T,
            "n": self.n,
            "b": self.b,
            "verdict": self.verdict.value,
            "condition_value": self.condition_value,
            "predicted_exponent": self.predicted_exponent,
        }


class TorusBoundary(BaseModel):
    """토러스 분기 경계 (없으면 T, omega 가 None)"""

    model_config = ConfigDict(frozen=True)

    k: int
    T: Optional[float]
    omega: Optional[float]


def tau_star(b: float, n_parity: Union[Parity, str, int]) -> float:
    """
    σ 에 무관한 극한 계수 τ* = -(1/24) p*² (-1)ⁿ b

    Args:
        b: 지연 계수
        n_parity: n 의 홀짝 (또는 n 자체)
    """
    return -P_STAR ** 2 * Parity.coerce(n_parity).sign * b / 24.0


def _h(z: complex) -> complex:
    """h(z) = (e^z - 1)/z, h(0) = 1"""
    if abs(z) < _SERIES_RADIUS:
        return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720))))
    return (cmath.exp(z) - 1.0) / z


def _h_prime(z: complex) -> complex:
    if abs(z) < _SERIES_RADIUS:
        return 1.0 / 2 + z * (1.0 / 3 + z * (1.0 / 8 + z * (1.0 / 30 + z * (1.0 / 144 + z / 840))))
    ez = cmath.exp(z)
    return (z * ez - ez + 1.0) / (z * z)


def _newton(kappa: float, seed: complex, tol: float, max_iter: int) -> Optional[complex]:
    """z = κh(z) 의 Newton 반복. 수렴 실패 시 None"""
    z = seed
    for _ in range(max_iter):
        residual = z - kappa * _h(z)
        slope = 1.0 - kappa * _h_prime(z)
        if slope == 0.0:
            return None
        step = residual / slope
        z -= step
        if not cmath.isfinite(z) or abs(z) > 1e3:
            return None
        if abs(step) <= tol * max(1.0, abs(z)):
            return z
    return None


def scaled_exponent_root(kappa: float, tol: float = 1e-15, max_iter: int = 100) -> complex:
    """
    z = κ h(z) 의 비자명 근 (Im z ≥ 0 으로 정규화)

    실수 초기값 κ 를 먼저 시도하고, 실근이 없으면 복소 초기값으로 넘어간다.
    """
    if kappa == 0.0:
        raise NoRootError("κ = 0: 비자명 근이 없습니다 (자명근 z = 0 으로 수렴)")
    spread = math.sqrt(2.0 * abs(kappa))
    seeds = (complex(kappa, 0.0), complex(0.25 * kappa, spread), complex(1.0, spread))
    for seed in seeds:
        z = _newton(kappa, seed, tol, max_iter)
        if z is None:
            logger.debug(f"[eta_star] κ={kappa:.6g}, seed={seed} 수렴 실패")
            continue
        if abs(z) < 1e-300:
            continue
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        return z.conjugate() if z.imag < 0.0 else z
    raise ConvergenceError(
        f"z = κh(z) 의 Newton 반복이 수렴하지 않았습니다: κ={kappa}",
        diagnostics={"kappa": kappa, "seeds": [str(s) for s in seeds]},
    )


def _kappa(params: DuffingParams, n: int) -> float:
    """κ = 2τ*(2T/p*)² = -(1/3)(-1)ⁿ b T²"""
    return 2.0 * tau_star(params.b, n) * (2.0 * params.T / P_STAR) ** 2


def eta_star(params: DuffingParams, n: int) -> complex:
    """
    ε = 0 극한의 스케일 지수 η*

    η = (2T/p*)·2τ*·h((2T/p*)η) 를 z = (2T/p*)η 로 바꿔 z = κh(z) 를 푼다.
    z 로 나눠 자명근 η = 0 을 제거한 형태이다.

    Args:
        params: 진동자 계수
        n: 반주기 개수

    Returns:
        η* (복소수, Im ≥ 0)
    """
    z = scaled_exponent_root(_kappa(params, n))
    return z * P_STAR / (2.0 * params.T)


def sigma_star(params: DuffingParams, n: int) -> complex:
    """σ* = exp((2T/p*)η*)"""
    z = scaled_exponent_root(_kappa(params, n))
    return cmath.exp(z)


def classify(params: DuffingParams, n: int) -> StabilityVerdict:
    """
    빠른 진동 주기해 x_n 의 선형 안정성 판정

    (-1)ⁿb > 0 이면 불안정, (-1)ⁿb < 0 이고 (-1)^{n+1}bT² < (3/2)π² 이면 안정,
    그 외는 점근 결과의 유효 범위 밖이다.
    """
    if params.b == 0.0:
        raise OutOfRangeError("b = 0 이면 지연 항이 없어 판정할 수 없습니다.")
    if n < 1:
        raise ValueError(f"n 은 양의 정수여야 합니다: n={n}")
    signed_b = parity_sign(n) * params.b
    condition = -signed_b * params.T ** 2
    if signed_b > 0.0:
        verdict = Verdict.UNSTABLE
    elif condition < STABILITY_BOUNDARY:
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.BEYOND_VALIDITY
    return StabilityVerdict(
        verdict=verdict,
        n=n,
        T=params.T,
        b=params.b,
        n_parity=Parity.of_n(n),
        condition_value=condition,
        predicted_exponent=signed_b * params.T / 3.0,
        asymptotic=n >= ASYMPTOTIC_MIN_ORDER,
    )


def torus_boundary(b: float, n_parity: Union[Parity, str, int], k: int = 1) -> TorusBoundary:
    """
    토러스 분기 경계 T = kπ·sqrt(3/(2(-1)^{n+1}b)) 와 경계 진동수 ω = sqrt(4τ*)

    근호 안이 양수가 아니면 T, ω 모두 None.
    """
    if b == 0.0:
        raise OutOfRangeError("b = 0 이면 토러스 경계가 정의되지 않습니다.")
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k 는 양의 홀수여야 합니다: k={k}")
    parity = Parity.coerce(n_parity)
    feedback = -parity.sign * b
    if feedback <= 0.0:
        return TorusBoundary(k=k, T=None, omega=None)
    return TorusBoundary(
        k=k,
        T=k * math.pi * math.sqrt(3.0 / (2.0 * feedback)),
        omega=math.sqrt(4.0 * tau_star(b, parity)),
    )


# 대표 임계 지연 (b=1, n 홀수, k=1): sqrt(3/2)·π
T_CRIT = torus_boundary(1.0, Parity.ODD).T


def pyragas_map(alpha_physical: float, kappa: float, n: int) -> Tuple[float, float]:
    """
    Pyragas 제어 u = κ(x - (-1)ⁿx(t-T)) 를 (a, b) 계수로 변환

    Returns:
        (a, b) = (α - κ, (-1)ⁿκ)
    """
    return alpha_physical - kappa, parity_sign(n) * kappa


def pyragas_classify(alpha_physical: float, kappa: float, T: float, n: int) -> StabilityVerdict:
    """Pyragas 제어 계수로 바로 판정 (판정은 κ 의 부호와 -κT² 경계에만 의존)"""
    a, b = pyragas_map(alpha_physical, kappa, n)
    return classify(DuffingParams(a=a, b=b, T=T), n)


def replicate_delays(T: float, n: int, k: int) -> Tuple[float, int]:
    """
    지연 복제 T̃ = T(1 + 2k/n), ñ = n + 2k

    ñ 의 홀짝은 n 과 같다.
    """
    if n < 1:
        raise ValueError(f"n 은 양의 정수여야 합니다: n={n}")
    if 2 * k < -n or n + 2 * k < 1:
        raise OutOfRangeError(f"k 범위 위반 (k ≥ -n/2, n+2k ≥ 1): n={n}, k={k}")
    return T * (1.0 + 2.0 * k / n), n + 2 * k


def classify_replicated(params: DuffingParams, n: int, k: int) -> StabilityVerdict:
    """복제된 지연 (T̃, ñ) 에 대한 판정. 조건은 (-1)^{n+1} b ν² T² < (3/2)π², ν = ñ/n"""
    T_tilde, n_tilde = replicate_delays(params.T, n, k)
    return classify(DuffingParams(a=params.a, b=params.b, T=T_tilde), n_tilde)
