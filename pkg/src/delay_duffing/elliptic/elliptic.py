"""
야코비 타원함수와 완전 타원적분 모듈

모든 함수는 파라미터 규약(m = k²)을 사용한다. 모듈러스 k 가 아니다.
예: K(1/2) = 1.8540746773..., 4K(1/2) = 7.4162987...
"""
import math
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from delay_duffing.core.exceptions import EllipticDomainError

ArrayLike = Union[float, np.ndarray]

# AGM 반복 상한 (m < 1 이면 보통 6회 이내로 수렴)
_MAX_AGM_STEPS = 40


class EllipticParameter(BaseModel):
    """타원 파라미터 m = k² (0 ≤ m < 1)"""

    model_config = ConfigDict(frozen=True)

    m: float

    @field_validator("m")
    @classmethod
    def _check_range(cls, value: float) -> float:
        _check_parameter(value)
        return value


def _check_parameter(m: float) -> None:
    if not math.isfinite(m) or not 0.0 <= m < 1.0:
        raise EllipticDomainError(f"타원 파라미터는 [0, 1) 범위여야 합니다: m={m}")


def _as_float(m: Union[float, EllipticParameter]) -> float:
    value = m.m if isinstance(m, EllipticParameter) else float(m)
    _check_parameter(value)
    return value


@lru_cache(maxsize=256)
def _agm_sequence(m: float) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """
    산술-기하 평균 수열 (a_n, c_n) 계산

    a_0 = 1, b_0 = sqrt(1-m), c_0 = sqrt(m) 에서 시작한다.
    """
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_STEPS):
        if c <= 1e-17 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return tuple(a_seq), tuple(c_seq)


def complete_K(m: Union[float, EllipticParameter]) -> float:
    """
    제1종 완전 타원적분 K(m) = ∫₀^{π/2} (1 - m sin²v)^{-1/2} dv

    Args:
        m: 타원 파라미터 (0 ≤ m < 1)

    Returns:
        K(m)
    """
    value = _as_float(m)
    a_seq, _ = _agm_sequence(value)
    return math.pi / (2.0 * a_seq[-1])


def complete_E(m: Union[float, EllipticParameter]) -> float:
    """
    제2종 완전 타원적분 E(m)

    AGM 수열에서 E = K·(1 - Σ 2^{n-1} c_n²) 로 계산한다.
    """
    value = _as_float(m)
    a_seq, c_seq = _agm_sequence(value)
    K = math.pi / (2.0 * a_seq[-1])
    correction = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return K * (1.0 - correction)


def _amplitude_scalar(u: float, m: float) -> float:
    """하강 Landen 변환으로 진폭 φ = am(u, m) 계산 (스칼라)"""
    a_seq, c_seq = _agm_sequence(m)
    N = len(a_seq) - 1
    quarter = math.pi / (2.0 * a_seq[-1])
    u = u - 4.0 * quarter * round(u / (4.0 * quarter))
    phi = (2.0 ** N) * a_seq[N] * u
    for n in range(N, 0, -1):
        ratio = c_seq[n] / a_seq[n] * math.sin(phi)
        phi = 0.5 * (phi + math.asin(max(-1.0, min(1.0, ratio))))
    return phi


def _amplitude_array(u: np.ndarray, m: float) -> np.ndarray:
    """하강 Landen 변환으로 진폭 φ 계산 (배열)"""
    a_seq, c_seq = _agm_sequence(m)
    N = len(a_seq) - 1
    period = 2.0 * math.pi / a_seq[-1]
    u = u - period * np.round(u / period)
    phi = (2.0 ** N) * a_seq[N] * u
    for n in range(N, 0, -1):
        ratio = np.clip(c_seq[n] / a_seq[n] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(ratio))
    return phi


def jacobi_sncndn(u: ArrayLike, m: Union[float, EllipticParameter]):
    """
    야코비 타원함수 (sn, cn, dn) 동시 계산

    u 를 4K(m) 로 축약한 뒤 평가하므로 긴 궤적에서도 정밀도가 유지된다.

    Args:
        u: 인자 (스칼라 또는 numpy 배열)
        m: 타원 파라미터

    Returns:
        (sn, cn, dn) 튜플
    """
    value = _as_float(m)
    if np.ndim(u) == 0:
        phi = _amplitude_scalar(float(u), value)
        sn = math.sin(phi)
        return sn, math.cos(phi), math.sqrt(1.0 - value * sn * sn)

    phi = _amplitude_array(np.asarray(u, dtype=float), value)
    sn = np.sin(phi)
    return sn, np.cos(phi), np.sqrt(1.0 - value * sn * sn)


def cn(u: ArrayLike, m: Union[float, EllipticParameter]) -> ArrayLike:
    """야코비 타원 코사인 cn(u, m)"""
    return jacobi_sncndn(u, m)[1]


def sn_dn(u: ArrayLike, m: Union[float, EllipticParameter]):
    """(sn(u, m), dn(u, m)) 반환"""
    sn, _, dn = jacobi_sncndn(u, m)
    return sn, dn
