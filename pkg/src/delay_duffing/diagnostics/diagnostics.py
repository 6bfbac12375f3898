"""
궤적 후처리 모듈

해밀토니안 추적, 로그 기울기 기반 Floquet 지수 추정, 토러스 진동 감지
"""
import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from sklearn.linear_model import LinearRegression

from delay_duffing.core.config import settings
from delay_duffing.core.csv_io import write_table
from delay_duffing.core.exceptions import InsufficientDataError, NoExponentialRegimeError
from delay_duffing.dde.integrator import Trajectory, evaluate_many, sample
from delay_duffing.orbit.orbit import PeriodicOrbit, hamiltonian

logger = logging.getLogger(__name__)


class HamiltonianSeries(BaseModel):
    """상대 에너지 편차 (H(t) - H_ref)/H_ref 시계열"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    deviation: np.ndarray
    H_ref: float
    period: Optional[float] = None
    delay: Optional[float] = None

    def export_csv(self, path, provenance: Optional[dict] = None):
        info = {"H_ref": self.H_ref, "period": self.period, "delay": self.delay}
        info.update(provenance or {})
        return write_table(path, "hamiltonian", ["t", "deviation"], zip(self.t, self.deviation), info)


class SlopeFit(BaseModel):
    """log|편차| 최소제곱 직선"""

    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    window: Tuple[float, float]
    residual_rms: float
    n_points: int
    regime: str
    plateau: float = 0.0

    def as_row(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "t_lo": self.window[0],
            "t_hi": self.window[1],
            "residual_rms": self.residual_rms,
            "n_points": self.n_points,
            "regime": self.regime,
            "plateau": self.plateau,
        }


class TorusReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    sustained: bool
    oscillation_period: float
    relative_amplitude: float
    transient_end: float


def track_hamiltonian(traj: Trajectory, orbit: PeriodicOrbit,
                      sample_dt: Optional[float] = None) -> HamiltonianSeries:
    """
    궤적의 상대 에너지 편차 계산

    Args:
        traj: 적분 결과
        orbit: 기준 주기해 (α 와 H_n 제공)
        sample_dt: 표본 간격 (None 이면 설정값)
    """
    sample_dt = settings.sample_dt if sample_dt is None else sample_dt
    if not sample_dt > 0.0:
        raise ValueError(f"sample_dt 는 양수여야 합니다: {sample_dt}")
    ts = sample(traj, sample_dt)
    x, v = evaluate_many(traj, ts)
    H = hamiltonian(orbit.alpha, x, v)
    return HamiltonianSeries(
        t=ts,
        deviation=(H - orbit.H) / orbit.H,
        H_ref=orbit.H,
        period=orbit.p,
        delay=traj.delay,
    )


def _block_envelope(t: np.ndarray, values: np.ndarray, block: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    """주기 길이 블록마다 |값| 의 최댓값 (블록 중심 시각)"""
    magnitude = np.abs(values)
    if block is None or t.size < 2:
        return t, magnitude
    dt = float(np.median(np.diff(t)))
    width = max(1, int(round(block / dt)))
    count = magnitude.size // width
    if count == 0:
        return t, magnitude
    trimmed = magnitude[: count * width].reshape(count, width)
    centers = t[: count * width].reshape(count, width).mean(axis=1)
    return centers, trimmed.max(axis=1)


def _transient_end(series: HamiltonianSeries) -> float:
    """과도 구간 끝: 전체 길이의 10% 와 max(3·지연, 3·주기) 중 이른 쪽"""
    skip = 0.1 * float(series.t[-1] - series.t[0])
    scales = [3.0 * s for s in (series.delay, series.period) if s]
    if scales:
        skip = min(skip, max(scales))
    return float(series.t[0]) + skip


def _tail_plateau(deviation: np.ndarray, fraction: float = 0.1) -> Tuple[float, float]:
    """
    마지막 구간의 (평탄부, 잡음 바닥)

    꼬리 앞뒤 절반의 평균이 20% 이내로 같으면 꼬리 평균을 수치 오차 평탄부로 본다.
    잡음 바닥은 꼬리 평균에 대한 RMS 이다.
    """
    count = max(4, int(fraction * deviation.size))
    tail = deviation[-count:]
    first = float(tail[: count // 2].mean())
    second = float(tail[count // 2:].mean())
    mean = float(tail.mean())
    flat = abs(second - first) <= 0.2 * max(abs(first), abs(second))
    floor = float(np.sqrt(np.mean((tail - mean) ** 2)))
    return (mean if flat else 0.0), floor


def fit_exponent(series: HamiltonianSeries,
                 min_points: int = 10,
                 max_residual: float = 0.5) -> SlopeFit:
    """
    log|편차 - 평탄부| 의 최소제곱 기울기로 Floquet 지수 추정

    주기가 있으면 주기 블록 최댓값(포락선)에 맞추므로 min_points 는 창에 들어갈
    최소 주기 수가 된다.

    창 선택 규칙:
      1. 과도 구간 (전체의 10% 와 지연·주기 3배 중 짧은 쪽) 을 버린다.
      2. 앞뒤 사분위 중앙값 비교로 감쇠/성장 구간을 판별한다.
      3. 성장: 포락선이 min(0.5, 포화 수준의 1/4) 을 처음 넘기 전까지만 사용한다.
         포화 수준은 포락선 최댓값 (이웃 주기해 에너지까지의 거리) 이다.
      4. 감쇠: 꼬리가 평탄하면 그 평균을 수치 오차 평탄부로 빼고,
         포락선이 최댓값의 절반 아래로 내려간 뒤 잡음 바닥의 20배 이상인 점만 사용한다.

    Raises:
        NoExponentialRegimeError: 남은 점이 부족하거나 잔차 RMS 가 max_residual 초과
    """
    keep = series.t >= _transient_end(series)
    t_raw, raw = series.t[keep], series.deviation[keep]
    t, envelope = _block_envelope(t_raw, raw, series.period)
    if t.size < min_points:
        raise NoExponentialRegimeError(f"과도 구간 제거 후 점이 부족합니다: {t.size}개")

    quarter = max(1, t.size // 4)
    head = float(np.median(envelope[:quarter]))
    tail = float(np.median(envelope[-quarter:]))
    growing = tail > head

    plateau = 0.0
    mask = np.zeros(envelope.size, dtype=bool)
    if growing:
        cap = min(0.5, 0.25 * float(envelope.max()))
        exceed = np.nonzero(envelope > cap)[0]
        mask[: int(exceed[0]) if exceed.size else envelope.size] = True
        regime = "growth"
    else:
        plateau, floor = _tail_plateau(series.deviation)
        if plateau != 0.0:
            t, envelope = _block_envelope(t_raw, raw - plateau, series.period)
            mask = np.zeros(envelope.size, dtype=bool)
        exceed = np.nonzero(envelope > 0.5 * float(envelope.max()))[0]
        mask[int(exceed[-1]) + 1 if exceed.size else 0:] = True
        mask &= envelope > 20.0 * floor
        regime = "decay"
    mask &= envelope > 0.0

    if mask.sum() < min_points:
        raise NoExponentialRegimeError(
            f"지수 구간의 점이 부족합니다 ({regime}): {int(mask.sum())}개 < {min_points}개"
        )

    t_fit = t[mask]
    log_values = np.log(envelope[mask])
    model = LinearRegression()
    model.fit(t_fit.reshape(-1, 1), log_values)
    residual = log_values - model.predict(t_fit.reshape(-1, 1))
    residual_rms = float(np.sqrt(np.mean(residual ** 2)))
    slope = float(model.coef_[0])
    logger.info(
        f"기울기 추정: {slope:.6g} ({regime}, 창 [{t_fit[0]:.4g}, {t_fit[-1]:.4g}], "
        f"{t_fit.size}점, 평탄부 {plateau:.3g}, 잔차 RMS {residual_rms:.3g})"
    )
    if residual_rms > max_residual:
        raise NoExponentialRegimeError(f"로그 잔차 RMS 가 너무 큽니다: {residual_rms:.3g} > {max_residual}")
    return SlopeFit(
        slope=slope,
        intercept=float(model.intercept_),
        window=(float(t_fit[0]), float(t_fit[-1])),
        residual_rms=residual_rms,
        n_points=int(t_fit.size),
        regime=regime,
        plateau=plateau,
    )


def _moving_average(values: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return values
    kernel = np.ones(width) / width
    return np.convolve(values, kernel, mode="valid")


def _zero_crossings(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    """선형 보간한 부호 변화 시각"""
    signs = np.signbit(values)
    idx = np.nonzero(signs[:-1] != signs[1:])[0]
    v0, v1 = values[idx], values[idx + 1]
    return t[idx] - v0 * (t[idx + 1] - t[idx]) / (v1 - v0)


def detect_torus(series: HamiltonianSeries,
                 T: float,
                 amplitude_tolerance: float = 0.1,
                 min_amplitude: float = 1e-3) -> TorusReport:
    """
    느린 주기 진동(토러스) 감지

    주기해 주기로 이동평균해 빠른 진동을 걸러낸 뒤, 마지막 두 동일 길이 창의
    진폭 (max-min)/2 이 10% 이내로 같고 min_amplitude 이상이면 지속 진동으로 본다.
    주기는 평균 제거 후 영점 교차 간격의 2배로 추정한다.

    Args:
        series: 편차 시계열
        T: 지연 (예상 느린 주기 ≈ 2T)
    """
    slow_period = 2.0 * T
    duration = float(series.t[-1] - series.t[0])
    if duration < 20.0 * slow_period:
        raise InsufficientDataError(
            f"시계열이 너무 짧습니다: 길이 {duration:.4g} < 20·(2T) = {20.0 * slow_period:.4g}"
        )

    dt = float(np.median(np.diff(series.t)))
    width = int(round(series.period / dt)) if series.period else 1
    smooth = _moving_average(series.deviation, width)
    t = series.t[: smooth.size] + 0.5 * (width - 1) * dt

    # 과도 구간 끝: 느린 주기 블록 극값 폭이 이후 계속 10% 이내로 유지되는 첫 시각
    block = max(2, int(round(slow_period / dt)))
    count = smooth.size // block
    blocks = smooth[: count * block].reshape(count, block)
    spans = blocks.max(axis=1) - blocks.min(axis=1)
    transient_index = count - 1
    for i in range(count - 1):
        rest = spans[i:]
        if rest.max() <= (1.0 + amplitude_tolerance) * rest.min():
            transient_index = i
            break
    transient_end = float(t[transient_index * block])

    late = smooth[smooth.size - 2 * (smooth.size // 4):]
    first, second = late[: late.size // 2], late[late.size // 2:]
    amp_first = 0.5 * float(first.max() - first.min())
    amp_second = 0.5 * float(second.max() - second.min())
    stable_amplitude = abs(amp_second - amp_first) <= amplitude_tolerance * max(amp_first, amp_second)
    sustained = stable_amplitude and amp_second > min_amplitude

    period = 0.0
    if sustained:
        t_late = t[t.size - late.size:]
        crossings = _zero_crossings(t_late, late - late.mean())
        if crossings.size >= 3:
            period = 2.0 * float(np.mean(np.diff(crossings)))
        else:
            sustained = False
    relative_amplitude = amp_second if sustained else 0.0
    logger.info(
        f"토러스 감지: sustained={sustained}, 주기={period:.6g} (2T={slow_period:.6g}), "
        f"진폭={amp_second:.4g}, 과도 구간 끝={transient_end:.4g}"
    )
    return TorusReport(
        sustained=sustained,
        oscillation_period=period,
        relative_amplitude=relative_amplitude,
        transient_end=transient_end,
    )
