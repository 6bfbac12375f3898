"""
지연 Duffing 방정식 적분 모듈

x''(t) + a x(t) + b x(t-T) + x(t)³ = 0 를 (x, v) 1계 계로 바꿔
Bogacki-Shampine 3(2) 내장쌍(FSAL)으로 적분한다 (method of steps).
지연값 x(t-T) 는 누적된 격자점의 3차 Hermite 보간(dense output)으로 얻고,
t-T < 0 이면 이력 함수를 직접 평가한다.
"""
import logging
import math
from array import array
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator
from scipy.interpolate import CubicHermiteSpline

from delay_duffing.core.config import settings
from delay_duffing.core.csv_io import write_table
from delay_duffing.core.exceptions import (
    BlowUpError,
    IntegrationError,
    OutOfRangeError,
    StepSizeUnderflowError,
)
from delay_duffing.dde.history import HistoryFunction
from delay_duffing.orbit.orbit import DuffingParams, hamiltonian

logger = logging.getLogger(__name__)

# Bogacki-Shampine 3(2) 계수
_C2, _C3 = 0.5, 0.75
_B1, _B2, _B3 = 2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0
_E1, _E2, _E3, _E4 = -5.0 / 72.0, 1.0 / 12.0, 1.0 / 9.0, -1.0 / 8.0

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_COMPACT_EVERY = 1 << 16


class IntegratorOptions(BaseModel):
    """적분기 옵션"""

    model_config = ConfigDict(frozen=True)

    max_step: float = Field(default_factory=lambda: settings.max_step)
    rtol: float = Field(default_factory=lambda: settings.rtol)
    atol: float = Field(default_factory=lambda: settings.atol)
    history_stride: int = Field(default_factory=lambda: settings.history_stride)
    first_step: Optional[float] = None
    blowup_threshold: float = 1e8

    @field_validator("max_step", "rtol", "atol", "blowup_threshold")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError(f"양수여야 합니다: {value}")
        return value

    @field_validator("history_stride")
    @classmethod
    def _stride(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"history_stride 는 1 이상이어야 합니다: {value}")
        return value


class Trajectory(BaseModel):
    """
    적분 결과 궤적

    격자점마다 (t, x, v, v') 를 저장하며, 인접 격자점 사이의 값은
    3차 Hermite 보간으로 복원한다. t < 0 은 이력 함수가 담당한다.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: DuffingParams
    history: HistoryFunction
    t_end: float
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    acc: np.ndarray
    steps_accepted: int
    steps_rejected: int
    options: IntegratorOptions

    _dense: Optional[Tuple[CubicHermiteSpline, CubicHermiteSpline]] = PrivateAttr(default=None)

    @property
    def delay(self) -> float:
        return self.params.T

    def provenance(self) -> Dict[str, Any]:
        info = {
            "a": self.params.a,
            "b": self.params.b,
            "T": self.params.T,
            "t_end": self.t_end,
            "max_step": self.options.max_step,
            "rtol": self.options.rtol,
            "atol": self.options.atol,
            "history_stride": self.options.history_stride,
            "steps_accepted": self.steps_accepted,
            "steps_rejected": self.steps_rejected,
        }
        info.update(self.history.describe())
        return info

    def dense_output(self) -> Tuple[CubicHermiteSpline, CubicHermiteSpline]:
        """(x, v) 와 (v, v') 격자점의 3차 Hermite 보간 (첫 호출 때 만든다)"""
        if self._dense is None:
            self._dense = (
                CubicHermiteSpline(self.times, self.x, self.v),
                CubicHermiteSpline(self.times, self.v, self.acc),
            )
        return self._dense


def _hermite(t0: float, t1: float, y0: float, d0: float, y1: float, d1: float, t: float) -> float:
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    return ((2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1)


def integrate(params: DuffingParams,
              history: HistoryFunction,
              t_end: float,
              options: Optional[IntegratorOptions] = None) -> Trajectory:
    """
    [0, t_end] 구간에서 지연 Duffing 방정식 적분

    Args:
        params: 진동자 계수 (a, b, T)
        history: [-T, 0] 이력 함수
        t_end: 적분 종료 시각 (> 0)
        options: 적분기 옵션 (None 이면 설정값 사용)

    Returns:
        Trajectory

    Raises:
        BlowUpError: 해가 유한 시간에 발산한 경우
        StepSizeUnderflowError: 보폭이 부동소수점 한계 아래로 줄어든 경우
    """
    opts = options or IntegratorOptions()
    T = params.T
    a, b = params.a, params.b
    if not t_end > 0.0:
        raise ValueError(f"t_end 는 양수여야 합니다: t_end={t_end}")
    if not opts.max_step < T:
        raise IntegrationError(f"max_step 은 지연보다 작아야 합니다: max_step={opts.max_step}, T={T}")
    if not history.covers(-T, 0.0):
        raise IntegrationError(f"이력 함수가 [-T, 0] 구간을 덮지 않습니다: T={T}")

    max_step, rtol, atol = opts.max_step, opts.rtol, opts.atol
    stride = opts.history_stride
    blowup = opts.blowup_threshold
    window = T + 2.0 * max_step
    history_x = history.position

    ts, xs, vs, accs = array("d"), array("d"), array("d"), array("d")
    archive: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
    pointer = 0

    def delayed_x(s: float) -> float:
        nonlocal pointer
        if s <= 0.0:
            return history_x(s)
        last = len(ts) - 1
        while pointer > 0 and ts[pointer] > s:
            pointer -= 1
        while pointer + 1 < last and ts[pointer + 1] <= s:
            pointer += 1
        i = pointer
        return _hermite(ts[i], ts[i + 1], xs[i], vs[i], xs[i + 1], vs[i + 1], s)

    t = 0.0
    x, v = history.state(0.0)
    x, v = float(x), float(v)
    acc = -a * x - b * history_x(-T) - x * x * x
    ts.append(t)
    xs.append(x)
    vs.append(v)
    accs.append(acc)

    h = opts.first_step if opts.first_step is not None else min(max_step, 0.01 * T, t_end)
    h = min(h, max_step)
    accepted = rejected = 0
    next_compact = _COMPACT_EVERY
    end_slack = 1e-12 * max(1.0, t_end)

    logger.info(f"DDE 적분 시작: a={a}, b={b}, T={T}, t_end={t_end}, max_step={max_step}")
    while t < t_end:
        if h < 16.0 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StepSizeUnderflowError(f"보폭이 너무 작아졌습니다: t={t:.17g}, h={h:.3e}")
        if t + h > t_end - end_slack:
            h = t_end - t

        k1x, k1v = v, acc
        x2 = x + _C2 * h * k1x
        v2 = v + _C2 * h * k1v
        k2x = v2
        k2v = -a * x2 - b * delayed_x(t + _C2 * h - T) - x2 * x2 * x2
        x3 = x + _C3 * h * k2x
        v3 = v + _C3 * h * k2v
        k3x = v3
        k3v = -a * x3 - b * delayed_x(t + _C3 * h - T) - x3 * x3 * x3
        x_new = x + h * (_B1 * k1x + _B2 * k2x + _B3 * k3x)
        v_new = v + h * (_B1 * k1v + _B2 * k2v + _B3 * k3v)
        if not (math.isfinite(x_new) and math.isfinite(v_new)) or abs(x_new) > blowup:
            raise BlowUpError(f"해가 발산했습니다: t≈{t + h:.6g}", blowup_time=t + h)
        k4x = v_new
        k4v = -a * x_new - b * delayed_x(t + h - T) - x_new * x_new * x_new

        err_x = h * (_E1 * k1x + _E2 * k2x + _E3 * k3x + _E4 * k4x)
        err_v = h * (_E1 * k1v + _E2 * k2v + _E3 * k3v + _E4 * k4v)
        ratio_x = err_x / (atol + rtol * max(abs(x), abs(x_new)))
        ratio_v = err_v / (atol + rtol * max(abs(v), abs(v_new)))
        # ** 연산은 OverflowError 를 내므로 곱셈으로 계산 (overflow 시 inf)
        err = math.sqrt(0.5 * (ratio_x * ratio_x + ratio_v * ratio_v))

        if err <= 1.0:
            t = t_end if t_end - (t + h) <= end_slack else t + h
            x, v, acc = x_new, v_new, k4v
            ts.append(t)
            xs.append(x)
            vs.append(v)
            accs.append(acc)
            accepted += 1
            factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err ** (-1.0 / 3.0))
            h = min(max_step, h * max(1.0, factor))
            if stride > 1 and len(ts) > next_compact:
                pointer = _compact(ts, xs, vs, accs, archive, t - window, stride, pointer)
                next_compact = len(ts) + _COMPACT_EVERY
        else:
            rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / 3.0))

    logger.info(f"DDE 적분 완료: 채택 {accepted}회, 기각 {rejected}회")
    chunks = archive + [(np.array(ts), np.array(xs), np.array(vs), np.array(accs))]
    return Trajectory(
        params=params,
        history=history,
        t_end=t_end,
        times=np.concatenate([c[0] for c in chunks]),
        x=np.concatenate([c[1] for c in chunks]),
        v=np.concatenate([c[2] for c in chunks]),
        acc=np.concatenate([c[3] for c in chunks]),
        steps_accepted=accepted,
        steps_rejected=rejected,
        options=opts,
    )


def _compact(ts: array, xs: array, vs: array, accs: array,
             archive: list, keep_from: float, stride: int, pointer: int) -> int:
    """지연 창 밖의 오래된 격자점을 stride 간격으로 솎아 archive 로 옮긴다"""
    cut = int(np.searchsorted(np.array(ts), keep_from, side="right")) - 1
    if cut <= 1:
        return pointer
    keep = np.arange(0, cut, stride)
    if keep[-1] != cut - 1:
        keep = np.append(keep, cut - 1)
    archive.append(tuple(np.array(buf[:cut])[keep] for buf in (ts, xs, vs, accs)))
    for buf in (ts, xs, vs, accs):
        del buf[:cut]
    return max(0, pointer - cut)


def _check_range(trajectory: Trajectory, t_min: float, t_max: float) -> None:
    lower = -trajectory.delay
    slack = 1e-12 * max(1.0, trajectory.t_end)
    if t_min < lower - slack or t_max > trajectory.t_end + slack:
        raise OutOfRangeError(
            f"평가 시각이 [{lower}, {trajectory.t_end}] 범위를 벗어났습니다: [{t_min}, {t_max}]"
        )


def _interpolate(trajectory: Trajectory, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """t ≥ 0 에서 (x, v, v') 보간"""
    position, velocity = trajectory.dense_output()
    return position(t), velocity(t), velocity(t, 1)


def evaluate_many(trajectory: Trajectory, ts) -> Tuple[np.ndarray, np.ndarray]:
    """
    여러 시각에서 (x, x') 평가

    t < 0 은 이력 함수로, 격자점과 정확히 일치하는 시각은 저장값 그대로 돌려준다.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size == 0:
        return np.empty(0), np.empty(0)
    _check_range(trajectory, float(ts.min()), float(ts.max()))
    x = np.empty_like(ts)
    v = np.empty_like(ts)
    past = ts < 0.0
    if past.any():
        hx, hv = trajectory.history.state(ts[past])
        x[past], v[past] = hx, hv
    now = ~past
    if now.any():
        t_now = np.minimum(ts[now], trajectory.times[-1])
        ix, iv, _ = _interpolate(trajectory, t_now)
        idx = np.searchsorted(trajectory.times, t_now)
        idx = np.minimum(idx, len(trajectory.times) - 1)
        exact = trajectory.times[idx] == t_now
        ix[exact] = trajectory.x[idx[exact]]
        iv[exact] = trajectory.v[idx[exact]]
        x[now], v[now] = ix, iv
    return x, v


def evaluate(trajectory: Trajectory, t: float) -> Tuple[float, float]:
    """시각 t (-T ≤ t ≤ t_end) 에서 (x, x') 평가"""
    x, v = evaluate_many(trajectory, [t])
    return float(x[0]), float(v[0])


def acceleration(trajectory: Trajectory, ts: Union[float, np.ndarray]):
    """0 ≤ t ≤ t_end 에서 x''(t) (보간된 속도의 도함수)"""
    scalar = np.ndim(ts) == 0
    t_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    _check_range(trajectory, float(t_arr.min()), float(t_arr.max()))
    if np.any(t_arr < 0.0):
        raise OutOfRangeError("가속도는 t ≥ 0 에서만 제공합니다.")
    _, _, acc = _interpolate(trajectory, np.minimum(t_arr, trajectory.times[-1]))
    return float(acc[0]) if scalar else acc


def sample(trajectory: Trajectory, sample_dt: Optional[float] = None) -> np.ndarray:
    """[0, t_end] 균일 표본 시각 (None 이면 적분 격자점)"""
    if sample_dt is None:
        return trajectory.times.copy()
    grid = np.arange(0.0, trajectory.t_end, sample_dt)
    return np.append(grid, trajectory.t_end)


def export_csv(trajectory: Trajectory, alpha: float, path,
               sample_dt: Optional[float] = None,
               provenance: Optional[Dict[str, Any]] = None):
    """
    궤적을 t, x, xdot, H 컬럼 CSV 로 저장

    Args:
        trajectory: 적분 결과
        alpha: 에너지 계산에 쓸 α
        path: 저장 경로
        sample_dt: 표본 간격 (None 이면 격자점 그대로)
        provenance: 추가 실행 정보
    """
    ts = sample(trajectory, sample_dt)
    x, v = evaluate_many(trajectory, ts)
    H = hamiltonian(alpha, x, v)
    info = trajectory.provenance()
    info["alpha"] = alpha
    info.update(provenance or {})
    return write_table(path, "trajectory", ["t", "x", "xdot", "H"], zip(ts, x, v, H), info)
