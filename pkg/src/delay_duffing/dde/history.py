"""
초기 이력 함수 모듈

[-T, 0] 구간에서 (x, x') 를 돌려주는 이력 함수들
"""
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from delay_duffing.orbit.orbit import PeriodicOrbit, make_orbit, orbit_state


class HistoryFunction(ABC):
    """이력 함수 기본 클래스"""

    kind: str = "abstract"

    @abstractmethod
    def state(self, t):
        """(x(t), x'(t)) 반환 (스칼라 또는 배열)"""

    def position(self, t):
        return self.state(t)[0]

    def covers(self, t_lo: float, t_hi: float) -> bool:
        return True

    def describe(self) -> dict:
        return {"history": self.kind}


class OrbitHistory(HistoryFunction):
    """주기해 x_n(t + phase) 를 이력으로 사용"""

    kind = "orbit"

    def __init__(self, orbit: PeriodicOrbit, phase: float = 0.0):
        self.orbit = orbit
        self.phase = phase

    def state(self, t):
        return orbit_state(self.orbit, t + self.phase)

    def describe(self) -> dict:
        return {"history": self.kind, "history_A": self.orbit.A, "history_phase": self.phase}


class EllipticHistory(OrbitHistory):
    """
    야코비 타원 이력 함수

    (x₀(t), x₀'(t)) = (A cn(ωt, m), -Aω sn(ωt, m) dn(ωt, m)), ω, m 은 α 와 A 로 결정
    """

    kind = "elliptic"

    def __init__(self, A: float, alpha: float):
        super().__init__(make_orbit(alpha, A))
        self.A = A
        self.alpha = alpha

    def describe(self) -> dict:
        return {"history": self.kind, "history_A": self.A, "history_alpha": self.alpha}


class TabulatedHistory(HistoryFunction):
    """표본 (t, x, x') 의 3차 Hermite 보간 이력"""

    kind = "tabulated"

    def __init__(self, t: Sequence[float], x: Sequence[float], xdot: Sequence[float]):
        t = np.asarray(t, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0.0):
            raise ValueError("표본 시각은 2개 이상이며 순증가해야 합니다.")
        self._spline = CubicHermiteSpline(t, np.asarray(x, dtype=float), np.asarray(xdot, dtype=float))
        self._velocity = self._spline.derivative()
        self.t_min = float(t[0])
        self.t_max = float(t[-1])

    def state(self, t):
        if np.ndim(t) == 0:
            return float(self._spline(t)), float(self._velocity(t))
        return self._spline(t), self._velocity(t)

    def covers(self, t_lo: float, t_hi: float) -> bool:
        return self.t_min <= t_lo and t_hi <= self.t_max
