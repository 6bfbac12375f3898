"""
도메인 예외 정의
"""
from typing import Optional


class DelayDuffingError(RuntimeError):
    """패키지 공통 예외"""


class EllipticDomainError(DelayDuffingError, ValueError):
    """허용 범위를 벗어난 입력 (m ∉ [0,1), H ≤ 0 등)"""


class NoRootError(DelayDuffingError):
    """허용 가능한 근이 존재하지 않음"""


class ConvergenceError(DelayDuffingError):
    """반복 해법이 수렴하지 않음"""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class RootSelectionAmbiguityError(ConvergenceError):
    """2차 방정식의 두 근이 구분되지 않음"""


class IntegrationError(DelayDuffingError):
    """수치 적분 실패"""


class StepSizeUnderflowError(IntegrationError):
    """스텝 크기가 부동소수점 해상도 아래로 떨어짐"""


class BlowUpError(IntegrationError):
    """상태가 유한하지 않게 됨"""

    def __init__(self, message: str, blowup_time: float):
        super().__init__(message)
        self.blowup_time = blowup_time


class OutOfRangeError(DelayDuffingError, ValueError):
    """보간 구간 밖의 시각 요청"""


class InsufficientDataError(DelayDuffingError):
    """분석에 필요한 데이터 길이 부족"""


class NoExponentialRegimeError(DelayDuffingError):
    """지수적 구간을 찾지 못함"""


class IllConditionedWarning(UserWarning):
    """수치적으로 불안정한 평가"""
