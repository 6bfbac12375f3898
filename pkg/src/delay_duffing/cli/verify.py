"""
불변식 검증 모음 (verify 서브커맨드)

상수, 진폭 표, 에너지 적분 항등식, Wronski 행렬 항등식, τ* 외삽,
지연 복제 홀짝 법칙을 차례로 확인하고 체크리스트를 출력한다.
"""
import logging
import time
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from delay_duffing.elliptic.elliptic import complete_K, jacobi_sncndn
from delay_duffing.floquet.analytic import T_CRIT, Parity, replicate_delays, tau_star
from delay_duffing.floquet.numeric import (
    closed_form_half_period,
    extrapolate_tau,
    wronskian,
    wronskian_closed_form,
)
from delay_duffing.orbit.orbit import (
    P_STAR,
    DuffingParams,
    energy_identity,
    period_of_amplitude,
    rescaled_period,
    solve_amplitude,
)

logger = logging.getLogger(__name__)

# 결함 주입 모드: p* 를 상대 1e-4 만큼 흔든다
FAULTS = {"p-star": 1e-4}

# (T, n, A_n) 기준값
REFERENCE_AMPLITUDES: List[Tuple[float, int, float]] = [
    (0.6, 1, 6.29721145),
    (0.6, 2, 12.30144591494),
    (0.3, 1, 12.41931822569),
    (0.3, 2, 24.69151341060282),
    (0.3, 11, 135.97083402978303460),
    (0.3, 12, 148.32106281755626611),
    (0.9, 27, 111.25102887868052589),
    (0.9, 28, 115.35833191723956861),
    (0.9, 51, 210.13193020360773942),
    (0.9, 52, 214.24522922435665376),
    (3.8476494904855922866 + 0.1, 33, 31.021414799836585),
    (3.8476494904855922866 + 0.1, 34, 31.91443613945749),
]


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str
    elapsed: float


def _relative_digits(printed: float) -> float:
    """출력된 자릿수에 맞춘 상대 허용오차 (최소 1e-10)"""
    text = repr(printed)
    digits = len(text.replace(".", "").replace("-", "").lstrip("0"))
    return max(1e-10, 0.5 * 10.0 ** (1 - digits))


def check_constants() -> Tuple[bool, str]:
    p_err = abs(4.0 * complete_K(0.5) - 7.4162987)
    t_err = abs(T_CRIT - 3.8476494904855922866)
    return p_err < 1e-7 and t_err < 1e-12, f"|p*-7.4162987|={p_err:.2e}, |T_crit 오차|={t_err:.2e}"


def check_elliptic_identities() -> Tuple[bool, str]:
    u = np.linspace(-20.0, 20.0, 401)
    worst = 0.0
    for m in (0.0, 0.1, 0.5, 0.9, 0.999):
        sn, cn, dn = jacobi_sncndn(u, m)
        worst = max(worst, float(np.max(np.abs(sn ** 2 + cn ** 2 - 1.0))),
                    float(np.max(np.abs(dn ** 2 + m * sn ** 2 - 1.0))))
    return worst < 1e-12, f"최대 항등식 잔차 {worst:.2e}"


def check_amplitudes() -> Tuple[bool, str]:
    worst = 0.0
    failures = []
    for T, n, expected in REFERENCE_AMPLITUDES:
        orbit = solve_amplitude(DuffingParams(a=0.0, b=1.0, T=T), n)
        error = abs(orbit.A - expected) / expected
        worst = max(worst, error)
        if error > _relative_digits(expected):
            failures.append(f"A_{n}(T={T:.6g})")
        period_error = abs(period_of_amplitude(orbit.alpha, orbit.A) - 2.0 * T / n) / (2.0 * T / n)
        if period_error > 1e-11:
            failures.append(f"p(A_{n}) 왕복")
    detail = f"최대 상대오차 {worst:.2e}" + (f", 실패: {', '.join(failures)}" if failures else "")
    return not failures, detail


def check_energy_identity(p_star: float) -> Tuple[bool, str]:
    integral, expected = energy_identity(p_star)
    error = abs(integral - expected)
    return error < 1e-9, f"|∫ẋ*² - p*/6| = {error:.2e}"


def check_wronskian_identities() -> Tuple[bool, str]:
    worst_det, worst_trace = 0.0, 0.0
    for epsilon in (0.0, 1e-3, 1e-2, 1e-1):
        for sigma in (1.0, 0.5, -1.0, 1j):
            half = 0.5 * rescaled_period(epsilon, -1.0)
            W = wronskian(epsilon, sigma, -1.0, half, 0.0)
            worst_det = max(worst_det, abs(W.det - 1.0))
            if sigma == 1.0:
                worst_trace = max(worst_trace, abs(W.trace + 2.0))
    passed = worst_det < 1e-9 and worst_trace < 1e-8
    return passed, f"|det-1| ≤ {worst_det:.2e}, |tr+2| ≤ {worst_trace:.2e}"


def check_closed_form() -> Tuple[bool, str]:
    worst = 0.0
    for t in np.linspace(0.3, 0.5 * P_STAR, 10):
        numeric = wronskian(0.0, 0.5, 0.0, float(t), 0.0)
        worst = max(worst, float(np.max(np.abs(numeric.entries - wronskian_closed_form(float(t)).entries))))
    half = wronskian(0.0, 1.0, 0.0, 0.5 * P_STAR, 0.0)
    worst = max(worst, float(np.max(np.abs(half.entries - closed_form_half_period().entries))))
    return worst < 1e-7, f"최대 성분 오차 {worst:.2e}"


def check_tau_star() -> Tuple[bool, str]:
    worst = 0.0
    for parity in (Parity.ODD, Parity.EVEN):
        expected = tau_star(1.0, parity)
        for sigma in (0.5, 1j, -1.0):
            value = extrapolate_tau(sigma, parity, 1.0)
            worst = max(worst, abs(value - expected) / abs(expected))
    return worst < 1e-3, f"최대 상대오차 {worst:.2e}"


def check_replication_parity() -> Tuple[bool, str]:
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 60))
        k = int(rng.integers(-(n // 2), 30))
        if n + 2 * k < 1:
            continue
        _, n_tilde = replicate_delays(1.0, n, k)
        if n_tilde % 2 != n % 2:
            return False, f"홀짝 불일치: n={n}, k={k}"
    return True, "50쌍 모두 홀짝 보존"


def run_checks(inject_fault: Optional[str] = None) -> List[CheckResult]:
    """
    전체 검증 실행

    Args:
        inject_fault: 결함 주입 이름 (현재 "p-star" 만 지원)
    """
    p_star = P_STAR
    if inject_fault is not None:
        if inject_fault not in FAULTS:
            raise ValueError(f"알 수 없는 결함 주입: {inject_fault} (사용 가능: {', '.join(FAULTS)})")
        p_star = P_STAR * (1.0 + FAULTS[inject_fault])
        logger.warning(f"결함 주입 모드: p* = {p_star!r}")

    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("상수 p*, T_crit", check_constants),
        ("타원함수 항등식", check_elliptic_identities),
        ("진폭 표 / 주기 왕복", check_amplitudes),
        ("에너지 적분 항등식", lambda: check_energy_identity(p_star)),
        ("Wronski det / trace", check_wronskian_identities),
        ("ε=0 닫힌 꼴 Wronski", check_closed_form),
        ("τ* 외삽 (σ 무관성)", check_tau_star),
        ("지연 복제 홀짝 법칙", check_replication_parity),
    ]
    results = []
    for name, check in checks:
        started = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as e:
            passed, detail = False, f"예외 발생: {e}"
            logger.error(f"검증 '{name}' 실패: {e}", exc_info=True)
        results.append(CheckResult(name=name, passed=passed, detail=detail,
                                   elapsed=time.perf_counter() - started))
    return results


def print_checklist(results: List[CheckResult]) -> bool:
    for result in results:
        mark = "PASS" if result.passed else "FAIL"
        print(f"[{mark}] {result.name}: {result.detail} ({result.elapsed:.2f}s)")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} 통과")
    return passed == len(results)
