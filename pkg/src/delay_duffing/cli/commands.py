"""
CLI 서브커맨드 구현

각 cmd_* 함수는 ScenarioConfig 를 받아 결과 행(dict) 목록을 돌려주고,
표를 출력한 뒤 CSV 로 저장한다.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Sequence, Tuple

from tqdm import tqdm

from delay_duffing.core.csv_io import format_value, write_table
from delay_duffing.core.scenario import ScenarioConfig
from delay_duffing.dde.history import EllipticHistory
from delay_duffing.dde.integrator import Trajectory, export_csv, integrate
from delay_duffing.diagnostics.diagnostics import (
    HamiltonianSeries,
    detect_torus,
    fit_exponent,
    track_hamiltonian,
)
from delay_duffing.floquet.analytic import Parity, classify, torus_boundary
from delay_duffing.floquet.numeric import solve_characteristic
from delay_duffing.orbit.orbit import DuffingParams, PeriodicOrbit, orbit_summary, solve_amplitude

logger = logging.getLogger(__name__)

# 초기 진폭을 지정하지 않았을 때 A_n 대비 비율
DEFAULT_AMPLITUDE_RATIO = 0.99


def _print_table(rows: List[Dict[str, Any]]) -> None:
    if not rows:
        print("(결과 없음)")
        return
    columns = list(rows[0].keys())
    print(",".join(columns))
    for row in rows:
        print(",".join(format_value(row.get(c)) for c in columns))


def _emit(rows: List[Dict[str, Any]], config: ScenarioConfig, schema: str, suffix: str = "") -> None:
    """표 출력 + CSV 저장"""
    _print_table(rows)
    if rows:
        columns = list(rows[0].keys())
        write_table(
            config.output_path(suffix or f"_{schema}"),
            schema,
            columns,
            ([row.get(c) for c in columns] for row in rows),
            config.provenance(),
        )


def _run_sweep(task: Callable, items: Sequence, workers: int, desc: str) -> List[Any]:
    """항목별 독립 계산 (workers > 1 이면 프로세스 병렬)"""
    if workers <= 1 or len(items) <= 1:
        return [task(item) for item in tqdm(items, desc=desc)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(task, items), total=len(items), desc=desc))


def _grid(config: ScenarioConfig) -> List[Tuple[float, int]]:
    if not config.T:
        raise ValueError("지연 T 가 지정되지 않았습니다 (--T).")
    return [(T, n) for T in config.T for n in config.n]


def cmd_amplitude(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """(T, n) 격자의 주기해 진폭 표 (n, A_n, p_n, H_n, ω_n, m_n)"""
    rows = []
    for T, n in _grid(config):
        orbit = solve_amplitude(config.params(T), n)
        rows.append({"T": T, **orbit_summary(orbit)})
    _emit(rows, config, "amplitude")
    return rows


def _simulate(config: ScenarioConfig, T: float, n: int,
              default_ratio: float = 1.0) -> Tuple[PeriodicOrbit, Trajectory, HamiltonianSeries]:
    """타원 이력 함수로 적분하고 x_n 기준 해밀토니안 편차 계산"""
    if config.t_end is None:
        raise ValueError("적분 종료 시각이 필요합니다 (--t-end).")
    params = config.params(T)
    orbit = solve_amplitude(params, n)
    amplitude = config.initial_amplitude or default_ratio * orbit.A
    history = EllipticHistory(amplitude, orbit.alpha)
    logger.info(f"시뮬레이션: T={T}, n={n}, A_n={orbit.A:.12g}, A0={amplitude:.12g}, t_end={config.t_end}")
    trajectory = integrate(params, history, config.t_end, config.integrator_options())
    series = track_hamiltonian(trajectory, orbit, config.sample_dt)
    return orbit, trajectory, series


def cmd_simulate(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """궤적(t, x, xdot, H) 과 해밀토니안 편차 시계열 CSV 저장"""
    grid = _grid(config)
    if len(grid) != 1:
        raise ValueError(f"simulate 명령은 (T, n) 한 쌍만 받습니다: {len(grid)}개가 지정되었습니다.")
    T, n = grid[0]
    orbit, trajectory, series = _simulate(config, T, n)
    export_csv(trajectory, orbit.alpha, config.output_path(""), sample_dt=config.sample_dt,
               provenance=config.provenance())
    series.export_csv(config.output_path("_hamiltonian"), provenance=config.provenance())
    row = {
        "T": T,
        "n": n,
        "A_n": orbit.A,
        "H_n": orbit.H,
        "steps_accepted": trajectory.steps_accepted,
        "steps_rejected": trajectory.steps_rejected,
        "final_deviation": float(series.deviation[-1]),
    }
    _print_table([row])
    return [row]


def _floquet_task(item: Tuple[ScenarioConfig, float, int]) -> Dict[str, Any]:
    config, T, n = item
    _, _, series = _simulate(config, T, n, DEFAULT_AMPLITUDE_RATIO)
    series.export_csv(config.output_path(f"_T{T:g}_n{n}_hamiltonian"), provenance=config.provenance())
    fit = fit_exponent(series)
    verdict = classify(config.params(T), n)
    return {"T": T, "n": n, **fit.as_row(), "predicted_exponent": verdict.predicted_exponent}


def cmd_floquet(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """시뮬레이션 편차의 로그 기울기 (적합 창 포함)"""
    items = [(config, T, n) for T, n in _grid(config)]
    rows = _run_sweep(_floquet_task, items, config.workers, "Floquet 기울기")
    _emit(rows, config, "floquet")
    return rows


def cmd_classify(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """판정 표 (T, n, b, verdict, condition_value, predicted_exponent)"""
    rows = [classify(config.params(T), n).as_row() for T, n in _grid(config)]
    _emit(rows, config, "classify")
    return rows


def _characteristic_task(item: Tuple[DuffingParams, int]) -> Dict[str, Any]:
    params, n = item
    solution = solve_characteristic(params, n)
    verdict = classify(params, n)
    row = {"T": params.T, **solution.as_row()}
    row["classify"] = verdict.verdict.value
    return row


def cmd_characteristic(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """특성방정식 승수 표 (T, n, Re μ, Im μ, |σ|, verdict)"""
    items = [(config.params(T), n) for T, n in _grid(config)]
    rows = _run_sweep(_characteristic_task, items, config.workers, "특성방정식")
    _emit(rows, config, "characteristic")
    return rows


def cmd_tcrit(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """토러스 경계 T_k 와 경계 진동수 ω"""
    rows = []
    parities = sorted({Parity.of_n(n) for n in config.n}, key=lambda p: p.value)
    for parity in parities:
        for k in config.k:
            boundary = torus_boundary(config.b, parity, k)
            rows.append({
                "b": config.b,
                "n_parity": parity.value,
                "k": k,
                "T_crit": boundary.T if boundary.T is not None else math.nan,
                "omega": boundary.omega if boundary.omega is not None else math.nan,
            })
    _emit(rows, config, "tcrit")
    return rows


def _torus_task(item: Tuple[ScenarioConfig, float, int]) -> Dict[str, Any]:
    config, T, n = item
    _, _, series = _simulate(config, T, n, DEFAULT_AMPLITUDE_RATIO)
    report = detect_torus(series, T)
    return {"T": T, "n": n, **report.model_dump(), "two_T": 2.0 * T}


def cmd_torus(config: ScenarioConfig) -> List[Dict[str, Any]]:
    """토러스 진동 감지 보고"""
    items = [(config, T, n) for T, n in _grid(config)]
    rows = _run_sweep(_torus_task, items, config.workers, "토러스 감지")
    _emit(rows, config, "torus")
    return rows
