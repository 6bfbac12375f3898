"""
DDE 적분기 테스트: 정확해 추적, 에너지 보존, 수렴 차수, 보간, 오류 처리
"""
import numpy as np
import pytest

from delay_duffing.core.exceptions import (
    BlowUpError,
    IntegrationError,
    OutOfRangeError,
    StepSizeUnderflowError,
)
from delay_duffing.dde import integrator as integrator_module
from delay_duffing.dde.history import EllipticHistory, OrbitHistory, TabulatedHistory
from delay_duffing.dde.integrator import (
    IntegratorOptions,
    acceleration,
    evaluate,
    evaluate_many,
    export_csv,
    integrate,
    sample,
)
from delay_duffing.core.csv_io import read_table
from delay_duffing.orbit.orbit import DuffingParams, hamiltonian, orbit_state, solve_amplitude

from conftest import PARAMS_T06

# b = 0 이면 지연 항이 사라진 보존계가 된다
CONSERVATIVE = DuffingParams(a=1.0, b=0.0, T=1.0)


def _fixed_step(h: float) -> IntegratorOptions:
    # rtol = atol = 1 이면 모든 스텝이 채택되어 보폭이 max_step 으로 고정된다
    return IntegratorOptions(max_step=h, rtol=1.0, atol=1.0, first_step=h)


def test_periodic_orbit_is_reproduced():
    orbit = solve_amplitude(PARAMS_T06, 1)
    traj = integrate(PARAMS_T06, OrbitHistory(orbit), 10.0 * orbit.p, IntegratorOptions(max_step=1e-3))
    x, v = evaluate_many(traj, traj.times)
    H = hamiltonian(orbit.alpha, x, v)
    assert np.max(np.abs(H - orbit.H)) / orbit.H < 1e-4
    x_exact, _ = orbit_state(orbit, traj.times)
    assert np.max(np.abs(x - x_exact)) < 1e-3 * orbit.A


def test_energy_conserved_without_delay():
    history = EllipticHistory(1.0, 1.0)
    traj = integrate(CONSERVATIVE, history, 20.0, IntegratorOptions(max_step=5e-4))
    H = hamiltonian(1.0, traj.x, traj.v)
    H0 = hamiltonian(1.0, 1.0, 0.0)
    assert np.max(np.abs(H - H0)) / H0 < 1e-8


def test_third_order_convergence():
    history = EllipticHistory(1.5, 1.0)
    t_end = 2.0
    finals = {}
    for h in (0.02, 0.01, 0.0025):
        traj = integrate(CONSERVATIVE, history, t_end, _fixed_step(h))
        assert traj.times[-1] == t_end
        assert traj.steps_rejected == 0
        finals[h] = np.array([traj.x[-1], traj.v[-1]])
    coarse = np.linalg.norm(finals[0.02] - finals[0.0025])
    fine = np.linalg.norm(finals[0.01] - finals[0.0025])
    assert coarse / fine >= 5.66


def test_knot_values_are_returned_exactly():
    orbit = solve_amplitude(PARAMS_T06, 2)
    traj = integrate(PARAMS_T06, OrbitHistory(orbit), 2.0, IntegratorOptions(max_step=1e-3))
    for k in (0, 1, len(traj.times) // 2, len(traj.times) - 1):
        x, v = evaluate(traj, float(traj.times[k]))
        assert x == traj.x[k]
        assert v == traj.v[k]


def test_history_is_used_before_zero():
    history = EllipticHistory(3.7, -1.0)
    traj = integrate(PARAMS_T06, history, 1.0, IntegratorOptions(max_step=1e-3))
    for t in (-0.6, -0.3, -1e-9):
        assert evaluate(traj, t) == pytest.approx(history.state(t), abs=1e-12)


def test_dense_output_matches_finer_run():
    history = EllipticHistory(1.5, 1.0)
    coarse = integrate(CONSERVATIVE, history, 5.0, IntegratorOptions(max_step=1e-2, rtol=1e-12, atol=1e-14))
    fine = integrate(CONSERVATIVE, history, 5.0, IntegratorOptions(max_step=5e-3, rtol=1e-12, atol=1e-14))
    midpoints = 0.5 * (coarse.times[:-1] + coarse.times[1:])
    x_coarse, v_coarse = evaluate_many(coarse, midpoints)
    x_fine, v_fine = evaluate_many(fine, midpoints)
    assert np.max(np.abs(x_coarse - x_fine)) < 1e-8
    assert np.max(np.abs(v_coarse - v_fine)) < 1e-8


def test_vectorised_dense_output_matches_step_interpolant():
    orbit = solve_amplitude(PARAMS_T06, 1)
    traj = integrate(PARAMS_T06, OrbitHistory(orbit), 1.0, IntegratorOptions(max_step=1e-2))
    assert traj.dense_output() is traj.dense_output()
    for k in (0, len(traj.times) // 3, len(traj.times) - 2):
        t0, t1 = float(traj.times[k]), float(traj.times[k + 1])
        t = t0 + 0.37 * (t1 - t0)
        x, v = evaluate(traj, t)
        assert x == pytest.approx(
            integrator_module._hermite(t0, t1, traj.x[k], traj.v[k], traj.x[k + 1], traj.v[k + 1], t), abs=1e-12)
        assert v == pytest.approx(
            integrator_module._hermite(t0, t1, traj.v[k], traj.acc[k], traj.v[k + 1], traj.acc[k + 1], t), abs=1e-12)


def test_delay_equation_residual_is_small():
    orbit = solve_amplitude(PARAMS_T06, 1)
    traj = integrate(PARAMS_T06, OrbitHistory(orbit), 3.0, IntegratorOptions(max_step=5e-4))
    t = np.linspace(PARAMS_T06.T, 3.0, 1000)
    x, _ = evaluate_many(traj, t)
    x_delayed, _ = evaluate_many(traj, t - PARAMS_T06.T)
    residual = acceleration(traj, t) + PARAMS_T06.a * x + PARAMS_T06.b * x_delayed + x ** 3
    assert np.max(np.abs(residual)) < 1e-6 * orbit.A ** 3


def test_out_of_range_requests():
    traj = integrate(PARAMS_T06, EllipticHistory(3.7, -1.0), 1.0, IntegratorOptions(max_step=1e-3))
    with pytest.raises(OutOfRangeError):
        evaluate(traj, 1.5)
    with pytest.raises(OutOfRangeError):
        evaluate(traj, -0.7)
    with pytest.raises(OutOfRangeError):
        acceleration(traj, -0.1)


def test_integration_is_deterministic():
    options = IntegratorOptions(max_step=1e-3)
    first = integrate(PARAMS_T06, EllipticHistory(3.7, -1.0), 2.0, options)
    second = integrate(PARAMS_T06, EllipticHistory(3.7, -1.0), 2.0, options)
    assert np.array_equal(first.times, second.times)
    assert np.array_equal(first.x, second.x)
    assert np.array_equal(first.v, second.v)


def test_history_stride_only_thins_archive(monkeypatch):
    monkeypatch.setattr(integrator_module, "_COMPACT_EVERY", 500)
    history = EllipticHistory(3.7, -1.0)
    full = integrate(PARAMS_T06, history, 6.0, IntegratorOptions(max_step=1e-3))
    thinned = integrate(PARAMS_T06, history, 6.0, IntegratorOptions(max_step=1e-3, history_stride=10))
    assert len(thinned.times) < len(full.times)
    assert thinned.x[-1] == full.x[-1]
    assert thinned.v[-1] == full.v[-1]
    assert np.all(np.diff(thinned.times) > 0.0)


def test_max_step_must_be_below_delay():
    with pytest.raises(IntegrationError):
        integrate(DuffingParams(T=0.01), EllipticHistory(3.7, -1.0), 1.0, IntegratorOptions(max_step=0.02))


def test_non_positive_end_time_is_rejected():
    with pytest.raises(ValueError):
        integrate(PARAMS_T06, EllipticHistory(3.7, -1.0), 0.0)


def test_tabulated_history_must_cover_delay_interval():
    t = np.linspace(-0.3, 0.0, 31)
    history = TabulatedHistory(t, np.cos(t), -np.sin(t))
    with pytest.raises(IntegrationError):
        integrate(PARAMS_T06, history, 1.0, IntegratorOptions(max_step=1e-3))


def test_tabulated_history_drives_integration():
    orbit = solve_amplitude(PARAMS_T06, 1)
    t = np.linspace(-PARAMS_T06.T, 0.0, 601)
    x, v = orbit_state(orbit, t)
    traj = integrate(PARAMS_T06, TabulatedHistory(t, x, v), 2.0, IntegratorOptions(max_step=1e-3))
    H = hamiltonian(orbit.alpha, traj.x, traj.v)
    assert np.max(np.abs(H - orbit.H)) / orbit.H < 1e-3


def test_blowup_is_reported_with_time():
    options = IntegratorOptions(max_step=1e-3, blowup_threshold=1.5)
    with pytest.raises(BlowUpError) as info:
        integrate(CONSERVATIVE, EllipticHistory(2.0, 1.0), 1.0, options)
    assert 0.0 < info.value.blowup_time <= 1e-3


def test_step_size_underflow():
    options = IntegratorOptions(max_step=1e-3, rtol=1e-300, atol=1e-300)
    with pytest.raises(StepSizeUnderflowError):
        integrate(CONSERVATIVE, EllipticHistory(1.0, 1.0), 1.0, options)


def test_sample_grid_and_csv_export(tmp_path):
    history = EllipticHistory(3.7, -1.0)
    traj = integrate(PARAMS_T06, history, 1.0, IntegratorOptions(max_step=1e-3))
    grid = sample(traj, 0.25)
    np.testing.assert_allclose(grid, [0.0, 0.25, 0.5, 0.75, 1.0])
    path = export_csv(traj, -1.0, tmp_path / "traj.csv", sample_dt=0.25, provenance={"scenario": "unit"})
    table = read_table(path)
    assert table["schema"] == "delay-duffing/trajectory v1"
    assert table["columns"] == ["t", "x", "xdot", "H"]
    assert len(table["rows"]) == 5
    assert table["provenance"]["scenario"] == "unit"
    assert float(table["rows"][0][1]) == history.state(0.0)[0]
