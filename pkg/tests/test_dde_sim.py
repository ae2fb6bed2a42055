import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delaycycles.dde_sim import (
    SimConfig,
    Trajectory,
    default_step,
    find_separatrix,
    integrate,
    measure_amplitude,
)
from delaycycles.errors import BracketError, DomainError, InsufficientDataError, NumericalError
from delaycycles.melnikov import scan_zeros


def energy(traj):
    return 0.5 * traj.v**2 + 0.5 * traj.x**2 + 0.25 * traj.x**4


def rk4_frozen_delay(alpha, x0, v0, dt, n):
    """Hand-rolled RK4 for x'' + alpha x' + x0 + x^3 = 0."""
    f = lambda x, y: (y, -alpha * y - x0 - x**3)  # noqa: E731
    x, y = x0, v0
    out = [x]
    for _ in range(n):
        k1 = f(x, y)
        k2 = f(x + dt / 2 * k1[0], y + dt / 2 * k1[1])
        k3 = f(x + dt / 2 * k2[0], y + dt / 2 * k2[1])
        k4 = f(x + dt * k3[0], y + dt * k3[1])
        x += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        out.append(x)
    return np.array(out)


def test_step_divides_delay():
    cfg = SimConfig(T=0.3, x0=1.0, dt=0.007)
    assert cfg.steps_per_delay == 43
    assert cfg.T / cfg.dt == pytest.approx(43, rel=1e-12)


def test_step_at_least_four_per_delay():
    cfg = SimConfig(T=0.2, x0=0.1, dt=1.0)
    assert cfg.dt == pytest.approx(0.05)


def test_default_step_rule():
    dt = default_step(0.6, 0.3, 1.0)
    assert dt <= 0.6 / 20
    cfg = SimConfig(T=0.6, alpha=0.3, x0=1.0)
    assert cfg.dt <= dt + 1e-15


@pytest.mark.parametrize("kw", [{"T": -1.0}, {"T": 1.0, "alpha": -0.1}, {"T": 1.0, "t_end": 0.0}, {"T": 1.0, "dt": -0.1}])
def test_config_domain(kw):
    with pytest.raises(DomainError):
        SimConfig(**kw)


def test_energy_conserved_without_delay():
    traj = integrate(SimConfig(T=0.0, alpha=0.0, x0=1.0, v0=0.0, dt=1e-3, t_end=100.0))
    assert np.max(np.abs(energy(traj) - 0.75)) <= 1e-8


def test_fourth_order_energy_drift():
    drifts = []
    for dt in (0.004, 0.002):
        traj = integrate(SimConfig(T=0.0, x0=1.0, dt=dt, t_end=20.0))
        drifts.append(np.max(np.abs(energy(traj) - 0.75)))
    assert 14.0 <= drifts[0] / drifts[1] <= 20.0


def test_fourth_order_state():
    ends = [integrate(SimConfig(T=0.3, x0=1.0, dt=0.3 / k, t_end=3.0)).x[-1] for k in (40, 80, 160)]
    ratio = (ends[0] - ends[1]) / (ends[1] - ends[2])
    assert 14.0 <= ratio <= 18.0


def test_first_delay_interval_is_an_ode():
    cfg = SimConfig(T=1.0, alpha=0.2, x0=1.5, v0=0.3, dt=0.01, t_end=0.9)
    traj = integrate(cfg)
    ref = rk4_frozen_delay(0.2, 1.5, 0.3, cfg.dt, traj.times.size - 1)
    np.testing.assert_allclose(traj.x, ref, atol=1e-10, rtol=0)


def test_trajectory_grid_and_dense_output():
    traj = integrate(SimConfig(T=0.5, alpha=0.1, x0=1.0, dt=0.01, t_end=5.0))
    assert traj.times[0] == 0.0
    np.testing.assert_allclose(np.diff(traj.times), traj.dt, rtol=1e-12)
    np.testing.assert_allclose(traj(traj.times[:-1]), traj.x[:-1], rtol=0, atol=1e-14)
    assert traj(traj.times[-1]) == pytest.approx(traj.x[-1], abs=1e-14)
    with pytest.raises(ValueError):
        traj.x[0] = 3.0
    with pytest.raises(DomainError):
        traj(10.0)


def test_divergence_is_reported():
    traj = integrate(SimConfig(T=0.3, x0=1.0, t_end=100.0, blowup_threshold=5.0))
    assert traj.diverged
    assert abs(traj.x[-1]) > 5.0
    assert traj.divergence_time == pytest.approx(traj.times[-1])
    assert traj.divergence_time < 100.0


def test_non_finite_state():
    with pytest.raises(NumericalError):
        integrate(SimConfig(T=0.3, x0=1e120, dt=0.05, t_end=1.0, blowup_threshold=math.inf))


def test_measure_pure_cosine():
    t = np.arange(0.0, 30.0, 0.01)
    traj = Trajectory.from_arrays(t, 5 * np.cos(2 * t), -10 * np.sin(2 * t))
    est = measure_amplitude(traj, 0.5)
    assert est.amplitude == pytest.approx(5.0, abs=1e-6)
    assert est.period == pytest.approx(math.pi, abs=1e-6)
    assert est.converged and est.n_peaks >= 4


@settings(max_examples=40, deadline=None)
@given(frac=st.floats(0.0, 0.49), amp=st.floats(0.5, 20.0), w=st.floats(1.0, 4.0))
def test_measure_sinusoid_any_window(frac, amp, w):
    t = np.arange(0.0, 60.0, 0.005)
    traj = Trajectory.from_arrays(t, amp * np.cos(w * t + 0.3), -amp * w * np.sin(w * t + 0.3))
    assert measure_amplitude(traj, frac).amplitude == pytest.approx(amp, abs=1e-6)


def test_measure_needs_peaks():
    t = np.linspace(0.0, 3.0, 301)
    traj = Trajectory.from_arrays(t, np.cos(t), -np.sin(t))
    with pytest.raises(InsufficientDataError):
        measure_amplitude(traj)


def test_measure_rejects_diverged():
    traj = integrate(SimConfig(T=0.3, x0=1.0, t_end=100.0, blowup_threshold=5.0))
    with pytest.raises(InsufficientDataError):
        measure_amplitude(traj)


@pytest.mark.parametrize("T, alpha, expected", [(0.6, 0.3, 3.7), (0.4, 0.1, 7.3)])
def test_damped_cycles_from_small_start(T, alpha, expected):
    est = measure_amplitude(integrate(SimConfig(T=T, alpha=alpha, x0=1.0, t_end=600.0)))
    assert est.converged
    assert est.amplitude == pytest.approx(expected, rel=0.03)


@pytest.fixture(scope="module")
def melnikov_zeros_t03():
    return [z.a1 for z in scan_zeros(0.3, 5.0, 45.0)]


def _settled(x0, t_end=120.0):
    return measure_amplitude(integrate(SimConfig(T=0.3, x0=x0, t_end=t_end)), 0.75).amplitude


def test_undamped_basins(melnikov_zeros_t03):
    small = [_settled(x0) for x0 in (1.0, 20.0, 24.0)]
    large = [_settled(x0) for x0 in (25.0, 26.0, 26.682, 40.0)]
    assert max(small) - min(small) < 0.01 * min(small)
    assert max(large) - min(large) < 0.01 * min(large)
    # converged cycles sit on the first and third Melnikov zeros
    assert small[0] == pytest.approx(melnikov_zeros_t03[0], rel=0.015)
    assert large[0] == pytest.approx(melnikov_zeros_t03[2], rel=0.005)
    assert small[0] == pytest.approx(12.31, rel=0.02)


def test_separatrix_is_unstable_middle_cycle(melnikov_zeros_t03):
    x = find_separatrix(0.3, 0.0, 20.0, 30.0, 1e-3)
    assert x == pytest.approx(melnikov_zeros_t03[1], abs=0.02)


def test_separatrix_bracket_on_one_branch():
    with pytest.raises(BracketError):
        find_separatrix(0.3, 0.0, 5.0, 20.0, 1e-2)


@pytest.mark.parametrize("lo, hi, tol", [(20.0, 20.0, 1e-3), (30.0, 20.0, 1e-3), (20.0, 30.0, 0.0)])
def test_separatrix_preconditions(lo, hi, tol):
    with pytest.raises(DomainError):
        find_separatrix(0.3, 0.0, lo, hi, tol)
