import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exceptions import CriticalDampingError, OverdampedError, ParameterError, SteppingError
from oscillator.base_integrator import time_grid
from oscillator.classical_core import (AmplitudePhase, ClassicalState, OscillatorParams, Trajectory,
                                       amplitude_phase_from_state, analytic_solution,
                                       analytic_trajectory, decay_envelope, derived_frequency,
                                       integrate_homogeneous, normalize_phase)


@st.composite
def valid_params(draw, max_ratio=0.999):
    omega = draw(st.floats(min_value=0.1, max_value=10.0))
    ratio = draw(st.floats(min_value=0.0, max_value=max_ratio))
    return OscillatorParams(omega, omega * ratio)


def test_derived_frequency_examples():
    assert derived_frequency(OscillatorParams(5.0, 3.0)) == 4.0
    assert derived_frequency(OscillatorParams(1.0, 0.0)) == 1.0
    assert derived_frequency(OscillatorParams(2.0, 1.0)) == pytest.approx(math.sqrt(3), abs=1e-15)


def test_critical_damping_rejected_with_its_own_error():
    with pytest.raises(CriticalDampingError, match="critically damped"):
        OscillatorParams(2.0, 2.0)


def test_overdamped_rejected():
    with pytest.raises(OverdampedError):
        OscillatorParams(1.0, 2.0)


@pytest.mark.parametrize("omega, gamma, hbar", [
    (0.0, 0.0, 1.0),
    (-1.0, 0.0, 1.0),
    (1.0, -0.1, 1.0),
    (1.0, 0.5, 0.0),
    (float('nan'), 0.0, 1.0),
    (1.0, float('inf'), 1.0),
    (1e-170, 0.0, 1.0),
])
def test_invalid_params_rejected(omega, gamma, hbar):
    with pytest.raises(ParameterError):
        OscillatorParams(omega, gamma, hbar)


def test_parameter_errors_are_value_errors():
    with pytest.raises(ValueError):
        OscillatorParams(1.0, 1.0)


def test_analytic_solution_examples(params, undamped):
    assert analytic_solution(params, AmplitudePhase(0.0, 1.3), 2.7) == ClassicalState(0.0, 0.0)

    s = analytic_solution(params, AmplitudePhase(1.0, 0.0), 0.0)
    assert s.x == 0.0
    assert s.p == pytest.approx(4.0, abs=1e-15)

    s = analytic_solution(undamped, AmplitudePhase(1.0, math.pi / 2), 0.0)
    assert s.x == pytest.approx(1.0, abs=1e-15)
    assert s.p == pytest.approx(0.0, abs=1e-15)


def test_amplitude_phase_examples(params, undamped):
    ap = amplitude_phase_from_state(params, ClassicalState(0.0, 4.0))
    assert ap.amplitude == pytest.approx(1.0, abs=1e-15)
    assert ap.phase == 0.0

    assert amplitude_phase_from_state(params, ClassicalState(0.0, 0.0)) == AmplitudePhase(0.0, 0.0)

    ap = amplitude_phase_from_state(undamped, ClassicalState(1.0, 0.0))
    assert ap.amplitude == pytest.approx(1.0, abs=1e-15)
    assert ap.phase == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("theta, expected", [
    (0.0, 0.0),
    (2 * math.pi, 0.0),
    (-0.1, 2 * math.pi - 0.1),
    (7.0, 7.0 - 2 * math.pi),
    (-1e-300, 0.0),
])
def test_normalize_phase(theta, expected):
    assert normalize_phase(theta) == pytest.approx(expected, abs=1e-15)
    assert 0.0 <= normalize_phase(theta) < 2 * math.pi


def test_amplitude_phase_rejects_negative_amplitude():
    with pytest.raises(ParameterError):
        AmplitudePhase(-1.0, 0.0)


@given(valid_params(max_ratio=0.9),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=-2.0, max_value=2.0))
def test_state_round_trip(p, x, v):
    s0 = ClassicalState(x, v)
    back = analytic_solution(p, amplitude_phase_from_state(p, s0), 0.0)
    assert back.x == pytest.approx(s0.x, abs=1e-12)
    assert back.p == pytest.approx(s0.p, abs=1e-12)


@given(valid_params(max_ratio=0.9),
       st.floats(min_value=0.1, max_value=5.0),
       st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True),
       st.floats(min_value=0.0, max_value=3.0))
def test_decay_envelope_identity(p, amplitude, theta, t):
    s = analytic_solution(p, AmplitudePhase(amplitude, theta), t)
    expected = amplitude ** 2 * math.exp(-2 * p.gamma * t)
    assert decay_envelope(p, s) == pytest.approx(expected, rel=1e-12)


def test_rk4_matches_closed_form_at_fine_step(params):
    s0 = ClassicalState(0.0, 4.0)
    traj = integrate_homogeneous(params, s0, 1.0, 1e-4)
    expected = analytic_solution(params, AmplitudePhase(1.0, 0.0), 1.0)

    assert traj.times[-1] == 1.0
    assert traj.final_state.x == pytest.approx(expected.x, abs=1e-8)
    assert traj.final_state.p == pytest.approx(expected.p, abs=1e-8)


def test_rk4_over_full_damping_horizon(params):
    s0 = ClassicalState(0.0, 4.0)
    traj = integrate_homogeneous(params, s0, 10 / params.gamma, 1e-4)
    exact = analytic_trajectory(params, s0, traj.times)
    np.testing.assert_allclose(traj.values, exact, rtol=0, atol=1e-8)


def test_rk4_undamped_period(undamped):
    traj = integrate_homogeneous(undamped, ClassicalState(1.0, 0.0), 2 * math.pi, 1e-4)
    assert traj.final_state.x == pytest.approx(1.0, abs=1e-7)
    assert traj.final_state.p == pytest.approx(0.0, abs=1e-7)


def test_rest_state_is_fixed_point(params):
    traj = integrate_homogeneous(params, ClassicalState(0.0, 0.0), 3.0, 0.01)
    assert np.all(traj.values == 0.0)


def test_rk4_fourth_order_convergence(params):
    s0 = ClassicalState(1.0, 0.0)
    horizon = 4 * math.pi / params.omega
    errors = []
    for dt in (0.04, 0.02):
        traj = integrate_homogeneous(params, s0, horizon, dt)
        errors.append(np.max(np.abs(traj.values - analytic_trajectory(params, s0, traj.times))))
    assert errors[0] / errors[1] >= 8


@pytest.mark.parametrize("t_end, dt", [
    (1.0, 0.0),
    (1.0, -0.1),
    (1.0, 2.0),
    (0.0, 0.1),
    (float('inf'), 0.1),
    (1.0, float('nan')),
])
def test_bad_stepping_rejected(params, t_end, dt):
    with pytest.raises(SteppingError):
        integrate_homogeneous(params, ClassicalState(1.0, 0.0), t_end, dt)


def test_grid_lands_on_horizon_with_short_last_step():
    grid = time_grid(1.0, 0.3)
    np.testing.assert_allclose(grid, [0.0, 0.3, 0.6, 0.9, 1.0], rtol=0, atol=1e-15)
    assert grid[-1] == 1.0


def test_grid_uses_multiples_of_step():
    grid = time_grid(2.0, 0.01)
    assert len(grid) == 201
    assert grid[100] == 1.0


def test_grid_inserts_breakpoints_in_order():
    grid = time_grid(1.0, 0.25, breakpoints=[0.3, 0.5, 5.0])
    np.testing.assert_array_equal(grid, [0.0, 0.25, 0.3, 0.5, 0.75, 1.0])


def test_grid_replaces_node_next_to_breakpoint():
    grid = time_grid(1.0, 0.25, breakpoints=[0.5 + 1e-13])
    np.testing.assert_array_equal(grid, [0.0, 0.25, 0.5 + 1e-13, 0.75, 1.0])


def test_grid_with_many_breakpoints():
    marks = np.arange(1, 4000) * 2.0 ** -9 + 2.0 ** -11
    grid = time_grid(8.0, 2.0 ** -10, breakpoints=marks)
    assert len(grid) == 8193 + len(marks)
    assert np.all(np.diff(grid) > 0)
    assert np.isin(marks, grid).all()


def test_trajectory_requires_increasing_times():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((3, 2)))


def test_trajectory_frame_and_states(params):
    traj = integrate_homogeneous(params, ClassicalState(1.0, 0.0), 0.1, 0.05)
    df = traj.to_frame()
    assert list(df.columns) == ['t', 'x', 'p']
    assert len(traj.states) == len(df) == 3
    assert traj.states[0] == ClassicalState(1.0, 0.0)
    with pytest.raises(ValueError):
        traj.values[0, 0] = 2.0
