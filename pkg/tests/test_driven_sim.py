import math

import numpy as np
import pytest

from exceptions import SignalError
from oscillator.classical_core import ClassicalState, OscillatorParams, integrate_homogeneous
from oscillator.driven_sim import ControlSignal, SignalSum, integrate_driven, response_metrics

REST = ClassicalState(0.0, 0.0)


def test_zero_drive_matches_homogeneous_bit_for_bit(params):
    s0 = ClassicalState(0.0, 4.0)
    driven = integrate_driven(params, s0, ControlSignal.zero(), 2.0, 1e-3)
    free = integrate_homogeneous(params, s0, 2.0, 1e-3)
    np.testing.assert_array_equal(driven.times, free.times)
    np.testing.assert_array_equal(driven.values, free.values)
    assert np.all(driven.drive == 0.0)


def test_constant_drive_settles_to_static_deflection(params):
    level = 25.0
    traj = integrate_driven(params, REST, ControlSignal.constant(level), 20 / params.gamma, 1e-3)
    assert traj.final_state.x == pytest.approx(level / params.omega ** 2, abs=1e-6)
    assert traj.final_state.p == pytest.approx(0.0, abs=1e-6)


def test_superposition(params):
    f1 = ControlSignal.constant(25.0)
    f2 = ControlSignal.sinusoid(1.0, 4.0, 0.0)
    both = integrate_driven(params, REST, f1 + f2, 2.0, 1e-3)
    parts = [integrate_driven(params, REST, f, 2.0, 1e-3) for f in (f1, f2)]
    for part in parts:
        np.testing.assert_array_equal(part.times, both.times)
    np.testing.assert_allclose(both.values, sum(part.values for part in parts), rtol=0, atol=1e-9)


def test_undamped_resonance_grows_linearly(undamped):
    # x'' + x = sin(t) from rest: x = (sin t - t cos t)/2
    traj = integrate_driven(undamped, REST, ControlSignal.sinusoid(1.0, 1.0, 0.0), 20.0, 1e-3)
    t = traj.times[-1]
    assert traj.final_state.x == pytest.approx((math.sin(t) - t * math.cos(t)) / 2, abs=1e-8)


def error_against_reference(params, signal, t_end, dt):
    """Errors of the dt and dt/2 runs against a dt/8 run, on the grid times they share."""
    reference = integrate_driven(params, REST, signal, t_end, dt / 8)
    errors = []
    for step in (dt, dt / 2):
        traj = integrate_driven(params, REST, signal, t_end, step)
        _, i, j = np.intersect1d(traj.times, reference.times, assume_unique=True, return_indices=True)
        errors.append(np.max(np.abs(traj.values[i] - reference.values[j])))
    return errors


@pytest.mark.parametrize("signal", [
    ControlSignal.sinusoid(25.0, 4.0, math.pi / 2),
    ControlSignal.piecewise([0.2, 0.73], [25.0, -12.5]),
])
def test_driven_convergence(params, signal):
    coarse, fine = error_against_reference(params, signal, 2.0, 0.04)
    assert fine > 0
    assert coarse / fine >= 8


def test_underdamped_step_response_overshoots():
    light = OscillatorParams(5.0, 0.1)
    traj = integrate_driven(light, REST, ControlSignal.constant(25.0), 200.0, 0.01)
    metrics = response_metrics(traj)
    assert traj.final_state.x == pytest.approx(1.0, abs=1e-3)
    assert metrics.peak > abs(traj.final_state.x)
    assert metrics.peak > 1.5


def test_resonant_cosine_drive_stays_bounded(params):
    # steady amplitude 1/|omega^2 - omega1^2 + 2i gamma omega1|
    f = ControlSignal.sinusoid(1.0, params.omega1, math.pi / 2)
    traj = integrate_driven(params, REST, f, 40.0, 0.01)
    x = np.abs(traj.values[:, 0])
    late, later = x[(traj.times >= 20) & (traj.times < 30)], x[traj.times >= 30]
    steady = 1 / abs(complex(params.omega ** 2 - params.omega1 ** 2, 2 * params.gamma * params.omega1))
    assert np.max(x) < 1.0
    assert np.max(later) <= steady + 1e-6
    # grid sampling of the peaks differs between windows by O((omega1 dt)^2)
    assert np.max(later) == pytest.approx(np.max(late), rel=1e-3)


class TestControlSignal:
    def test_sinusoid_value(self):
        f = ControlSignal.sinusoid(2.0, 3.0, 0.5)
        assert f.value(1.0) == 2.0 * math.sin(3.5)

    def test_piecewise_takes_new_level_at_breakpoint(self):
        f = ControlSignal.piecewise([0.0, 2.0], [1.0, 0.0])
        assert f.value(0.0) == 1.0
        assert f.value(1.999) == 1.0
        assert f.value(2.0) == 0.0
        assert f.held_value(2.0) == 1.0

    def test_piecewise_is_zero_before_first_breakpoint(self):
        f = ControlSignal.piecewise([1.0], [5.0])
        assert f.value(0.5) == 0.0
        assert f.value(1.0) == 5.0
        assert f.held_value(1.0) == 0.0

    @pytest.mark.parametrize("make", [
        lambda: ControlSignal.piecewise([1.0, 0.5], [1.0, 2.0]),
        lambda: ControlSignal.piecewise([1.0, 1.0], [1.0, 2.0]),
        lambda: ControlSignal.piecewise([1.0], [1.0, 2.0]),
        lambda: ControlSignal.piecewise([], []),
        lambda: ControlSignal.constant(float('nan')),
        lambda: ControlSignal('sinusoid', (1.0, 2.0)),
        lambda: ControlSignal('ramp'),
    ])
    def test_malformed_signals_rejected(self, make):
        with pytest.raises(SignalError):
            make()

    def test_sum_of_signals(self):
        total = ControlSignal.constant(1.0) + ControlSignal.piecewise([1.0], [2.0])
        assert isinstance(total, SignalSum)
        assert total.value(0.5) == 1.0
        assert total.value(1.0) == 3.0
        assert total.held_value(1.0) == 1.0

    def test_sum_merges_breakpoints(self):
        total = (ControlSignal.piecewise([1.0, 2.0], [1.0, 0.0])
                 + ControlSignal.piecewise([2.0, 3.0], [1.0, 0.0]))
        assert total.signal_breakpoints() == (1.0, 2.0, 3.0)


def test_breakpoints_become_grid_points(params):
    f = ControlSignal.piecewise([0.55], [1.0])
    traj = integrate_driven(params, REST, f, 1.0, 0.1)
    assert 0.55 in traj.times
    i = int(np.nonzero(traj.times == 0.55)[0][0])
    assert traj.drive[i] == 1.0
    assert traj.drive[i - 1] == 0.0
    # the drive is off until the breakpoint
    assert np.all(traj.values[:i + 1] == 0.0)


def test_step_response_metrics(params):
    traj = integrate_driven(params, REST, ControlSignal.constant(25.0), 20 / params.gamma, 1e-3)
    metrics = response_metrics(traj)
    assert metrics.peak >= 1.0
    assert 0.0 < metrics.settling_time < traj.times[-1]
    assert metrics.terminal_state == traj.final_state
    settle_index = int(np.searchsorted(traj.times, metrics.settling_time))
    assert np.all(np.abs(traj.values[settle_index:, 0] - traj.final_state.x) <= 0.01 * abs(traj.final_state.x))
    assert set(metrics.as_dict()) == {'peak', 'settling_time', 'terminal_x', 'terminal_p'}


def test_metrics_of_quiet_system_settle_immediately(params):
    metrics = response_metrics(integrate_driven(params, REST, ControlSignal.zero(), 1.0, 0.1))
    assert metrics.peak == 0.0
    assert metrics.settling_time == 0.0


def test_metrics_report_unsettled_response():
    undamped = OscillatorParams(1.0, 0.0)
    traj = integrate_driven(undamped, ClassicalState(1.0, 0.0), ControlSignal.zero(), 2.0, 0.01)
    assert response_metrics(traj).settling_time is None


def test_driven_frame_columns(params):
    df = integrate_driven(params, REST, ControlSignal.constant(1.0), 0.1, 0.05).to_frame()
    assert list(df.columns) == ['t', 'x', 'p', 'f']
    assert df['f'].tolist() == [1.0, 1.0, 1.0]
