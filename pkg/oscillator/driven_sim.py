"""
Classical control system x'' + 2 gamma x' + omega**2 x = f(t), integrated
with the same RK4 stepping as the homogeneous oscillator.

Piecewise-constant drives take their new level at a breakpoint. Breakpoints
are grid points, and the closing RK4 stage of a step ending on a breakpoint
uses the level held during that step.
"""
import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from exceptions import SignalError
from .classical_core import ClassicalState, HomogeneousIntegrator, OscillatorParams

SIGNAL_KINDS = ('zero', 'constant', 'sinusoid', 'piecewise')
SETTLING_BAND = 0.01
SETTLING_FLOOR = 1e-9

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ControlSignal:
    """
    kind-specific parameters:
      zero       ()
      constant   (level,)
      sinusoid   (amplitude, frequency, phase)  -> amplitude * sin(frequency t + phase)
      piecewise  breakpoints + levels; zero before the first breakpoint
    """
    kind: str
    parameters: Tuple[float, ...] = ()
    breakpoints: Tuple[float, ...] = ()
    levels: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise SignalError(f"unknown signal kind {self.kind!r}; expected one of {SIGNAL_KINDS}")
        expected = {'zero': 0, 'constant': 1, 'sinusoid': 3, 'piecewise': 0}[self.kind]
        if len(self.parameters) != expected:
            raise SignalError(f"{self.kind} signal takes {expected} parameters, got {len(self.parameters)}")
        values = tuple(self.parameters) + tuple(self.breakpoints) + tuple(self.levels)
        if not all(math.isfinite(v) for v in values):
            raise SignalError("signal parameters must be finite")
        if self.kind == 'piecewise':
            if not self.breakpoints or len(self.breakpoints) != len(self.levels):
                raise SignalError("piecewise signal needs one level per breakpoint")
            if any(nxt <= cur for cur, nxt in zip(self.breakpoints, self.breakpoints[1:])):
                raise SignalError(f"breakpoints must be strictly increasing: {self.breakpoints}")
        elif self.breakpoints or self.levels:
            raise SignalError(f"{self.kind} signal takes no breakpoints")

    @classmethod
    def zero(cls) -> 'ControlSignal':
        return cls('zero')

    @classmethod
    def constant(cls, level: float) -> 'ControlSignal':
        return cls('constant', (float(level),))

    @classmethod
    def sinusoid(cls, amplitude: float, frequency: float, phase: float = 0.0) -> 'ControlSignal':
        return cls('sinusoid', (float(amplitude), float(frequency), float(phase)))

    @classmethod
    def piecewise(cls, breakpoints, levels) -> 'ControlSignal':
        return cls('piecewise', (), tuple(float(b) for b in breakpoints), tuple(float(v) for v in levels))

    def value(self, t: float) -> float:
        if self.kind == 'zero':
            return 0.0
        if self.kind == 'constant':
            return self.parameters[0]
        if self.kind == 'sinusoid':
            amplitude, frequency, phase = self.parameters
            return amplitude * math.sin(frequency * t + phase)
        index = bisect.bisect_right(self.breakpoints, t)
        return self.levels[index - 1] if index else 0.0

    def held_value(self, t: float) -> float:
        """Level held on the interval that ends at t."""
        if self.kind != 'piecewise':
            return self.value(t)
        index = bisect.bisect_left(self.breakpoints, t)
        return self.levels[index - 1] if index else 0.0

    def signal_breakpoints(self) -> Tuple[float, ...]:
        return self.breakpoints

    def __add__(self, other) -> 'SignalSum':
        return SignalSum((self,)) + other


@dataclass(frozen=True)
class SignalSum:
    terms: Tuple[ControlSignal, ...] = field(default_factory=tuple)

    def value(self, t: float) -> float:
        return sum(term.value(t) for term in self.terms)

    def held_value(self, t: float) -> float:
        return sum(term.held_value(t) for term in self.terms)

    def signal_breakpoints(self) -> Tuple[float, ...]:
        return tuple(sorted({b for term in self.terms for b in term.signal_breakpoints()}))

    def __add__(self, other) -> 'SignalSum':
        if isinstance(other, SignalSum):
            return SignalSum(self.terms + other.terms)
        if isinstance(other, ControlSignal):
            return SignalSum(self.terms + (other,))
        return NotImplemented


@dataclass(frozen=True, eq=False)
class DrivenTrajectory:
    times: np.ndarray
    values: np.ndarray
    drive: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.values) == len(self.drive)):
            raise ValueError("times, states and drive must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for arr in (self.times, self.values, self.drive):
            arr.setflags(write=False)

    @property
    def states(self) -> Tuple[ClassicalState, ...]:
        return tuple(ClassicalState(float(x), float(p)) for x, p in self.values)

    @property
    def final_state(self) -> ClassicalState:
        return ClassicalState(float(self.values[-1, 0]), float(self.values[-1, 1]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.times, 'x': self.values[:, 0],
                             'p': self.values[:, 1], 'f': self.drive})


@dataclass(frozen=True)
class ResponseMetrics:
    peak: float
    settling_time: Optional[float]
    terminal_state: ClassicalState

    def as_dict(self) -> dict:
        return {'peak': self.peak, 'settling_time': self.settling_time,
                'terminal_x': self.terminal_state.x, 'terminal_p': self.terminal_state.p}


class DrivenIntegrator(HomogeneousIntegrator):
    """Homogeneous right-hand side plus f(t) on the momentum component."""

    def __init__(self, params: OscillatorParams, signal):
        super().__init__(params)
        self.signal = signal

    def rhs(self, t: float, y: np.ndarray, closing: bool = False) -> np.ndarray:
        deriv = super().rhs(t, y)
        deriv[1] += self.signal.held_value(t) if closing else self.signal.value(t)
        return deriv

    def breakpoints(self) -> tuple:
        return self.signal.signal_breakpoints()


def integrate_driven(params: OscillatorParams, s0: ClassicalState, f,
                     t_end: float, dt: float) -> DrivenTrajectory:
    times, values = DrivenIntegrator(params, f).run(s0.as_array(), t_end, dt)
    drive = np.array([f.value(t) for t in times], dtype=float)
    return DrivenTrajectory(times, values, drive)


def response_metrics(traj: DrivenTrajectory) -> ResponseMetrics:
    """
    Peak |x|, settling time into the 1% band around the terminal x, terminal state.

    The settling time is the first grid time from which every later sample stays
    in the band; it is None when only the terminal sample is inside.
    """
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    x = traj.values[:, 0]
    terminal = x[-1]
    band = SETTLING_BAND * max(abs(terminal), SETTLING_FLOOR)
    outside = np.nonzero(np.abs(x - terminal) > band)[0]

    if outside.size == 0:
        settling = float(traj.times[0])
    elif outside[-1] + 1 == len(x) - 1:
        settling = None
    else:
        settling = float(traj.times[outside[-1] + 1])

    metrics = ResponseMetrics(float(np.max(np.abs(x))), settling, traj.final_state)
    logger.info(f"Response metrics: peak={metrics.peak:.6g}, settling_time={settling}")
    return metrics
