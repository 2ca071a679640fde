"""
Classical damped oscillator x'' + 2*gamma*x' + omega**2 * x = 0 (unit mass).

Closed-form solution x(t) = A e^{-gamma t} sin(omega1 t + theta), conversion
between initial conditions and (A, theta), and a fixed-step RK4 integrator
whose output is checked against the closed form.
"""
import math
import numbers
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from exceptions import CriticalDampingError, OverdampedError, ParameterError
from .base_integrator import BaseIntegrator

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class OscillatorParams:
    omega: float
    gamma: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ('omega', 'gamma', 'hbar'):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite real number (got {value!r})")
        if self.omega <= 0:
            raise ParameterError(f"omega must be positive (got {self.omega})")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be non-negative (got {self.gamma})")
        if self.hbar <= 0:
            raise ParameterError(f"hbar must be positive (got {self.hbar})")
        if self.gamma == self.omega:
            raise CriticalDampingError(self.omega)
        if self.gamma > self.omega:
            raise OverdampedError(self.omega, self.gamma)
        if derived_frequency(self) <= 0:
            raise ParameterError(f"omega1 underflows to zero (omega={self.omega}, gamma={self.gamma})")

    @property
    def omega1(self) -> float:
        return derived_frequency(self)

    def as_dict(self) -> dict:
        return {'omega': self.omega, 'gamma': self.gamma, 'hbar': self.hbar}


@dataclass(frozen=True)
class ClassicalState:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ParameterError(f"state components must be finite (x={self.x}, p={self.p})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p], dtype=float)


@dataclass(frozen=True)
class AmplitudePhase:
    amplitude: float
    phase: float

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and math.isfinite(self.phase)):
            raise ParameterError("amplitude and phase must be finite")
        if self.amplitude < 0:
            raise ParameterError(f"amplitude must be non-negative (got {self.amplitude})")
        object.__setattr__(self, 'phase', normalize_phase(self.phase))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution; ``values`` holds one (x, p) row per entry of ``times``."""
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and states must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        self.times.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def states(self) -> Tuple[ClassicalState, ...]:
        return tuple(ClassicalState(float(x), float(p)) for x, p in self.values)

    @property
    def final_state(self) -> ClassicalState:
        return ClassicalState(float(self.values[-1, 0]), float(self.values[-1, 1]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.times, 'x': self.values[:, 0], 'p': self.values[:, 1]})


def normalize_phase(theta: float) -> float:
    """Map an angle into [0, 2*pi)."""
    wrapped = math.fmod(theta, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    # fmod of a tiny negative angle can round up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def derived_frequency(params: OscillatorParams) -> float:
    """omega1 = sqrt(omega**2 - gamma**2), factored to keep precision near gamma -> omega."""
    return math.sqrt((params.omega - params.gamma) * (params.omega + params.gamma))


def analytic_solution(params: OscillatorParams, ap: AmplitudePhase, t: float) -> ClassicalState:
    omega1 = params.omega1
    envelope = ap.amplitude * math.exp(-params.gamma * t)
    angle = omega1 * t + ap.phase
    s, c = math.sin(angle), math.cos(angle)
    return ClassicalState(envelope * s, envelope * (-params.gamma * s + omega1 * c))


def amplitude_phase_from_state(params: OscillatorParams, s0: ClassicalState) -> AmplitudePhase:
    """
    Invert the t=0 equations x = A sin(theta), p = A(omega1 cos(theta) - gamma sin(theta)).

    The rest state maps to (0, 0).
    """
    sin_part = s0.x
    cos_part = (s0.p + params.gamma * s0.x) / params.omega1
    amplitude = math.hypot(sin_part, cos_part)
    if amplitude == 0:
        return AmplitudePhase(0.0, 0.0)
    return AmplitudePhase(amplitude, math.atan2(sin_part, cos_part))


def decay_envelope(params: OscillatorParams, s: ClassicalState) -> float:
    """x**2 + ((p + gamma x)/omega1)**2, which equals A**2 e^{-2 gamma t} along any orbit."""
    return s.x ** 2 + ((s.p + params.gamma * s.x) / params.omega1) ** 2


class HomogeneousIntegrator(BaseIntegrator):
    """RK4 for dX/dt = A X with A = [[0, 1], [-omega**2, -2 gamma]]."""

    def __init__(self, params: OscillatorParams):
        super().__init__()
        self.params = params
        self._omega_sq = params.omega ** 2
        self._two_gamma = 2 * params.gamma

    def rhs(self, t: float, y: np.ndarray, closing: bool = False) -> np.ndarray:
        return np.array([y[1], -self._omega_sq * y[0] - self._two_gamma * y[1]])


def integrate_homogeneous(params: OscillatorParams, s0: ClassicalState,
                          t_end: float, dt: float) -> Trajectory:
    times, values = HomogeneousIntegrator(params).run(s0.as_array(), t_end, dt)
    return Trajectory(times, values)


def analytic_trajectory(params: OscillatorParams, s0: ClassicalState, times: np.ndarray) -> np.ndarray:
    """Closed-form (x, p) rows at the given times, started from s0 (vectorised)."""
    ap = amplitude_phase_from_state(params, s0)
    times = np.asarray(times, dtype=float)
    envelope = ap.amplitude * np.exp(-params.gamma * times)
    angle = params.omega1 * times + ap.phase
    s, c = np.sin(angle), np.cos(angle)
    return np.column_stack([envelope * s, envelope * (-params.gamma * s + params.omega1 * c)])
