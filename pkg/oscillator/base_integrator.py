import logging
import math
from typing import Iterable

import numpy as np

from exceptions import SteppingError


def validate_stepping(t_end: float, dt: float) -> None:
    """Reject horizons and steps that cannot drive a fixed-step integrator."""
    if not (math.isfinite(t_end) and math.isfinite(dt)):
        raise SteppingError(f"t_end and dt must be finite (t_end={t_end}, dt={dt})")
    if t_end <= 0:
        raise SteppingError(f"t_end must be positive (t_end={t_end})")
    if dt <= 0 or dt > t_end:
        raise SteppingError(f"dt must satisfy 0 < dt <= t_end (dt={dt}, t_end={t_end})")


def time_grid(t_end: float, dt: float, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """
    Build the integration grid 0, dt, 2dt, ... ending exactly on t_end.

    Grid points are computed as k*dt so long horizons do not drift. Any
    breakpoint inside (0, t_end) is inserted as a grid point and nodes closer
    than 1e-9*dt to a breakpoint or to t_end are dropped, so the neighbouring
    steps are shortened instead of producing slivers.
    """
    validate_stepping(t_end, dt)

    tol = 1e-9 * dt
    count = int(math.floor(t_end / dt))
    nodes = np.arange(count + 1, dtype=float) * dt

    marks = sorted({float(b) for b in breakpoints if tol < b < t_end - tol})
    marks.append(float(t_end))
    marks_arr = np.asarray(marks)

    nodes = nodes[nodes < t_end - tol]
    idx = np.searchsorted(marks_arr, nodes)
    left = marks_arr[np.maximum(idx - 1, 0)]
    right = marks_arr[np.minimum(idx, len(marks_arr) - 1)]
    far = np.minimum(np.abs(nodes - left), np.abs(right - nodes)) > tol
    far[0] = True  # t = 0 always starts the grid

    return np.sort(np.concatenate([nodes[far], marks_arr]).astype(float))


class BaseIntegrator:
    """
    Fixed-step classical Runge-Kutta integrator for a two-component state.

    Subclasses provide ``rhs``. The closing stage of every step is evaluated
    with ``closing=True`` so a subclass can latch inputs held over the step.
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def rhs(self, t: float, y: np.ndarray, closing: bool = False) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return ()

    def step(self, t: float, y: np.ndarray, h: float) -> np.ndarray:
        k1 = self.rhs(t, y)
        k2 = self.rhs(t + h / 2, y + (h / 2) * k1)
        k3 = self.rhs(t + h / 2, y + (h / 2) * k2)
        k4 = self.rhs(t + h, y + h * k3, closing=True)
        return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

    def run(self, y0: np.ndarray, t_end: float, dt: float) -> tuple:
        """Integrate from t=0 to t_end; returns (times, values) with values of shape (n, 2)."""
        times = time_grid(t_end, dt, self.breakpoints())
        values = np.empty((len(times), 2), dtype=float)
        values[0] = y0

        y = np.asarray(y0, dtype=float)
        for i in range(len(times) - 1):
            y = self.step(times[i], y, times[i + 1] - times[i])
            values[i + 1] = y

        self.logger.debug(f"Integrated {len(times) - 1} steps up to t={t_end}")
        return times, values
