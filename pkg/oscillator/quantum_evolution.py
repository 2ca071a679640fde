"""
Quantized damped oscillator with the complex Hamiltonian

    H = hbar (omega1 - i gamma) a^dagger a + hbar omega / 2

where the ground-state energy is pinned to its gamma-independent value.
H is diagonal in the number basis, so evolution acts coefficient by
coefficient and a truncated Fock space is exact for states supported below
the truncation. Evolved states are not renormalised: the lost norm is the
dissipation.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from exceptions import (BackwardEvolutionError, DimensionMismatchError,
                        ExtinctStateError, SettlingUndefinedError, StateError)
from .classical_core import OscillatorParams

NORM_TOLERANCE = 1e-12
EXTINCTION_FLOOR = 1e-300

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumLine:
    n: int
    energy: complex
    physical: bool = True


@dataclass(frozen=True, eq=False)
class FockState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size < 1:
            raise StateError("Fock state needs at least one level")
        if not np.all(np.isfinite(amps)):
            raise StateError("Fock amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @classmethod
    def initial(cls, amplitudes: Sequence[complex]) -> 'FockState':
        """An initial state; its squared norm must be 1 to 1e-12."""
        state = cls(amplitudes)
        if abs(state.norm_sq - 1.0) > NORM_TOLERANCE:
            raise StateError(f"initial state is not normalised (norm_sq={state.norm_sq!r})")
        return state

    @classmethod
    def normalize(cls, amplitudes: Sequence[complex]) -> Tuple['FockState', float]:
        """Scale to unit norm; returns the state and the factor that was applied."""
        raw = cls(amplitudes)
        norm = math.sqrt(raw.norm_sq)
        if norm == 0:
            raise StateError("cannot normalise the zero vector")
        factor = 1.0 / norm
        return cls(raw.amplitudes * factor), factor

    @classmethod
    def from_sparse(cls, entries: Mapping[int, complex], dim: int = None) -> Tuple['FockState', float]:
        """Normalised state from {level: amplitude}; dim defaults to the highest level + 1."""
        if not entries:
            raise StateError("no amplitudes given")
        if min(entries) < 0:
            raise StateError("level indices must be non-negative")
        needed = max(entries) + 1
        dim = needed if dim is None else dim
        if dim < needed:
            raise StateError(f"dim={dim} cannot hold level {needed - 1}")
        amps = np.zeros(dim, dtype=complex)
        for n, value in entries.items():
            amps[n] = value
        return cls.normalize(amps)

    @classmethod
    def basis(cls, n: int, dim: int) -> 'FockState':
        if not 0 <= n < dim:
            raise StateError(f"level {n} outside dim={dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[n] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class EvolutionReport:
    time: float
    state: FockState
    norm_sq: float
    ground_overlap: complex


def spectrum(params: OscillatorParams, n_max: int) -> List[SpectrumLine]:
    """E_n = hbar (omega1 - i gamma) n + hbar omega / 2; E_0 is real."""
    _check_level(n_max)
    hbar, omega1 = params.hbar, params.omega1
    ground = hbar * params.omega / 2
    return [SpectrumLine(n, complex(hbar * omega1 * n + ground, -hbar * params.gamma * n))
            for n in range(n_max + 1)]


def naive_spectrum(params: OscillatorParams, n_max: int) -> List[SpectrumLine]:
    """hbar (omega1 - i gamma)(n + 1/2) without the ground-state restriction. Not physical."""
    _check_level(n_max)
    coeff = params.hbar * complex(params.omega1, -params.gamma)
    return [SpectrumLine(n, coeff * (n + 0.5), physical=False) for n in range(n_max + 1)]


def ground_phase(params: OscillatorParams, t: float) -> complex:
    """e^{-i t hbar omega / 2}."""
    angle = t * params.hbar * params.omega / 2
    return complex(math.cos(angle), -math.sin(angle))


def level_factors(params: OscillatorParams, dim: int, t: float) -> np.ndarray:
    """e^{-t hbar gamma n} (cos(t hbar omega1 n) - i sin(t hbar omega1 n)) for n < dim."""
    n = np.arange(dim, dtype=float)
    decay = np.exp(-(t * params.hbar * params.gamma) * n)
    angle = t * params.hbar * params.omega1 * n
    return decay * (np.cos(angle) - 1j * np.sin(angle))


def evolve(params: OscillatorParams, psi0: FockState, t: float) -> EvolutionReport:
    _check_forward(t)
    amps = ground_phase(params, t) * level_factors(params, psi0.dim, t) * psi0.amplitudes
    return make_report(t, FockState(amps))


def make_report(t: float, state: FockState) -> EvolutionReport:
    return EvolutionReport(time=t, state=state, norm_sq=state.norm_sq,
                           ground_overlap=complex(state.amplitudes[0]))


def asymptotic_state(params: OscillatorParams, psi0: FockState, t: float) -> complex:
    """Coefficient e^{-i t hbar omega/2} psi_0 of |0> that every state settles into."""
    if params.gamma == 0:
        raise SettlingUndefinedError("an undamped system does not settle (gamma == 0)")
    _check_forward(t)
    return ground_phase(params, t) * complex(psi0.amplitudes[0])


def settling_distance(params: OscillatorParams, psi0: FockState, t: float) -> Tuple[float, float]:
    """
    Distance of evolve(psi0, t) from its limit and the bound it must respect.

    Returns (||psi(t) - e^{-i t hbar omega/2} psi_0 |0>||,
             e^{-hbar gamma t} sqrt(sum_{n>=1} |psi_n|^2)).
    """
    limit = asymptotic_state(params, psi0, t)
    evolved = evolve(params, psi0, t).state.amplitudes.copy()
    evolved[0] -= limit
    distance = float(np.linalg.norm(evolved))
    tail = float(np.sum(np.abs(psi0.amplitudes[1:]) ** 2))
    bound = math.exp(-params.hbar * params.gamma * t) * math.sqrt(tail)
    return distance, bound


def number_expectation(report: EvolutionReport) -> float:
    """<n> of the evolved state after dividing out its norm."""
    if report.norm_sq < EXTINCTION_FLOOR:
        raise ExtinctStateError(f"state norm underflowed at t={report.time} (norm_sq={report.norm_sq})")
    weights = np.abs(report.state.amplitudes) ** 2
    n = np.arange(report.state.dim, dtype=float)
    return float(np.sum(n * weights) / report.norm_sq)


def coherence_decay_rate(params: OscillatorParams, psi0: FockState, t: float) -> float:
    """Decay rate of psi_0^* psi_1 under evolve; equals hbar gamma."""
    if psi0.dim < 2 or t <= 0:
        raise StateError("coherence rate needs dim >= 2 and t > 0")
    before = np.conj(psi0.amplitudes[0]) * psi0.amplitudes[1]
    if before == 0:
        raise StateError("psi_0^* psi_1 vanishes; no coherence to track")
    amps = evolve(params, psi0, t).state.amplitudes
    after = np.conj(amps[0]) * amps[1]
    return -math.log(abs(after) / abs(before)) / t


def max_deviation(a: FockState, b: FockState) -> float:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot compare states of dim {a.dim} and {b.dim}")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def _check_forward(t: float) -> None:
    if not math.isfinite(t):
        raise BackwardEvolutionError(f"time must be finite (t={t})")
    if t < 0:
        raise BackwardEvolutionError(f"evolution is forward-only (t={t})")


def _check_level(n_max: int) -> None:
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative (got {n_max})")
