"""
Complex-time picture: along tau = (1 - i gamma/omega1) t the damped dynamics
is an undamped oscillator with the real Hamiltonian
H_tilde = hbar omega1 (a^dagger a + 1/2).
"""
import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from exceptions import BackwardEvolutionError
from .classical_core import OscillatorParams
from .mode_transform import ModePair, poisson_bracket_check
from .quantum_evolution import (EvolutionReport, FockState, evolve, ground_phase,
                                make_report, max_deviation)

EQUIVALENCE_TOLERANCE = 1e-12

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexTime:
    tau: complex
    t: float

    @property
    def conjugate(self) -> complex:
        return self.tau.conjugate()

    @property
    def modulus(self) -> float:
        return abs(self.tau)


@dataclass(frozen=True)
class TildeSpectrumLine:
    n: int
    energy: float


@dataclass(frozen=True)
class EquivalenceRow:
    t: float
    deviation: float
    passed: bool


def complex_time_of(params: OscillatorParams, t: float) -> ComplexTime:
    if not math.isfinite(t):
        raise BackwardEvolutionError(f"time must be finite (t={t})")
    if t < 0:
        raise BackwardEvolutionError(f"complex time is defined for t >= 0 (t={t})")
    # Re(tau) is t itself, not a product that could round
    return ComplexTime(tau=complex(t, -(params.gamma / params.omega1) * t), t=t)


def tilde_spectrum(params: OscillatorParams, n_max: int) -> List[TildeSpectrumLine]:
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative (got {n_max})")
    quantum = params.hbar * params.omega1
    return [TildeSpectrumLine(n, quantum * (n + 0.5)) for n in range(n_max + 1)]


def tilde_hamiltonian(params: OscillatorParams, m: ModePair) -> complex:
    """H_tilde = omega1 z z_conj."""
    return params.omega1 * m.z * m.z_conj


def tilde_equations_residual(params: OscillatorParams, m: ModePair) -> float:
    """|{z, H_tilde} + i omega1 z| and |{z_conj, H_tilde} - i omega1 z_conj|, whichever is larger."""
    bracket = poisson_bracket_check(params)
    omega1 = params.omega1
    dz = omega1 * m.z * (-bracket)
    dz_conj = omega1 * m.z_conj * bracket
    return max(abs(dz + 1j * omega1 * m.z), abs(dz_conj - 1j * omega1 * m.z_conj))


def mode_flow_tau(params: OscillatorParams, m0: ModePair, t: float) -> ModePair:
    """z(tau) = e^{-i omega1 tau} z(0), z_conj(tau*) = e^{i omega1 tau*} z_conj(0)."""
    ct = complex_time_of(params, t)
    omega1 = params.omega1
    return ModePair(cmath.exp(-1j * ct.tau * omega1) * m0.z,
                    cmath.exp(1j * ct.conjugate * omega1) * m0.z_conj)


def evolve_tau(params: OscillatorParams, psi0: FockState, t: float) -> EvolutionReport:
    """
    psi_n(tau) = e^{-i t hbar omega/2} e^{-i tau hbar omega1 n} psi_n.

    The ground phase runs on real time t, keeping the ground energy
    independent of gamma as in the complex-Hamiltonian picture.
    """
    ct = complex_time_of(params, t)
    n = np.arange(psi0.dim, dtype=float)
    factors = np.exp(-1j * ct.tau * params.hbar * params.omega1 * n)
    amps = ground_phase(params, t) * factors * psi0.amplitudes
    return make_report(t, FockState(amps))


def picture_equivalence_report(params: OscillatorParams, psi0: FockState,
                               times: Sequence[float], max_workers: int = 1) -> List[EquivalenceRow]:
    """Max per-coefficient gap between evolve and evolve_tau at each time, in input order."""
    for t in times:
        if t < 0:
            raise BackwardEvolutionError(f"times must be non-negative (t={t})")

    def compare(t: float) -> EquivalenceRow:
        deviation = max_deviation(evolve(params, psi0, t).state, evolve_tau(params, psi0, t).state)
        return EquivalenceRow(t=float(t), deviation=deviation,
                              passed=deviation <= EQUIVALENCE_TOLERANCE)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(compare, times))
    else:
        rows = [compare(t) for t in times]

    failed = sum(not row.passed for row in rows)
    if failed:
        logger.warning(f"Picture equivalence failed at {failed} of {len(rows)} times")
    return rows
