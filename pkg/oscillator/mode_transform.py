"""
Normal-mode transform of the damped oscillator.

The companion matrix A = [[0, 1], [-omega**2, -2 gamma]] has the conjugate
eigenvalues lambda_minus = -gamma - i omega1 and lambda_plus = -gamma + i omega1.
With U = (1/sqrt(2 omega1)) [[1, 1], [lambda_minus, lambda_plus]] the mode
variables (z, z_conj) = U^{-1} (x, p) evolve as pure exponentials.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from exceptions import ModePairError
from .classical_core import ClassicalState, OscillatorParams

MODE_PAIR_TOLERANCE = 1e-9

# Constant gradient (d/dx, d/dp) of a function linear in (x, p)
Gradient = Tuple[complex, complex]


@dataclass(frozen=True)
class EigenData:
    lambda_minus: complex
    lambda_plus: complex
    omega1: float


@dataclass(frozen=True, eq=False)
class TransformPair:
    forward: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        if self.forward.shape != (2, 2) or self.inverse.shape != (2, 2):
            raise ValueError("transform matrices must be 2x2")
        self.forward.setflags(write=False)
        self.inverse.setflags(write=False)


@dataclass(frozen=True)
class ModePair:
    z: complex
    z_conj: complex

    @property
    def is_real_pair(self) -> bool:
        return abs(self.z_conj - self.z.conjugate()) <= MODE_PAIR_TOLERANCE


def companion_matrix(params: OscillatorParams) -> np.ndarray:
    return np.array([[0.0, 1.0], [-params.omega ** 2, -2 * params.gamma]])


def eigen_data(params: OscillatorParams) -> EigenData:
    omega1 = params.omega1
    return EigenData(
        lambda_minus=complex(-params.gamma, -omega1),
        lambda_plus=complex(-params.gamma, omega1),
        omega1=omega1,
    )


def transform_pair(params: OscillatorParams) -> TransformPair:
    eig = eigen_data(params)
    scale = 1 / math.sqrt(2 * eig.omega1)
    forward = scale * np.array([[1, 1], [eig.lambda_minus, eig.lambda_plus]], dtype=complex)
    inverse = (-1j * scale) * np.array([[eig.lambda_plus, -1], [-eig.lambda_minus, 1]], dtype=complex)
    return TransformPair(forward, inverse)


def to_modes(params: OscillatorParams, s: ClassicalState) -> ModePair:
    omega1 = params.omega1
    scale = 1 / math.sqrt(2 * omega1)
    re = omega1 * s.x
    im = s.p + params.gamma * s.x
    return ModePair(complex(re, im) * scale, complex(re, -im) * scale)


def from_modes(params: OscillatorParams, m: ModePair) -> ClassicalState:
    """Apply U to (z, z_conj); the imaginary rounding residue of x and p is dropped."""
    if not m.is_real_pair:
        raise ModePairError(
            f"z_conj deviates from conj(z) by {abs(m.z_conj - m.z.conjugate()):.3e}"
        )
    eig = eigen_data(params)
    scale = 1 / math.sqrt(2 * eig.omega1)
    x = scale * (m.z + m.z_conj)
    p = scale * (eig.lambda_minus * m.z + eig.lambda_plus * m.z_conj)
    return ClassicalState(x.real, p.real)


def mode_flow(params: OscillatorParams, m0: ModePair, t: float) -> ModePair:
    """z(t) = e^{lambda_minus t} z(0), z_conj(t) = e^{lambda_plus t} z_conj(0)."""
    eig = eigen_data(params)
    return ModePair(cmath.exp(eig.lambda_minus * t) * m0.z,
                    cmath.exp(eig.lambda_plus * t) * m0.z_conj)


def mode_decay_rate(params: OscillatorParams, m0: ModePair, t: float) -> float:
    """-ln(|z(t)| / |z(0)|) / t; equals gamma."""
    if t <= 0 or m0.z == 0:
        raise ValueError("decay rate needs t > 0 and a non-zero mode amplitude")
    return -math.log(abs(mode_flow(params, m0, t).z) / abs(m0.z)) / t


def mode_gradients(params: OscillatorParams) -> Tuple[Gradient, Gradient]:
    """Constant partial derivatives (d/dx, d/dp) of z and z_conj."""
    omega1 = params.omega1
    scale = 1 / math.sqrt(2 * omega1)
    grad_z = (complex(omega1, params.gamma) * scale, 1j * scale)
    grad_z_conj = (complex(omega1, -params.gamma) * scale, -1j * scale)
    return grad_z, grad_z_conj


def poisson_bracket(grad_f: Gradient, grad_g: Gradient) -> complex:
    """{F, G} = dF/dx dG/dp - dG/dx dF/dp for functions with constant gradients."""
    return grad_f[0] * grad_g[1] - grad_g[0] * grad_f[1]


def poisson_bracket_check(params: OscillatorParams) -> complex:
    """{z_conj, z}; equals i for every valid parameter set."""
    grad_z, grad_z_conj = mode_gradients(params)
    return poisson_bracket(grad_z_conj, grad_z)


def complex_hamiltonian(params: OscillatorParams, m: ModePair) -> complex:
    """H = (omega1 - i gamma) z z_conj."""
    return complex(params.omega1, -params.gamma) * m.z * m.z_conj


def hamilton_equations_residual(params: OscillatorParams, m: ModePair) -> float:
    """
    Distance between the brackets {z, H}, {z_conj, H*} and the mode equations.

    H is bilinear in (z, z_conj), so {z, H} = (omega1 - i gamma) z {z, z_conj}
    and {z_conj, H*} = (omega1 + i gamma) z_conj {z_conj, z}.
    """
    eig = eigen_data(params)
    bracket = poisson_bracket_check(params)
    coeff = complex(params.omega1, -params.gamma)
    dz = coeff * m.z * (-bracket)
    dz_conj = coeff.conjugate() * m.z_conj * bracket
    return max(abs(dz - eig.lambda_minus * m.z), abs(dz_conj - eig.lambda_plus * m.z_conj))


def hamiltonian_limits(omega: float) -> Tuple[complex, complex]:
    """Coefficient of z z_conj in H for gamma -> 0 and gamma -> omega."""
    return complex(omega, 0.0), complex(0.0, -omega)
