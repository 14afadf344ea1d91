"""
Hamiltonization: a quantum pair (H, |psi>) read as a classical system on C^d.

Coordinates are psi_i with the conjugate chart zeta_i = i psi_i^*. Derivatives
are Wirtinger derivatives, psi and psi^* treated as independent.
"""
from dataclasses import dataclass

import numpy as np

from qhier_app.exceptions import ArgumentError
from qhier_app.hilbert.core import MatrixLike, Operator, StateVector, commutator, require_hermitian


@dataclass(frozen=True, eq=False)
class PhaseSpacePoint:
    psi: np.ndarray

    def __post_init__(self):
        v = np.array(self.psi, dtype=complex).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, 'psi', v)

    @classmethod
    def from_state(cls, state) -> 'PhaseSpacePoint':
        return cls(StateVector.coerce(state).amplitudes)

    @classmethod
    def from_real(cls, z: np.ndarray) -> 'PhaseSpacePoint':
        half = z.shape[0] // 2
        return cls(z[:half] + 1j * z[half:])

    @property
    def zeta(self) -> np.ndarray:
        return 1j * self.psi.conj()

    @property
    def dim(self) -> int:
        return self.psi.shape[0]

    def to_real(self) -> np.ndarray:
        return np.concatenate([self.psi.real, self.psi.imag])


@dataclass(frozen=True, eq=False)
class ObservableField:
    """A hermitian matrix F read as the function <psi|F|psi> on phase space."""
    matrix: np.ndarray

    def __post_init__(self):
        op = require_hermitian(self.matrix, 'observable')
        object.__setattr__(self, 'matrix', op.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def value(self, p: PhaseSpacePoint) -> float:
        return float(np.vdot(p.psi, self.matrix @ p.psi).real)

    def grad_psi(self, p: PhaseSpacePoint) -> np.ndarray:
        return self.matrix.T @ p.psi.conj()

    def grad_zeta(self, p: PhaseSpacePoint) -> np.ndarray:
        return -1j * (self.matrix @ p.psi)


@dataclass(frozen=True, eq=False)
class ClassicalSystem(ObservableField):
    """Hamilton function H(psi) = sum_ij psi_i^* H_ij psi_j."""

    def energy(self, p: PhaseSpacePoint) -> float:
        return self.value(p)

    @property
    def operator(self) -> Operator:
        return Operator(self.matrix)


def _check(p: PhaseSpacePoint, *fields: ObservableField):
    for f in fields:
        if f.dim != p.dim:
            raise ArgumentError(f'point dim {p.dim} does not match field dim {f.dim}')


def hamiltonize(h: MatrixLike) -> ClassicalSystem:
    return ClassicalSystem(require_hermitian(h, 'Hamiltonian').matrix)


def hamilton_vector_field(sys: ClassicalSystem, p: PhaseSpacePoint) -> tuple[np.ndarray, np.ndarray]:
    """(psi_dot, zeta_dot) = (dH/dzeta, -dH/dpsi); psi_dot equals -i H psi."""
    _check(p, sys)
    return sys.grad_zeta(p), -sys.grad_psi(p)


def bracket_from_gradients(df_psi, df_zeta, dg_psi, dg_zeta) -> complex:
    return complex(np.sum(df_psi * dg_zeta - df_zeta * dg_psi))


def poisson_bracket_classical(f: ObservableField, g: ObservableField, p: PhaseSpacePoint) -> tuple[float, float]:
    """
    Evaluates {F, G} at p.

    Returns:
        tuple[float, float]: The bracket from Wirtinger gradients and -i<psi|[F, G]|psi>.
    """
    _check(p, f, g)
    bracket = bracket_from_gradients(f.grad_psi(p), f.grad_zeta(p), g.grad_psi(p), g.grad_zeta(p))
    identity = -1j * np.vdot(p.psi, commutator(f.matrix, g.matrix) @ p.psi)
    return float(bracket.real), float(identity.real)


def bracket_field(f: ObservableField, g: ObservableField) -> ObservableField:
    """The observable whose value is {F, G}: matrix -i[F, G]."""
    return ObservableField(-1j * commutator(f.matrix, g.matrix))


def jacobi_residual_classical(f: ObservableField, g: ObservableField, e: ObservableField,
                              p: PhaseSpacePoint) -> float:
    _check(p, f, g, e)
    total = 0.0
    for a, b, c in ((f, g, e), (e, f, g), (g, e, f)):
        total += poisson_bracket_classical(a, bracket_field(b, c), p)[0]
    return abs(total)


def poisson_dynamics_residual(sys: ClassicalSystem, p: PhaseSpacePoint) -> float:
    """Max deviation of {psi_i, H} and {zeta_i, H} from -i H psi and i H^T zeta."""
    _check(p, sys)
    d = p.dim
    dh_psi, dh_zeta = sys.grad_psi(p), sys.grad_zeta(p)
    zeros, unit = np.zeros(d, dtype=complex), np.eye(d, dtype=complex)
    psi_dot = np.array([bracket_from_gradients(unit[i], zeros, dh_psi, dh_zeta) for i in range(d)])
    zeta_dot = np.array([bracket_from_gradients(zeros, unit[i], dh_psi, dh_zeta) for i in range(d)])
    expected_psi = -1j * (sys.matrix @ p.psi)
    expected_zeta = 1j * (sys.matrix.T @ p.zeta)
    return float(max(np.max(np.abs(psi_dot - expected_psi)), np.max(np.abs(zeta_dot - expected_zeta))))
