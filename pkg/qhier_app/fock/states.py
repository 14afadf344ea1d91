"""
Second-quantized states on C^d (x) F, with C^d the leftmost factor.

The stacked field is Psi = sum_i |i> (x) psi_i, a (d D) x D matrix. A component
|v> of rho becomes psi_v = (|v><v| (x) 1) Psi, and the state is
varrho = sum_mu p_mu psi_mu psi_mu^dagger (antinormal ordered), whose vacuum
expectation <vac|varrho|vac> reproduces rho.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from qhier_app.exceptions import ArgumentError, ValidationFailed
from qhier_app.fock.quantize import quadratic_form
from qhier_app.fock.space import FockOperator, FockSpace
from qhier_app.hilbert.core import MatrixLike, Operator, StateVector, commutator, require_hermitian

MIN_WEIGHT = 1e-12
WEIGHT_SUM_TOL = 1e-12


def stacked_field(space: FockSpace) -> np.ndarray:
    return space.annihilators.reshape(space.modes * space.dim, space.dim)


def lift_first_quantized(x: np.ndarray, space: FockSpace) -> np.ndarray:
    """x (x) 1_F on C^d (x) F."""
    return np.kron(x, np.eye(space.dim))


@dataclass(frozen=True, eq=False)
class SecondQuantizedState:
    """
    Attributes:
        space: Fock space of the field.
        weights: p_mu, each in [1e-12, 1], summing to 1.
        vectors: d x r matrix whose columns are the unit vectors |psi_mu>.
    """
    space: FockSpace
    weights: np.ndarray
    vectors: np.ndarray

    @property
    def rank(self) -> int:
        return self.weights.shape[0]

    @cached_property
    def fields(self) -> list[np.ndarray]:
        psi = stacked_field(self.space)
        return [lift_first_quantized(np.outer(v, v.conj()), self.space) @ psi for v in self.vectors.T]

    @cached_property
    def matrix(self) -> np.ndarray:
        return sum(p * f @ f.conj().T for p, f in zip(self.weights, self.fields))

    def density(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T

    def vacuum_expectation(self) -> np.ndarray:
        """<vac| varrho |vac> as a d x d matrix."""
        d, big = self.space.modes, self.matrix.reshape(self.space.modes, self.space.dim,
                                                        self.space.modes, self.space.dim)
        return big[:, 0, :, 0].reshape(d, d)


StateSpec = Union[StateVector, Operator, np.ndarray, Sequence[tuple[float, np.ndarray]]]


def _validated(weights: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if np.any(weights < MIN_WEIGHT) or np.any(weights > 1 + WEIGHT_SUM_TOL):
        raise ValidationFailed(f'weights must lie in [{MIN_WEIGHT}, 1], got {weights.tolist()}')
    if abs(float(np.sum(weights)) - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationFailed(f'weights sum to {float(np.sum(weights))!r}, expected 1')
    norms = np.linalg.norm(vectors, axis=0)
    if np.any(norms == 0):
        raise ValidationFailed('component vectors must be nonzero')
    return weights, vectors / norms


def second_quantize_state(spec: StateSpec, space: FockSpace) -> SecondQuantizedState:
    """
    Lifts a pure state, a density matrix or an explicit ensemble.

    Args:
        spec: StateVector (pure); Operator or 2-D array (density matrix, eigendecomposed,
            eigenvalues <= 1e-12 dropped); or a list of (weight, vector) pairs.
        space: Fock space with ``modes`` equal to the state dimension.

    Raises:
        ValidationFailed: If weights do not sum to 1 or fall outside [1e-12, 1].
        ArgumentError: On a dimension mismatch.
    """
    if isinstance(spec, StateVector) or (isinstance(spec, np.ndarray) and spec.ndim == 1):
        vector = StateVector.coerce(spec).unit().amplitudes
        weights, vectors = np.ones(1), vector[:, None]
    elif isinstance(spec, Operator) or (isinstance(spec, np.ndarray) and spec.ndim == 2):
        rho = require_hermitian(spec, 'density matrix').matrix
        evals, evecs = scipy.linalg.eigh(rho)
        keep = evals > MIN_WEIGHT
        weights, vectors = evals[keep][::-1], evecs[:, keep][:, ::-1]
    else:
        pairs = list(spec)
        if not pairs:
            raise ArgumentError('ensemble must have at least one component')
        weights = np.array([float(p) for p, _ in pairs])
        vectors = np.array([np.asarray(v, dtype=complex).reshape(-1) for _, v in pairs]).T
    if vectors.shape[0] != space.modes:
        raise ArgumentError(f'state dim {vectors.shape[0]} does not match {space.modes} modes')
    weights, vectors = _validated(np.asarray(weights, dtype=float), np.asarray(vectors, dtype=complex))
    return SecondQuantizedState(space, weights, vectors)


def mixed_state_hamiltonian(state: SecondQuantizedState, h: MatrixLike) -> FockOperator:
    """H_mix = sum_mu p_mu psi_mu^dagger H psi_mu, a quadratic form with kernel sum_mu p_mu <v|H|v> |v><v|."""
    h = require_hermitian(h, 'Hamiltonian').matrix
    kernel = np.zeros_like(h)
    for p, v in zip(state.weights, state.vectors.T):
        kernel = kernel + p * np.vdot(v, h @ v) * np.outer(v, v.conj())
    return quadratic_form(kernel, state.space, label='H_mix')


def evolved_state_matrix(state: SecondQuantizedState, h: np.ndarray, t: float) -> np.ndarray:
    """varrho(t) with every psi_mu evolved by the field equation psi_dot = -i H psi."""
    u = lift_first_quantized(scipy.linalg.expm(-1j * h * t), state.space)
    return u @ state.matrix @ u.conj().T


def mixed_bracket_with_hamiltonian(state: SecondQuantizedState, h: np.ndarray) -> np.ndarray:
    """
    {varrho, H}_Qbar from the weighted slot rule.

    dH/dzeta_mu = -i p_mu (H (x) 1) psi_mu; each component contributes
    (1/p_mu) p_mu (dH/dzeta_mu psi_mu^dagger + psi_mu dH/dzeta_mu^dagger).
    """
    big_h = lift_first_quantized(h, state.space)
    out = np.zeros_like(state.matrix)
    for p, f in zip(state.weights, state.fields):
        dh_dzeta = -1j * p * (big_h @ f)
        out += (1.0 / p) * p * (dh_dzeta @ f.conj().T + f @ dh_dzeta.conj().T)
    return out


@dataclass(frozen=True)
class VonNeumannResidual:
    dynamics: float
    bracket: float


def von_neumann_residual(state: SecondQuantizedState, h: MatrixLike, step: float = 1e-3) -> VonNeumannResidual:
    """
    Checks i varrho_dot = [H, varrho] = i {varrho, H}_Qbar at t = 0.

    ``dynamics`` compares a Richardson-extrapolated central difference of varrho(t) with
    the commutator; ``bracket`` compares the commutator with the slot-rule bracket.
    """
    h = require_hermitian(h, 'Hamiltonian').matrix
    if h.shape[0] != state.space.modes:
        raise ArgumentError(f'Hamiltonian dim {h.shape[0]} does not match {state.space.modes} modes')
    comm = commutator(lift_first_quantized(h, state.space), state.matrix)

    def central(width: float) -> np.ndarray:
        return (evolved_state_matrix(state, h, width) - evolved_state_matrix(state, h, -width)) / (2 * width)

    derivative = (4 * central(step / 2) - central(step)) / 3
    bracket = mixed_bracket_with_hamiltonian(state, h)
    return VonNeumannResidual(
        dynamics=float(np.max(np.abs(1j * derivative - comm), initial=0.0)),
        bracket=float(np.max(np.abs(comm - 1j * bracket), initial=0.0)),
    )
