"""
Second-quantized master equations, checked against the first-quantized generator.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qhier_app.exceptions import ArgumentError
from qhier_app.fock.quantize import quadratic_form
from qhier_app.fock.space import FockSpace
from qhier_app.fock.states import SecondQuantizedState, lift_first_quantized
from qhier_app.hilbert.core import MatrixLike, anticommutator, commutator, require_hermitian
from qhier_app.open_dynamics.lindblad import LindbladModel


def _check_modes(m: LindbladModel, space: FockSpace) -> None:
    if m.dim != space.modes:
        raise ArgumentError(f'model dim {m.dim} does not match {space.modes} modes')


def lifted_observable_derivative(m: LindbladModel, o: np.ndarray, space: FockSpace) -> np.ndarray:
    """-i[O, H] + sum gamma psi^+ (L^+ O L - {L^+ L, O} / 2) psi with O, H the quadratic forms."""
    big_o = quadratic_form(o, space).matrix
    big_h = quadratic_form(m.h, space).matrix
    out = -1j * commutator(big_o, big_h)
    for jump, rate in m.ops:
        kernel = jump.conj().T @ o @ jump - 0.5 * anticommutator(jump.conj().T @ jump, o)
        out += rate * quadratic_form(kernel, space).matrix
    return out


def second_quantized_lindblad_observable(m: LindbladModel, o: MatrixLike, space: FockSpace) -> float:
    """
    max |dO/dt - psi^+ (dO/dt)_first-quantized psi| on the number-conserving sectors.

    Both sides are quadratic forms, so the comparison is exact in every sector of a
    truncated boson space.
    """
    _check_modes(m, space)
    o = require_hermitian(o, 'observable').matrix
    lifted = lifted_observable_derivative(m, o, space)
    expected = quadratic_form(m.adjoint_derivative(o), space).matrix
    return space.restricted(lifted - expected, deg=0)


def lifted_state_derivative(m: LindbladModel, varrho: np.ndarray, space: FockSpace) -> np.ndarray:
    """i[varrho, H] + sum gamma (L varrho L^+ - {L^+ L, varrho} / 2), every operator lifted as X (x) 1."""
    big_h = lift_first_quantized(m.h, space)
    out = 1j * commutator(varrho, big_h)
    for jump, rate in m.ops:
        big_l = lift_first_quantized(jump, space)
        decay = big_l.conj().T @ big_l
        out += rate * (big_l @ varrho @ big_l.conj().T - 0.5 * anticommutator(decay, varrho))
    return out


def _blocks(x: np.ndarray, d: int, dim: int) -> np.ndarray:
    """(d D, d D) -> (d^2, D^2): row (a, b) holds the Fock block <a| x |b>."""
    return x.reshape(d, dim, d, dim).transpose(0, 2, 1, 3).reshape(d * d, dim * dim)


def _unblocks(x: np.ndarray, d: int, dim: int) -> np.ndarray:
    return x.reshape(d, d, dim, dim).transpose(0, 2, 1, 3).reshape(d * dim, d * dim)


def evolved_state_lindblad(m: LindbladModel, state: SecondQuantizedState, t: float) -> np.ndarray:
    """(exp(t L) (x) id_F) applied to varrho, L acting on the C^d factor."""
    d, dim = state.space.modes, state.space.dim
    propagator = scipy.linalg.expm(t * m.superoperator())
    return _unblocks(propagator @ _blocks(state.matrix, d, dim), d, dim)


@dataclass(frozen=True)
class LindbladStateResidual:
    vacuum: float
    dynamics: float


def second_quantized_lindblad_state(m: LindbladModel, state: SecondQuantizedState,
                                    step: float = 1e-3) -> LindbladStateResidual:
    """
    Checks the operator-valued master equation for varrho.

    ``vacuum`` compares <vac| dvarrho/dt |vac> with the first-quantized derivative of rho;
    ``dynamics`` compares dvarrho/dt with a Richardson central difference of the lifted
    evolution exp(t L) (x) id_F.
    """
    _check_modes(m, state.space)
    derivative = lifted_state_derivative(m, state.matrix, state.space)
    d, dim = state.space.modes, state.space.dim
    vacuum_block = derivative.reshape(d, dim, d, dim)[:, 0, :, 0]
    expected = m.derivative(state.density())

    def central(width: float) -> np.ndarray:
        return (evolved_state_lindblad(m, state, width) - evolved_state_lindblad(m, state, -width)) / (2 * width)

    numeric = (4 * central(step / 2) - central(step)) / 3
    return LindbladStateResidual(
        vacuum=float(np.max(np.abs(vacuum_block - expected), initial=0.0)),
        dynamics=float(np.max(np.abs(numeric - derivative), initial=0.0)),
    )
