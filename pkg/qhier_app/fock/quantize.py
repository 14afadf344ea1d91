"""
Second quantization of first-quantized matrices: X -> psi^dagger X psi.
"""
import numpy as np
import scipy.linalg

from qhier_app.exceptions import ArgumentError, UnsupportedFormError, ValidationFailed
from qhier_app.fock.space import FockOperator, FockSpace
from qhier_app.hilbert.core import MatrixLike, Operator, commutator, require_hermitian


def quadratic_form(kernel: np.ndarray, space: FockSpace, label: str = '') -> FockOperator:
    """sum_ij psi_i^dagger K_ij psi_j for any d x d kernel K."""
    kernel = np.asarray(kernel, dtype=complex)
    if kernel.shape != (space.modes, space.modes):
        raise ArgumentError(f'kernel shape {kernel.shape} does not match {space.modes} modes')
    matrix = np.einsum('ij,iab,jbc->ac', kernel, space.creators, space.annihilators)
    return FockOperator(space, matrix, kernel=kernel, number_conserving=True, label=label)


def second_quantize_hamiltonian(h: MatrixLike, space: FockSpace) -> FockOperator:
    """
    Builds the quadratic form H = psi^dagger H psi.

    Args:
        h: Hermitian d x d matrix, d = ``space.modes``.
        space: Target Fock space.

    Returns:
        FockOperator: Hermitian, number-conserving, tagged with ``h`` as kernel. No zero-point term.

    Raises:
        ValidationFailed: If ``h`` is not hermitian.
        ArgumentError: On a dimension mismatch.
    """
    h = require_hermitian(h, 'Hamiltonian')
    return quadratic_form(h.matrix, space, label='H')


def second_quantize_observable(o: MatrixLike, space: FockSpace) -> FockOperator:
    o = require_hermitian(o, 'observable')
    return quadratic_form(o.matrix, space, label='O')


def sector_block(hh: FockOperator, total: int) -> Operator:
    if not hh.commutes_with_number():
        raise ValidationFailed('sector restriction needs a number-conserving operator')
    idx = hh.space.sector(total)
    return Operator(hh.matrix[np.ix_(idx, idx)]) if idx.size else Operator(np.zeros((0, 0)))


def one_excitation_block(hh: FockOperator) -> Operator:
    """Restriction to the one-excitation sector in mode order; equals the kernel for quadratic forms."""
    return sector_block(hh, 1)


def one_excitation_state(psi: np.ndarray, space: FockSpace) -> np.ndarray:
    """|chi> = sum_i psi_i psi_i^dagger |vac>."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != space.modes:
        raise ArgumentError(f'state dim {psi.shape[0]} does not match {space.modes} modes')
    chi = np.zeros(space.dim, dtype=complex)
    if not np.any(psi):
        chi[0] = 1.0
        return chi
    chi[space.sector(1)] = psi
    return chi


def _field_derivatives(f: FockOperator) -> tuple[np.ndarray, np.ndarray]:
    """
    Formal derivatives of psi^dagger F psi = -i zeta F psi as coefficient matrices.

    dF/dpsi_i = sum_j zeta_j P[j, i] and dF/dzeta_i = sum_k Q[i, k] psi_k with P = Q = -iF.
    """
    if not f.quadratic:
        raise UnsupportedFormError('the quantum Poisson bracket is defined for quadratic forms only')
    return -1j * f.kernel, -1j * f.kernel


def quantum_poisson_bracket(f: FockOperator, g: FockOperator) -> FockOperator:
    """
    {F, G}_Q = sum_i (dF/dpsi_i dG/dzeta_i - dG/dpsi_i dF/dzeta_i), normal ordered.

    Closes to the quadratic form -i psi^dagger [F, G] psi.

    Raises:
        UnsupportedFormError: If either argument is not a tagged quadratic form.
        ArgumentError: If the arguments live on different spaces.
    """
    dpsi_f, dzeta_f = _field_derivatives(f)
    dpsi_g, dzeta_g = _field_derivatives(g)
    if f.space is not g.space:
        raise ArgumentError('bracket arguments must share one Fock space')
    # zeta P Q psi = i psi^dagger P Q psi
    kernel = 1j * (dpsi_f @ dzeta_g - dpsi_g @ dzeta_f)
    return quadratic_form(kernel, f.space, label=f'{{{f.label},{g.label}}}_Q')


def bracket_identity_residual(f: FockOperator, g: FockOperator) -> float:
    """|[F, G] - i{F, G}_Q| on the safe sector."""
    bracket = quantum_poisson_bracket(f, g)
    diff = commutator(f.matrix, g.matrix) - 1j * bracket.matrix
    return f.space.restricted(diff, deg=0)


def equal_time_residual(f: FockOperator, g: FockOperator) -> float:
    """|[F, G] - psi^dagger [F, G] psi| on the safe sector."""
    if not (f.quadratic and g.quadratic):
        raise UnsupportedFormError('equal-time identity needs quadratic forms')
    lifted = quadratic_form(commutator(f.kernel, g.kernel), f.space)
    return f.space.restricted(commutator(f.matrix, g.matrix) - lifted.matrix, deg=0)


def quantum_jacobi_residual(f: FockOperator, g: FockOperator, e: FockOperator) -> float:
    total = (quantum_poisson_bracket(f, quantum_poisson_bracket(g, e)).matrix
             + quantum_poisson_bracket(e, quantum_poisson_bracket(f, g)).matrix
             + quantum_poisson_bracket(g, quantum_poisson_bracket(e, f)).matrix)
    return f.space.restricted(total, deg=0)


def heisenberg_field_residual(space: FockSpace, h: MatrixLike) -> float:
    """max_i |[psi_i, H] - sum_j H_ij psi_j| on the safe sector (N <= N_tot - 1 for bosons)."""
    hh = second_quantize_hamiltonian(h, space)
    a = space.annihilators
    expected = np.einsum('ij,jab->iab', hh.kernel, a)
    return max(space.restricted(commutator(a[i], hh.matrix) - expected[i]) for i in range(space.modes))


def field_hamilton_residual(space: FockSpace, h: MatrixLike) -> tuple[float, float]:
    """
    Operator-valued Hamilton equations with zeta_i = i psi_i^dagger.

    psi_dot = -i[psi, H] against dH/dzeta = -i H psi, and
    zeta_dot = -i[zeta, H] against -dH/dpsi = i zeta H, both read off the kernel.

    Returns:
        tuple[float, float]: Residuals of the psi and zeta equations on the safe sector.
    """
    hh = second_quantize_hamiltonian(h, space)
    a, zeta = space.annihilators, 1j * space.creators
    dh_dzeta = -1j * np.einsum('ij,jab->iab', hh.kernel, a)
    minus_dh_dpsi = 1j * np.einsum('jab,ji->iab', zeta, hh.kernel)
    psi_res = max(space.restricted(-1j * commutator(a[i], hh.matrix) - dh_dzeta[i]) for i in range(space.modes))
    zeta_res = max(space.restricted(-1j * commutator(zeta[i], hh.matrix) - minus_dh_dpsi[i])
                   for i in range(space.modes))
    return psi_res, zeta_res


def heisenberg_observable(o: np.ndarray, h: np.ndarray, t: float) -> np.ndarray:
    """O_t = exp(iHt) O exp(-iHt)."""
    u = scipy.linalg.expm(-1j * h * t)
    return u.conj().T @ o @ u


def observable_heisenberg_residual(o: MatrixLike, h: MatrixLike, space: FockSpace, t: float,
                                   step: float = 1e-2) -> float:
    """
    Residual of i dO/dt = psi^dagger [O_t, H] psi at time t.

    The derivative is a central difference of t -> psi^dagger O_t psi, Richardson-extrapolated
    from steps ``step`` and ``step / 2``.
    """
    o = require_hermitian(o, 'observable').matrix
    h = require_hermitian(h, 'Hamiltonian').matrix

    def lifted(time: float) -> np.ndarray:
        return quadratic_form(heisenberg_observable(o, h, time), space).matrix

    def central(width: float) -> np.ndarray:
        return (lifted(t + width) - lifted(t - width)) / (2 * width)

    derivative = (4 * central(step / 2) - central(step)) / 3
    expected = quadratic_form(commutator(heisenberg_observable(o, h, t), h), space).matrix
    return space.restricted(1j * derivative - expected, deg=0)
