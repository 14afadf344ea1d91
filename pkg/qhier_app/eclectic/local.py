"""
Per-term views of a global state: partial amplitudes, term energies and local pure states.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, NumericError
from qhier_app.hamiltonians.model import KLocalHamiltonian, LocalTerm
from qhier_app.hilbert.core import StateVector, VectorLike
from qhier_app.models import ExtractionMethod

PURITY_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class PartialAmplitudeFamily:
    """
    Residual vectors |psi_{l; i_1..i_k'}> obtained by fixing the term's site indices.

    Attributes:
        sites: Sites of the term, in term order.
        vectors: (d^k', d^(n-k')) array; row ``a`` is the residual for the local index tuple ``a``
            (row-major over the term's sites).
    """
    sites: tuple[int, ...]
    vectors: np.ndarray

    def index_tuples(self, d: int) -> list[tuple[int, ...]]:
        return list(np.ndindex(*(d,) * len(self.sites)))

    def norm_identity(self) -> float:
        """sum_a <psi_a|psi_a>; 1 for a normalized global state."""
        return math.fsum(float(np.vdot(v, v).real) for v in self.vectors)

    def gram(self) -> np.ndarray:
        """G[a, b] = <psi_a|psi_b>, the transpose of the reduced density matrix."""
        return self.vectors.conj() @ self.vectors.T


def _check_state(psi: VectorLike, h: KLocalHamiltonian) -> StateVector:
    psi = StateVector.coerce(psi)
    if psi.dim != h.full_dim:
        raise ArgumentError(f'state dim {psi.dim} does not match model dim {h.full_dim}')
    return psi


def partial_amplitudes(psi: VectorLike, term: LocalTerm, h: KLocalHamiltonian) -> PartialAmplitudeFamily:
    psi = _check_state(psi, h)
    h.shape.check_sites(term.sites)
    rest = [s for s in range(h.n) if s not in term.sites]
    tensor = psi.amplitudes.reshape((h.d,) * h.n).transpose(list(term.sites) + rest)
    return PartialAmplitudeFamily(term.sites, tensor.reshape(h.d ** term.locality, -1))


def local_energy(psi: VectorLike, term: LocalTerm, h: KLocalHamiltonian) -> float:
    """H_l = sum_ab <psi_a|psi_b> H_{l; ab}."""
    gram = partial_amplitudes(psi, term, h).gram()
    return float(np.sum(gram * term.matrix).real)


@dataclass(frozen=True, eq=False)
class LocalStateAssignment:
    sites: tuple[int, ...]
    state: np.ndarray
    method: ExtractionMethod
    energy: float
    target_energy: float
    purity: float

    @property
    def delta(self) -> float:
        return abs(self.energy - self.target_energy)


def _bracketing_pair(evals: np.ndarray, target: float) -> tuple[int, int]:
    upper = int(np.searchsorted(evals, target, side='left'))
    upper = min(max(upper, 1), len(evals) - 1)
    return upper - 1, upper


def extract_local_state(psi: VectorLike, term: LocalTerm, h: KLocalHamiltonian) -> LocalStateAssignment:
    """
    Picks a pure state of the term's sites carrying the same term energy as ``psi``.

    A pure reduced state is returned as is (its dominant eigenvector). Otherwise the state
    interpolates between the two eigenvectors of H_l whose eigenvalues bracket
    E = tr(rho_l H_l): |phi> = sqrt(theta) v_a + sqrt(1 - theta) v_b,
    theta = (lambda_b - E) / (lambda_b - lambda_a).

    Raises:
        NumericError: If E falls outside the spectrum of H_l.
    """
    rho = partial_amplitudes(psi, term, h).gram().T
    target = float(np.trace(rho @ term.matrix).real)
    purity = float(np.trace(rho @ rho).real)
    phi = None
    if purity > 1.0 - PURITY_SLACK:
        _, vecs = scipy.linalg.eigh(rho)
        phi = vecs[:, -1]
        method = ExtractionMethod.pure_reduced_state
        if abs(np.vdot(phi, term.matrix @ phi).real - target) > settings.TOLERANCES.local_energy:
            phi = None
    if phi is None:
        evals, evecs = scipy.linalg.eigh(term.matrix)
        slack = settings.TOLERANCES.local_energy
        if not evals[0] - slack <= target <= evals[-1] + slack:
            raise NumericError(f'term energy {target!r} outside [{evals[0]!r}, {evals[-1]!r}]')
        clipped = min(max(target, evals[0]), evals[-1])
        if len(evals) == 1:
            phi = evecs[:, 0]
        else:
            a, b = _bracketing_pair(evals, clipped)
            gap = evals[b] - evals[a]
            theta = 1.0 if gap <= 0.0 else (evals[b] - clipped) / gap
            theta = min(max(theta, 0.0), 1.0)
            phi = math.sqrt(theta) * evecs[:, a] + math.sqrt(1.0 - theta) * evecs[:, b]
        method = ExtractionMethod.eigenvector_interpolation
    phi = phi / np.linalg.norm(phi)
    value = float(np.vdot(phi, term.matrix @ phi).real)
    return LocalStateAssignment(term.sites, phi, method, value, target, purity)
