"""
Second-quantized forms of a k-local model: per-term composite fields and the separable form.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.fock.quantize import one_excitation_block, one_excitation_state, second_quantize_hamiltonian
from qhier_app.fock.space import FockOperator, FockSpace, build_fock_space
from qhier_app.hamiltonians.model import KLocalHamiltonian, energy
from qhier_app.hilbert.core import StateVector, VectorLike, max_abs, reduced_density
from qhier_app.models import Statistics
from qhier_app.eclectic.local import extract_local_state


@dataclass(frozen=True, eq=False)
class FieldBlock:
    term: int
    sites: tuple[int, ...]
    operator: FockOperator


@dataclass(frozen=True, eq=False)
class ManyBodyField:
    """
    H = sum_l psi_l^dagger H_l psi_l, one composite d^k'-mode field per term.

    Blocks act on separate Fock factors; the operator is kept as its list of blocks.
    """
    model: KLocalHamiltonian
    blocks: tuple[FieldBlock, ...]

    @property
    def dims(self) -> list[int]:
        return [b.operator.space.dim for b in self.blocks]

    def one_excitation_residual(self) -> float:
        """max over blocks of |block_1(H_l) - H_l|."""
        return max((max_abs(one_excitation_block(b.operator).matrix - self.model.terms[b.term].matrix)
                    for b in self.blocks), default=0.0)

    def composite_state(self, psi: VectorLike) -> list[np.ndarray]:
        """One-excitation factor per block, built from the extracted local states of ``psi``."""
        out = []
        for block in self.blocks:
            local = extract_local_state(psi, self.model.terms[block.term], self.model)
            out.append(one_excitation_state(local.state, block.operator.space))
        return out

    def energy(self, factors: list[np.ndarray]) -> float:
        """<chi|H|chi> for the product state chi of normalized ``factors``."""
        return math.fsum(float(np.vdot(chi, b.operator.matrix @ chi).real)
                         for b, chi in zip(self.blocks, factors))


def second_quantized_many_body(h: KLocalHamiltonian, statistics: Statistics = Statistics.boson,
                               cutoff: int = 1, cap: int = None) -> ManyBodyField:
    """
    Quantizes every term on its own d^k'-mode Fock space.

    Raises:
        ResourceError: If a per-term space exceeds the cap.
    """
    spaces: dict[int, FockSpace] = {}
    blocks = []
    for index, term in enumerate(h.terms):
        modes = term.matrix.shape[0]
        if modes not in spaces:
            spaces[modes] = build_fock_space(modes, statistics, cutoff, cap)
        operator = second_quantize_hamiltonian(term.matrix, spaces[modes])
        blocks.append(FieldBlock(index, term.sites, operator))
    return ManyBodyField(h, tuple(blocks))


def site_mode(site: int, level: int, d: int) -> int:
    return site * d + level


def separable_space(h: KLocalHamiltonian, cap: int = None) -> FockSpace:
    """Boson space over d*n site modes holding one excitation per site."""
    return build_fock_space(h.d * h.n, Statistics.boson, h.n, cap)


def separable_form(h: KLocalHamiltonian, space: FockSpace = None) -> FockOperator:
    """
    sum_l sum_{ab} H_{l; ab} psi^dagger_{s_1 a_1} .. psi^dagger_{s_k a_k} psi_{s_k b_k} .. psi_{s_1 b_1}.

    Mode (s, i) is the level i of site s, index s*d + i.
    """
    space = separable_space(h) if space is None else space
    total = np.zeros((space.dim, space.dim), dtype=complex)
    for term in h.terms:
        tuples = list(np.ndindex(*(h.d,) * term.locality))
        creation, annihilation = [], []
        for levels in tuples:
            up = np.eye(space.dim, dtype=complex)
            down = np.eye(space.dim, dtype=complex)
            for site, level in zip(term.sites, levels):
                mode = site_mode(site, level, h.d)
                up = up @ space.creators[mode]
                down = space.annihilators[mode] @ down
            creation.append(up)
            annihilation.append(down)
        total += np.einsum('ab,axy,byz->xz', term.matrix, np.array(creation), np.array(annihilation))
    return FockOperator(space, total, number_conserving=True, label='H_sep')


def product_fock_state(factors: list[np.ndarray], space: FockSpace, d: int) -> np.ndarray:
    """prod_s (sum_i phi_{s,i} psi^dagger_{s,i}) |vac>."""
    chi = space.vacuum()
    for site, phi in enumerate(factors):
        raising = np.tensordot(np.asarray(phi, dtype=complex),
                               space.creators[site * d:(site + 1) * d], axes=1)
        chi = raising @ chi
    return chi


@dataclass(frozen=True)
class SeparableGap:
    energy_full: float
    energy_product: float
    energy_separable: float
    identity_residual: float
    gap: float
    identity_claimed: bool


def separable_gap_report(h: KLocalHamiltonian, psi: VectorLike, hsep: FockOperator = None) -> SeparableGap:
    """
    Evaluates H_sep on the product state of the dominant single-site eigenvectors of ``psi``.

    The product-state identity <prod|H|prod> = <chi_prod|H_sep|chi_prod> always holds; the
    gap to <psi|H|psi> closes only for product states, reported by ``identity_claimed``.
    """
    psi = StateVector.coerce(psi)
    hsep = separable_form(h) if hsep is None else hsep
    factors, purities = [], []
    for site in range(h.n):
        rho = reduced_density(psi, h.shape, [site]).matrix
        _, vecs = scipy.linalg.eigh(rho)
        factors.append(vecs[:, -1])
        purities.append(float(np.trace(rho @ rho).real))
    product = factors[0]
    for phi in factors[1:]:
        product = np.kron(product, phi)
    chi = product_fock_state(factors, hsep.space, h.d)
    e_full = energy(h, psi)
    e_product = energy(h, product)
    e_sep = float(np.vdot(chi, hsep.matrix @ chi).real)
    return SeparableGap(
        energy_full=e_full,
        energy_product=e_product,
        energy_separable=e_sep,
        identity_residual=abs(e_product - e_sep),
        gap=abs(e_full - e_sep),
        identity_claimed=all(p > 1.0 - settings.TOLERANCES.local_energy for p in purities),
    )
