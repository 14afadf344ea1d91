"""
The quantization hierarchy H_0 -> Sigma_0 -> H_1 -> Sigma_1 -> H_2 -> ...

Hamiltonization keeps the level index (H_i -> Sigma_i); quantization increments it
(Sigma_i -> H_{i+1}) on a fresh Fock space with one mode per complex coordinate.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, ResourceError, ValidationFailed
from qhier_app.fock.quantize import one_excitation_state, second_quantize_hamiltonian, sector_block
from qhier_app.fock.space import FockOperator, FockSpace, build_fock_space, fock_dim
from qhier_app.hamiltonization.phase_space import ClassicalSystem, hamiltonize
from qhier_app.hilbert.core import MatrixLike, require_hermitian
from qhier_app.models import LevelKind, Statistics

logger = logging.getLogger(__name__)

HIGHER_LEVEL_CUTOFF = 2
HIGHER_LEVEL_MAX_MODES = 12


@dataclass(frozen=True, eq=False)
class HierarchyLevel:
    index: int
    kind: LevelKind
    matrix: np.ndarray
    space: Optional[FockSpace] = None
    provenance: str = ''

    @property
    def dim(self) -> int:
        """Hilbert dimension, or complex dimension of the phase space."""
        return self.matrix.shape[0]

    @property
    def name(self) -> str:
        return f'{"H" if self.kind is LevelKind.hilbert else "Sigma"}_{self.index}'

    @property
    def system(self) -> ClassicalSystem:
        if self.kind is not LevelKind.phase_space:
            raise ArgumentError(f'{self.name} is not a phase-space level')
        return ClassicalSystem(self.matrix)

    @property
    def operator(self) -> FockOperator:
        if self.kind is not LevelKind.hilbert or self.space is None:
            raise ArgumentError(f'{self.name} carries no Fock operator')
        return FockOperator(self.space, self.matrix, number_conserving=True)


def root_level(h0: MatrixLike) -> HierarchyLevel:
    h0 = require_hermitian(h0, 'H_0')
    return HierarchyLevel(0, LevelKind.hilbert, h0.matrix, provenance='input')


def lift(level: HierarchyLevel, cutoff: Optional[int] = None,
         statistics: Statistics = Statistics.boson, cap: int = None) -> HierarchyLevel:
    """
    Applies the next map of the hierarchy to ``level``.

    Args:
        level: Current level.
        cutoff: N_tot of the new Fock space. Required for the first bosonic quantization;
            later quantizations default to 2.
        statistics: Statistics of the new field.
        cap: Dimension cap.

    Returns:
        HierarchyLevel: Sigma_i for a Hilbert level H_i, or H_{i+1} for a phase-space level Sigma_i.

    Raises:
        ArgumentError: If a required cutoff is missing.
        ResourceError: If the new space exceeds the cap, or a level >= 2 lift has more than 12 modes.
    """
    if level.kind is LevelKind.hilbert:
        system = hamiltonize(level.matrix)
        logger.info('hamiltonize %s: dim %d -> phase-space dim %d', level.name, level.dim, system.dim)
        return HierarchyLevel(level.index, LevelKind.phase_space, system.matrix,
                              provenance=f'hamiltonize({level.name})')

    statistics = Statistics(statistics)
    target = level.index + 1
    modes = level.dim
    if target >= 2:
        if modes > HIGHER_LEVEL_MAX_MODES:
            raise ResourceError(f'lift to H_{target} ({modes} modes, limit {HIGHER_LEVEL_MAX_MODES})',
                                fock_dim(modes, statistics, cutoff or HIGHER_LEVEL_CUTOFF),
                                settings.QHIER_CAP if cap is None else cap)
        cutoff = HIGHER_LEVEL_CUTOFF if cutoff is None else cutoff
    elif statistics is Statistics.boson and cutoff is None:
        raise ArgumentError(f'quantizing {level.name} onto a boson space needs a cutoff')
    space = build_fock_space(modes, statistics, cutoff, cap)
    hh = second_quantize_hamiltonian(level.matrix, space)
    logger.info('quantize %s -> H_%d: dim %d -> %d', level.name, target, modes, space.dim)
    return HierarchyLevel(target, LevelKind.hilbert, hh.matrix, space,
                          provenance=f'quantize({level.name}, {space.describe()})')


@dataclass
class HierarchyChain:
    levels: list[HierarchyLevel] = field(default_factory=list)
    cutoffs: list[Optional[int]] = field(default_factory=list)

    def hilbert_levels(self) -> list[HierarchyLevel]:
        return [lv for lv in self.levels if lv.kind is LevelKind.hilbert]

    def hilbert(self, index: int) -> HierarchyLevel:
        for lv in self.levels:
            if lv.kind is LevelKind.hilbert and lv.index == index:
                return lv
        raise ArgumentError(f'chain has no level H_{index}')

    def alternates(self) -> bool:
        kinds = [lv.kind for lv in self.levels]
        return all(a is not b for a, b in zip(kinds, kinds[1:]))


def build_chain(h0: MatrixLike, cutoffs: Sequence[Optional[int]], statistics: Statistics = Statistics.boson,
                cap: int = None) -> HierarchyChain:
    """H_0 followed by one (hamiltonize, quantize) pair per entry of ``cutoffs``."""
    chain = HierarchyChain([root_level(h0)], list(cutoffs))
    for cutoff in cutoffs:
        chain.levels.append(lift(chain.levels[-1]))
        chain.levels.append(lift(chain.levels[-1], cutoff, statistics, cap))
    return chain


@dataclass(frozen=True)
class EnergyMatch:
    state: np.ndarray
    energy_in: float
    energy_out: float

    @property
    def delta(self) -> float:
        return abs(self.energy_in - self.energy_out)


def energy_match_state(chain: HierarchyChain, index: int, psi) -> EnergyMatch:
    """
    Maps a state of H_index to the one-excitation state of H_{index+1} with the same energy.

    The zero vector maps to the vacuum (energy 0).
    """
    source, target = chain.hilbert(index), chain.hilbert(index + 1)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != source.dim:
        raise ArgumentError(f'state dim {psi.shape[0]} does not match {source.name} dim {source.dim}')
    chi = one_excitation_state(psi, target.space)
    return EnergyMatch(
        state=chi,
        energy_in=float(np.vdot(psi, source.matrix @ psi).real),
        energy_out=float(np.vdot(chi, target.matrix @ chi).real),
    )


def mixed_energy_match(rho: MatrixLike, h: MatrixLike, space: FockSpace) -> tuple[np.ndarray, float, float]:
    """
    sigma = sum_mu p_mu |chi_mu><chi_mu| from the eigendecomposition of rho.

    Returns:
        tuple: (sigma, tr(rho H), tr(sigma H_second_quantized)).
    """
    rho = require_hermitian(rho, 'density matrix').matrix
    h = require_hermitian(h, 'Hamiltonian').matrix
    if abs(np.trace(rho).real - 1.0) > settings.TOLERANCES.energy_match:
        raise ValidationFailed('density matrix must have unit trace')
    hh = second_quantize_hamiltonian(h, space)
    evals, evecs = scipy.linalg.eigh(rho)
    sigma = np.zeros((space.dim, space.dim), dtype=complex)
    for p, v in zip(evals, evecs.T):
        if p > 1e-12:
            chi = one_excitation_state(v, space)
            sigma += p * np.outer(chi, chi.conj())
    return sigma, float(np.trace(rho @ h).real), float(np.trace(sigma @ hh.matrix).real)


def one_excitation_faithfulness(previous: HierarchyLevel, level: HierarchyLevel) -> float:
    """max |block_1(H_{i+1}) - H_i|."""
    block = sector_block(level.operator, 1).matrix
    return float(np.max(np.abs(block - previous.matrix), initial=0.0))


def truncate_spectrum(values: np.ndarray, limit: int = 32) -> list[float]:
    return [float(v) for v in np.asarray(values)[:limit]]
