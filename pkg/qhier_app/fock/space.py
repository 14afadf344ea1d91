"""
Occupation-number spaces and ladder operators.

Basis states are graded by total number; within a grade they follow descending
lexicographic order, so the one-excitation grade lists modes in order 0..d-1 and
the vacuum is basis index 0. Bosons are truncated by total excitation number
N_tot. Fermions use the Jordan-Wigner sign (-1)^(n_0 + ... + n_{i-1}).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, ValidationFailed
from qhier_app.hilbert.core import check_dim, commutator, max_abs
from qhier_app.models import LadderKind, Statistics

logger = logging.getLogger(__name__)


def _grade(total: int, modes: int, limit: int) -> Iterator[tuple[int, ...]]:
    if modes == 1:
        if total <= limit:
            yield (total,)
        return
    for first in range(min(total, limit), -1, -1):
        for rest in _grade(total - first, modes - 1, limit):
            yield (first,) + rest


def fock_dim(modes: int, statistics: Statistics, cutoff: Optional[int]) -> int:
    if Statistics(statistics) is Statistics.fermion:
        return 2 ** modes
    return math.comb(cutoff + modes, modes)


@dataclass(frozen=True, eq=False)
class FockSpace:
    """
    Truncated bosonic or exact fermionic Fock space over ``modes`` modes.

    Attributes:
        modes: Number of field modes d.
        statistics: Boson or fermion.
        cutoff: N_tot for bosons; None for fermions.
        basis: Occupation vectors in basis order.
    """
    modes: int
    statistics: Statistics
    cutoff: Optional[int]
    basis: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_boson(self) -> bool:
        return self.statistics is Statistics.boson

    @cached_property
    def occupations(self) -> np.ndarray:
        return np.array(self.basis, dtype=int).reshape(self.dim, self.modes)

    @cached_property
    def totals(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {occ: i for i, occ in enumerate(self.basis)}

    @cached_property
    def annihilators(self) -> np.ndarray:
        """Array of shape (modes, dim, dim); slice i is the matrix of psi_i."""
        out = np.zeros((self.modes, self.dim, self.dim), dtype=complex)
        for col, occ in enumerate(self.basis):
            for i, n_i in enumerate(occ):
                if n_i == 0:
                    continue
                target = occ[:i] + (n_i - 1,) + occ[i + 1:]
                if self.is_boson:
                    value = math.sqrt(n_i)
                else:
                    value = -1.0 if sum(occ[:i]) % 2 else 1.0
                out[i, self.index[target], col] = value
        out.setflags(write=False)
        return out

    @cached_property
    def creators(self) -> np.ndarray:
        out = np.ascontiguousarray(self.annihilators.conj().transpose(0, 2, 1))
        out.setflags(write=False)
        return out

    @cached_property
    def number_operator(self) -> np.ndarray:
        return np.diag(self.totals.astype(complex))

    def sector(self, total: int) -> np.ndarray:
        """Basis indices with exactly ``total`` excitations."""
        return np.flatnonzero(self.totals == total)

    def safe_indices(self, deg: int = 1) -> np.ndarray:
        """
        Basis indices on which identities of number transfer ``deg`` hold exactly.

        Fermion spaces are exact everywhere; boson spaces keep total <= N_tot - deg.
        """
        if not self.is_boson:
            return np.arange(self.dim)
        return np.flatnonzero(self.totals <= self.cutoff - deg)

    def safe_label(self, deg: int = 1) -> str:
        if not self.is_boson:
            return 'full'
        return f'N<={self.cutoff - deg}'

    def restricted(self, x: np.ndarray, deg: int = 1) -> float:
        """max |x| over the columns of the safe sector (x applied to safe states)."""
        return max_abs(x[:, self.safe_indices(deg)])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def describe(self) -> str:
        cutoff = f', N_tot={self.cutoff}' if self.is_boson else ''
        return f'{self.statistics.value} d={self.modes}{cutoff} dim={self.dim}'


def build_fock_space(d: int, statistics: Statistics = Statistics.boson, cutoff: Optional[int] = None,
                     cap: int = None) -> FockSpace:
    """
    Enumerates the occupation basis.

    Args:
        d: Number of modes, at least 1.
        statistics: Boson or fermion.
        cutoff: Total excitation bound N_tot (bosons, at least 1); ignored for fermions.
        cap: Dimension cap; defaults to the configured one.

    Returns:
        FockSpace: Space of dimension C(N_tot + d, d) (bosons) or 2^d (fermions).

    Raises:
        ArgumentError: On d < 1 or a missing or nonpositive boson cutoff.
        ResourceError: If the dimension exceeds the cap.
    """
    statistics = Statistics(statistics)
    if d < 1:
        raise ArgumentError(f'mode count must be positive, got {d}')
    if statistics is Statistics.boson:
        if cutoff is None or cutoff < 1:
            raise ArgumentError(f'boson spaces need a cutoff N_tot >= 1, got {cutoff}')
        limit = cutoff
    else:
        cutoff, limit = None, 1
    dim = fock_dim(d, statistics, cutoff)
    check_dim(dim, f'Fock space ({statistics.value}, d={d})', cap)
    max_total = cutoff if statistics is Statistics.boson else d
    basis = tuple(occ for total in range(max_total + 1) for occ in _grade(total, d, limit))
    space = FockSpace(modes=d, statistics=statistics, cutoff=cutoff, basis=basis)
    logger.info('built Fock space: %s', space.describe())
    return space


@dataclass(frozen=True, eq=False)
class FockOperator:
    """
    Matrix on a Fock space.

    Attributes:
        space: The Fock space.
        matrix: dim x dim complex matrix in the occupation basis.
        kernel: d x d matrix K when the operator is the quadratic form psi^dagger K psi.
        number_conserving: Claimed commutation with the total number operator; verified on construction.
        label: Free-form description.
    """
    space: FockSpace
    matrix: np.ndarray
    kernel: Optional[np.ndarray] = None
    number_conserving: bool = False
    label: str = ''

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ArgumentError(f'matrix shape {m.shape} does not match Fock dim {self.space.dim}')
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)
        if self.kernel is not None:
            k = np.array(self.kernel, dtype=complex)
            k.setflags(write=False)
            object.__setattr__(self, 'kernel', k)
        if self.number_conserving:
            error = max_abs(commutator(m, self.space.number_operator))
            if error > settings.TOLERANCES.field:
                raise ValidationFailed(f'operator claimed number-conserving but |[X, N]| = {error:.3e}')

    @property
    def quadratic(self) -> bool:
        return self.kernel is not None

    def commutes_with_number(self, tol: float = None) -> bool:
        tol = settings.TOLERANCES.field if tol is None else tol
        return max_abs(commutator(self.matrix, self.space.number_operator)) <= tol


def ladder_matrix(space: FockSpace, i: int, kind: LadderKind = LadderKind.annihilate) -> FockOperator:
    if not 0 <= i < space.modes:
        raise ArgumentError(f'mode {i} outside [0, {space.modes})')
    kind = LadderKind(kind)
    matrix = space.annihilators[i] if kind is LadderKind.annihilate else space.creators[i]
    return FockOperator(space, matrix, label=f'{kind.value}[{i}]')


def zeta_view(space: FockSpace) -> np.ndarray:
    """zeta_i = i psi_i^dagger, derived on demand."""
    return 1j * space.creators
