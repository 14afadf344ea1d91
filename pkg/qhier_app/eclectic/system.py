"""
The eclectic reconstruction of a k-local model.

Two layouts:
    padded     each locality class k' is padded to n_bar^k' terms; term l of the class gets a
               register tuple (l_1..l_k') in base n_bar and acts on the combined indices
               l_j * d + i_j. Classes below k are padded with identities up to (d n_bar)^k.
    directsum  every term is lifted to k-local and the blocks are stacked: dimension d^k m.

Energies pair block-diagonally: E = sum_l <phi_l|H_l|phi_l>.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError
from qhier_app.hamiltonians.builders import chain_edges, heisenberg_model
from qhier_app.hamiltonians.model import KLocalHamiltonian, energy, lift_to_locality, term_energy
from qhier_app.hilbert.core import StateVector, VectorLike, check_dim
from qhier_app.models import Layout
from qhier_app.eclectic.local import LocalStateAssignment, extract_local_state

logger = logging.getLogger(__name__)


def ceil_root(m: int, k: int) -> int:
    """Smallest r >= 1 with r^k >= m."""
    r = max(1, int(round(m ** (1.0 / k))))
    while r ** k < m:
        r += 1
    while r > 1 and (r - 1) ** k >= m:
        r -= 1
    return r


def padding_size(h: KLocalHamiltonian) -> int:
    """n_bar = max over classes of ceil(m_k'^(1/k'))."""
    return max((ceil_root(count, k) for k, count in h.class_counts().items()), default=1)


def layout_dim(h: KLocalHamiltonian, layout: Layout) -> int:
    if Layout(layout) is Layout.padded_tensor:
        return (h.d * padding_size(h)) ** h.k
    return h.d ** h.k * h.m


@dataclass(frozen=True, eq=False)
class EclecticBlock:
    """
    Attributes:
        term: Index l of the source term.
        locality: k' of the source term.
        register: Padded layout: base-n_bar digits of the term's position in its class.
        offset: Direct-sum layout: first row of the block.
        matrix: H_l (padded) or H_l lifted to k-local (direct sum).
    """
    term: int
    locality: int
    register: tuple[int, ...]
    offset: int
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class EclecticSystem:
    model: KLocalHamiltonian
    layout: Layout
    n_bar: int
    blocks: tuple[EclecticBlock, ...] = field(default_factory=tuple)

    @property
    def d(self) -> int:
        return self.model.d

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def dim(self) -> int:
        return layout_dim(self.model, self.layout)

    @property
    def width(self) -> int:
        return self.d * self.n_bar

    def class_blocks(self, locality: int) -> list[EclecticBlock]:
        return [b for b in self.blocks if b.locality == locality]

    def block_indices(self, block: EclecticBlock) -> np.ndarray:
        """Rows of the block: in the (d n_bar)^k' class space (padded) or the full space (direct sum)."""
        if self.layout is Layout.per_term_direct_sum:
            return block.offset + np.arange(block.matrix.shape[0])
        combined = [[r * self.d + i for i in range(self.d)] for r in block.register]
        grids = np.meshgrid(*combined, indexing='ij')
        return np.ravel_multi_index([g.reshape(-1) for g in grids], (self.width,) * block.locality)

    def class_matvec(self, locality: int, v: np.ndarray) -> np.ndarray:
        """Class operator H^[k'] applied to a vector of the (d n_bar)^k' space."""
        tensor = np.asarray(v, dtype=complex).reshape((self.n_bar, self.d) * locality)
        out = np.zeros_like(tensor)
        for block in self.class_blocks(locality):
            index = tuple(x for r in block.register for x in (r, slice(None)))
            sub = tensor[index].reshape(self.d ** locality)
            out[index] = (block.matrix @ sub).reshape((self.d,) * locality)
        return out.reshape(-1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """H_bar v without forming H_bar."""
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.shape[0] != self.dim:
            raise ArgumentError(f'vector dim {v.shape[0]} does not match eclectic dim {self.dim}')
        if self.layout is Layout.per_term_direct_sum:
            out = np.zeros_like(v)
            for block in self.blocks:
                rows = slice(block.offset, block.offset + block.matrix.shape[0])
                out[rows] = block.matrix @ v[rows]
            return out
        tensor = v.reshape((self.n_bar, self.d) * self.k)
        out = np.zeros_like(tensor)
        for block in self.blocks:
            index = tuple(x for r in block.register for x in (r, slice(None)))
            sub = tensor[index]
            rest = sub.shape[block.locality:]
            flat = sub.reshape(self.d ** block.locality, -1)
            out[index] += (block.matrix @ flat).reshape((self.d,) * block.locality + rest)
        return out.reshape(-1)

    def class_operator(self, locality: int, cap: int = None) -> np.ndarray:
        """Dense H^[k'] on (d n_bar)^k'; entries outside the term blocks are exactly zero."""
        size = self.width ** locality
        check_dim(size, f'class operator k\'={locality}', cap)
        dense = np.zeros((size, size), dtype=complex)
        for block in self.class_blocks(locality):
            rows = self.block_indices(block)
            dense[np.ix_(rows, rows)] = block.matrix
        return dense

    def dense(self, cap: int = None) -> np.ndarray:
        check_dim(self.dim, f'eclectic operator ({self.layout.value})', cap)
        if self.layout is Layout.per_term_direct_sum:
            dense = np.zeros((self.dim, self.dim), dtype=complex)
            for block in self.blocks:
                rows = slice(block.offset, block.offset + block.matrix.shape[0])
                dense[rows, rows] = block.matrix
            return dense
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for locality in sorted({b.locality for b in self.blocks}):
            pad = np.eye(self.width ** (self.k - locality), dtype=complex)
            total += np.kron(self.class_operator(locality, cap), pad)
        return total

    def block_energy(self, block: EclecticBlock, phi: np.ndarray) -> float:
        """<phi|H_bar|phi> with phi placed in the block's rows of its layout space."""
        phi = np.asarray(phi, dtype=complex).reshape(-1)
        if self.layout is Layout.per_term_direct_sum:
            return float(np.vdot(phi, block.matrix @ phi).real)
        v = np.zeros(self.width ** block.locality, dtype=complex)
        rows = self.block_indices(block)
        v[rows] = phi
        return float(np.vdot(v, self.class_matvec(block.locality, v)).real)


def _register(position: int, n_bar: int, locality: int) -> tuple[int, ...]:
    return tuple(int(x) for x in np.unravel_index(position, (n_bar,) * locality))


def build_eclectic(h: KLocalHamiltonian, layout: Layout = Layout.padded_tensor, cap: int = None) -> EclecticSystem:
    """
    Builds H_bar in the requested layout.

    Raises:
        ResourceError: If the layout dimension exceeds the cap.
    """
    layout = Layout(layout)
    n_bar = padding_size(h)
    dim = layout_dim(h, layout)
    check_dim(dim, f'eclectic {layout.value} layout', cap)
    blocks = []
    if layout is Layout.padded_tensor:
        positions: dict[int, int] = {}
        for index, term in enumerate(h.terms):
            position = positions.get(term.locality, 0)
            positions[term.locality] = position + 1
            blocks.append(EclecticBlock(index, term.locality, _register(position, n_bar, term.locality),
                                        0, term.matrix))
    else:
        offset = 0
        for index, term in enumerate(h.terms):
            lifted = lift_to_locality(term, h.k, h.n)
            blocks.append(EclecticBlock(index, term.locality, (), offset, lifted.matrix))
            offset += lifted.matrix.shape[0]
    system = EclecticSystem(h, layout, n_bar, tuple(blocks))
    if dim >= h.full_dim:
        logger.info('eclectic %s dimension %d >= full dimension %d (n = %d)',
                    layout.value, dim, h.full_dim, h.n)
    return system


@dataclass(frozen=True, eq=False)
class EclecticState:
    """
    Per-term local states placed in the blocks of an eclectic system, block weights 1.

    ``consistency`` is ``by-construction`` when the states come from one global state.
    """
    system: EclecticSystem
    locals: tuple[LocalStateAssignment, ...]
    consistency: str = 'by-construction'

    def block_states(self) -> list[np.ndarray]:
        """Local states in layout form: lifted with |0..0> on partner sites for the direct sum."""
        out = []
        for block, local in zip(self.system.blocks, self.locals):
            phi = local.state
            if phi.shape[0] != block.matrix.shape[0]:
                pad = np.zeros(block.matrix.shape[0] // phi.shape[0], dtype=complex)
                pad[0] = 1.0
                phi = np.kron(phi, pad)
            out.append(phi)
        return out

    def vector(self, normalized: bool = False) -> np.ndarray:
        """Direct-sum vector; with ``normalized`` every block carries weight 1/sqrt(m)."""
        if self.system.layout is not Layout.per_term_direct_sum:
            raise ArgumentError('a single eclectic vector exists only for the direct-sum layout')
        v = np.concatenate(self.block_states())
        return v / math.sqrt(len(self.locals)) if normalized else v

    def energies(self) -> list[float]:
        return [self.system.block_energy(b, phi) for b, phi in zip(self.system.blocks, self.block_states())]

    def energy(self) -> float:
        return math.fsum(self.energies())

    def normalized_energy(self) -> float:
        """m * sum_l (1/m) <phi_l|H_l|phi_l>: the unit-norm direct-sum reading."""
        m = len(self.locals)
        return m * math.fsum(e / m for e in self.energies())


def eclectic_state(psi: VectorLike, system: EclecticSystem, h: Optional[KLocalHamiltonian] = None) -> EclecticState:
    h = system.model if h is None else h
    psi = StateVector.coerce(psi)
    locals_ = tuple(extract_local_state(psi, term, h) for term in h.terms)
    return EclecticState(system, locals_)


def eclectic_state_from_locals(system: EclecticSystem, states: Sequence[np.ndarray]) -> EclecticState:
    """Wraps arbitrary local states; no global state is known to reproduce them."""
    if len(states) != system.model.m:
        raise ArgumentError(f'need {system.model.m} local states, got {len(states)}')
    locals_ = []
    for term, phi in zip(system.model.terms, states):
        phi = np.asarray(phi, dtype=complex).reshape(-1)
        if phi.shape[0] != term.matrix.shape[0]:
            raise ArgumentError(f'local state dim {phi.shape[0]} does not match term dim {term.matrix.shape[0]}')
        value = float(np.vdot(phi, term.matrix @ phi).real)
        locals_.append(LocalStateAssignment(term.sites, phi, None, value, value, 1.0))
    return EclecticState(system, tuple(locals_), consistency='unverified')


@dataclass(frozen=True)
class TermIdentity:
    term: int
    sites: tuple[int, ...]
    energy_full: float
    energy_block: float

    @property
    def delta(self) -> float:
        return abs(self.energy_full - self.energy_block)


@dataclass(frozen=True)
class EnergyIdentity:
    per_term: tuple[TermIdentity, ...]
    energy_full: float
    energy_eclectic: float
    energy_normalized: float
    consistency: str

    @property
    def delta(self) -> float:
        return abs(self.energy_full - self.energy_eclectic)

    @property
    def passed(self) -> bool:
        return self.delta <= settings.TOLERANCES.eclectic_energy


def verify_energy_identity(psi: VectorLike, system: EclecticSystem,
                           h: Optional[KLocalHamiltonian] = None, state: EclecticState = None) -> EnergyIdentity:
    """Compares <psi|H|psi> on the full space with the block-sum energy of the eclectic state."""
    h = system.model if h is None else h
    psi = StateVector.coerce(psi)
    state = eclectic_state(psi, system, h) if state is None else state
    blocks = state.energies()
    per_term = tuple(TermIdentity(index, term.sites, term_energy(h, term, psi), block)
                     for index, (term, block) in enumerate(zip(h.terms, blocks)))
    return EnergyIdentity(
        per_term=per_term,
        energy_full=energy(h, psi),
        energy_eclectic=math.fsum(blocks),
        energy_normalized=state.normalized_energy(),
        consistency=state.consistency,
    )


@dataclass(frozen=True)
class DimensionRow:
    n: int
    d: int
    k: int
    m: int
    classes: dict[int, int]
    n_bar: int
    full: int
    padded: int
    direct_sum: int

    @property
    def crossover(self) -> bool:
        """The padded eclectic space is not smaller than the full one."""
        return self.padded >= self.full


def dimension_row(h: KLocalHamiltonian) -> DimensionRow:
    return DimensionRow(n=h.n, d=h.d, k=h.k, m=h.m, classes=h.class_counts(), n_bar=padding_size(h),
                        full=h.full_dim, padded=layout_dim(h, Layout.padded_tensor),
                        direct_sum=layout_dim(h, Layout.per_term_direct_sum))


def dimension_report(h: Optional[KLocalHamiltonian] = None, sweep: Sequence[int] = (),
                     warn: bool = True) -> list[DimensionRow]:
    """
    Dimension table for ``h`` followed by Heisenberg chains with ``n`` in ``sweep``.

    Only counts are computed; no operator is built.
    """
    rows = [] if h is None else [dimension_row(h)]
    for n in sweep:
        rows.append(dimension_row(heisenberg_model(n, 2, chain_edges(n))))
    for row in rows:
        if warn and row.crossover:
            logger.warning('crossover at n = %d: eclectic dimension %d >= full dimension %d',
                           row.n, row.padded, row.full)
    return rows


def format_dimension_table(rows: Sequence[DimensionRow]) -> str:
    lines = [f'{"n":>3} {"m":>4} {"n_bar":>5} {"d^n":>10} {"(d n_bar)^k":>12} {"d^k m":>8}  note']
    for row in rows:
        note = 'crossover' if row.crossover else ''
        lines.append(f'{row.n:>3} {row.m:>4} {row.n_bar:>5} {row.full:>10} {row.padded:>12} {row.direct_sum:>8}  {note}'
                     .rstrip())
    return '\n'.join(lines)
