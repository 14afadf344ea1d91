"""
Dense complex linear algebra over finite Hilbert spaces.

Conventions used throughout the package:
    * Kronecker products are row-major with site 0 as the leftmost
      (slowest-varying) factor.
    * Hermiticity is judged by max-abs of H - H^dagger against
      ``settings.TOLERANCES.hermitian``.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, ResourceError, ValidationFailed


def check_dim(dim: int, what: str, cap: int = None) -> None:
    cap = settings.QHIER_CAP if cap is None else cap
    if dim > cap:
        raise ResourceError(what, dim, cap)


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Square complex matrix, immutable after construction.

    Attributes:
        matrix: dim x dim complex array (read-only view).
    """
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f'operator must be square, got shape {m.shape}')
        if not np.all(np.isfinite(m)):
            raise ValidationFailed('operator has non-finite entries')
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)

    @classmethod
    def coerce(cls, value: Union['Operator', np.ndarray, Sequence]) -> 'Operator':
        if isinstance(value, Operator):
            return value
        return cls(np.asarray(value))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> 'Operator':
        return Operator(self.matrix.conj().T)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def hermitian(self, tol: float = None) -> bool:
        tol = settings.TOLERANCES.hermitian if tol is None else tol
        return self.hermiticity_error() <= tol

    def unitary(self, tol: float = None) -> bool:
        tol = settings.TOLERANCES.hermitian if tol is None else tol
        gram = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(gram - np.eye(self.dim)))) <= tol

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Eigenvalues in ascending order (real for hermitian operators)."""
        if self.hermitian():
            return scipy.linalg.eigvalsh(self.matrix)
        return np.sort_complex(scipy.linalg.eigvals(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            return StateVector(self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: 'Operator') -> 'Operator':
        return Operator(self.matrix + Operator.coerce(other).matrix)

    def __sub__(self, other: 'Operator') -> 'Operator':
        return Operator(self.matrix - Operator.coerce(other).matrix)

    def __mul__(self, scalar: complex) -> 'Operator':
        return Operator(scalar * self.matrix)

    __rmul__ = __mul__

    def to_schema(self):
        from qhier_app.hilbert.schemas import SMatrix
        return SMatrix.from_array(self.matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector; ``normalized`` records whether the norm is 1 within 1e-12."""
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ArgumentError('state vector must be nonempty')
        if not np.all(np.isfinite(v)):
            raise ValidationFailed('state vector has non-finite amplitudes')
        v.setflags(write=False)
        object.__setattr__(self, 'amplitudes', v)

    @classmethod
    def coerce(cls, value: Union['StateVector', np.ndarray, Sequence]) -> 'StateVector':
        if isinstance(value, StateVector):
            return value
        return cls(np.asarray(value))

    @classmethod
    def basis(cls, dim: int, index: int) -> 'StateVector':
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def normalized(self) -> bool:
        return abs(self.norm - 1.0) <= settings.TOLERANCES.normalized

    def unit(self) -> 'StateVector':
        norm = self.norm
        if norm == 0.0:
            raise ArgumentError('cannot normalize the zero vector')
        return StateVector(self.amplitudes / norm)

    def projector(self) -> Operator:
        return Operator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class SpaceShape:
    site_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        if not dims or any(d < 1 for d in dims):
            raise ArgumentError(f'site dimensions must be positive, got {self.site_dims}')
        object.__setattr__(self, 'site_dims', dims)

    @classmethod
    def uniform(cls, n: int, d: int) -> 'SpaceShape':
        return cls((d,) * n)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.site_dims)

    def dims_of(self, sites: Sequence[int]) -> list[int]:
        return [self.site_dims[s] for s in sites]

    def check_sites(self, sites: Sequence[int]) -> None:
        if len(set(sites)) != len(sites):
            raise ArgumentError(f'duplicate sites in {list(sites)}')
        for s in sites:
            if not 0 <= s < self.n_sites:
                raise ArgumentError(f'site {s} outside [0, {self.n_sites})')


MatrixLike = Union[Operator, np.ndarray, Sequence]
VectorLike = Union[StateVector, np.ndarray, Sequence]


def require_hermitian(op: MatrixLike, what: str = 'operator') -> Operator:
    op = Operator.coerce(op)
    if not op.hermitian():
        raise ValidationFailed(f'{what} is not hermitian (max |H - H^+| = {op.hermiticity_error():.3e})')
    return op


def kron(a: MatrixLike, b: MatrixLike, cap: int = None) -> Operator:
    a, b = Operator.coerce(a), Operator.coerce(b)
    check_dim(a.dim * b.dim, 'kron', cap)
    return Operator(np.kron(a.matrix, b.matrix))


def direct_sum(blocks: Sequence[MatrixLike], cap: int = None) -> Operator:
    if not blocks:
        raise ArgumentError('direct_sum needs at least one block')
    mats = [Operator.coerce(b).matrix for b in blocks]
    check_dim(sum(m.shape[0] for m in mats), 'direct_sum', cap)
    return Operator(scipy.linalg.block_diag(*mats))


def _site_order(sites: Sequence[int], shape: SpaceShape) -> tuple[list[int], list[int]]:
    shape.check_sites(sites)
    rest = [s for s in range(shape.n_sites) if s not in sites]
    return list(sites), rest


def embed_local(op: MatrixLike, sites: Sequence[int], shape: SpaceShape, cap: int = None) -> Operator:
    """
    Extends a local operator to the whole space as ``op`` on ``sites`` and identity elsewhere.

    Args:
        op: Operator on the tensor product of ``sites`` in the listed order.
        sites: Distinct site indices; any order, not necessarily adjacent.
        shape: Site dimensions of the whole space.

    Returns:
        Operator: Operator of dimension ``shape.total_dim``.

    Raises:
        ArgumentError: If the dimension of ``op`` does not match the sites, or sites repeat.
    """
    op = Operator.coerce(op)
    sites, rest = _site_order(sites, shape)
    local_dim = math.prod(shape.dims_of(sites))
    if op.dim != local_dim:
        raise ArgumentError(f'operator dim {op.dim} does not match sites {sites} (dim {local_dim})')
    check_dim(shape.total_dim, 'embed_local', cap)
    n = shape.n_sites
    order = sites + rest
    dims_order = shape.dims_of(order)
    big = np.kron(op.matrix, np.eye(math.prod(shape.dims_of(rest))))
    tensor = big.reshape(dims_order + dims_order)
    inv = list(np.argsort(order))
    tensor = tensor.transpose(inv + [n + i for i in inv])
    return Operator(tensor.reshape(shape.total_dim, shape.total_dim))


def apply_local(op: MatrixLike, sites: Sequence[int], shape: SpaceShape, psi: VectorLike) -> np.ndarray:
    """Applies a local operator to a state without forming the embedded matrix."""
    op = Operator.coerce(op)
    psi = StateVector.coerce(psi)
    sites, rest = _site_order(sites, shape)
    if psi.dim != shape.total_dim:
        raise ArgumentError(f'state dim {psi.dim} does not match space dim {shape.total_dim}')
    local_dims = shape.dims_of(sites)
    if op.dim != math.prod(local_dims):
        raise ArgumentError(f'operator dim {op.dim} does not match sites {sites}')
    n = shape.n_sites
    order = sites + rest
    tensor = psi.amplitudes.reshape(shape.site_dims).transpose(order)
    flat = tensor.reshape(op.dim, -1)
    out = (op.matrix @ flat).reshape(shape.dims_of(order))
    return out.transpose(list(np.argsort(order))).reshape(-1)


def partial_trace(rho: MatrixLike, shape: SpaceShape, keep: Sequence[int]) -> Operator:
    rho = Operator.coerce(rho)
    if rho.dim != shape.total_dim:
        raise ArgumentError(f'density dim {rho.dim} does not match space dim {shape.total_dim}')
    keep, traced = _site_order(keep, shape)
    n = shape.n_sites
    perm = keep + traced
    tensor = rho.matrix.reshape(list(shape.site_dims) * 2)
    tensor = tensor.transpose(perm + [n + p for p in perm])
    dk = math.prod(shape.dims_of(keep))
    dt = math.prod(shape.dims_of(traced))
    tensor = tensor.reshape(dk, dt, dk, dt)
    return Operator(np.einsum('ajbj->ab', tensor))


def reduced_density(psi: VectorLike, shape: SpaceShape, keep: Sequence[int]) -> Operator:
    """Reduced density matrix of a pure state on ``keep`` (in the listed order)."""
    psi = StateVector.coerce(psi)
    if psi.dim != shape.total_dim:
        raise ArgumentError(f'state dim {psi.dim} does not match space dim {shape.total_dim}')
    keep, traced = _site_order(keep, shape)
    tensor = psi.amplitudes.reshape(shape.site_dims).transpose(keep + traced)
    flat = tensor.reshape(math.prod(shape.dims_of(keep)), -1)
    return Operator(flat @ flat.conj().T)


def propagator(h: MatrixLike, t: float) -> Operator:
    """exp(-iHt) of a hermitian H by eigendecomposition."""
    h = require_hermitian(h, 'Hamiltonian')
    evals, evecs = scipy.linalg.eigh(h.matrix)
    return Operator((evecs * np.exp(-1j * evals * t)) @ evecs.conj().T)


def evolve_exact(h: MatrixLike, psi: VectorLike, t: float) -> StateVector:
    h = require_hermitian(h, 'Hamiltonian')
    psi = StateVector.coerce(psi)
    if psi.dim != h.dim:
        raise ArgumentError(f'state dim {psi.dim} does not match Hamiltonian dim {h.dim}')
    if t == 0:
        return psi
    evals, evecs = scipy.linalg.eigh(h.matrix)
    coeffs = evecs.conj().T @ psi.amplitudes
    return StateVector(evecs @ (np.exp(-1j * evals * t) * coeffs))


def expectation(psi: VectorLike, o: MatrixLike) -> complex:
    psi = StateVector.coerce(psi)
    o = Operator.coerce(o)
    if psi.dim != o.dim:
        raise ArgumentError(f'state dim {psi.dim} does not match operator dim {o.dim}')
    value = complex(np.vdot(psi.amplitudes, o.matrix @ psi.amplitudes))
    if o.hermitian():
        return complex(value.real, 0.0)
    return value


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(scipy.linalg.svdvals(a)))


PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(word: str) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for char in word:
        out = np.kron(out, PAULI[char])
    return out


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, dim: int, rank: int = None) -> np.ndarray:
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
