from typing import Optional, Sequence

import numpy as np

from qhier_app.exceptions import ArgumentError
from qhier_app.hamiltonians.model import KLocalHamiltonian, LocalTerm, ensure_valid
from qhier_app.hilbert.core import PAULI, pauli_string, random_hermitian

HEISENBERG_COUPLING = pauli_string('XX') + pauli_string('YY') + pauli_string('ZZ')


def chain_edges(n: int, ring: bool = False) -> list[tuple[int, int]]:
    edges = [(i, i + 1) for i in range(n - 1)]
    if ring and n > 2:
        edges.append((n - 1, 0))
    return edges


def heisenberg_model(n: int, d: int = 2, edges: Sequence[tuple[int, int]] = None,
                     fields: Optional[Sequence[np.ndarray]] = None,
                     couplings: Optional[Sequence[np.ndarray]] = None,
                     J: float = 1.0, h: float = 0.0) -> KLocalHamiltonian:
    """
    Heisenberg model on an explicit edge list: n field terms followed by one coupling per edge.

    Args:
        n: Number of sites.
        d: Local dimension.
        edges: Site pairs; defaults to the open chain.
        fields: Per-site d x d matrices; defaults to h * sigma_z (d = 2 only).
        couplings: Per-edge d^2 x d^2 matrices; defaults to J (XX + YY + ZZ) (d = 2 only).
        J: Default coupling strength.
        h: Default field strength.

    Returns:
        KLocalHamiltonian: Model with n 1-local and len(edges) 2-local terms.

    Raises:
        ArgumentError: If default generators are requested for d != 2 or counts mismatch.
    """
    edges = chain_edges(n) if edges is None else [tuple(e) for e in edges]
    if d != 2 and (fields is None or couplings is None):
        raise ArgumentError(f'default Heisenberg generators need d = 2, got d = {d}; pass explicit matrices')
    if fields is None:
        fields = [h * PAULI['Z']] * n
    if couplings is None:
        couplings = [J * HEISENBERG_COUPLING] * len(edges)
    if len(fields) != n:
        raise ArgumentError(f'expected {n} field matrices, got {len(fields)}')
    if len(couplings) != len(edges):
        raise ArgumentError(f'expected {len(edges)} coupling matrices, got {len(couplings)}')

    terms = [LocalTerm((i,), field, label=f'field{i}') for i, field in enumerate(fields)]
    terms += [LocalTerm(edge, coupling, label=f'bond{edge[0]}-{edge[1]}') for edge, coupling in zip(edges, couplings)]
    return ensure_valid(KLocalHamiltonian(n=n, d=d, terms=tuple(terms)), k=2)


def random_model(rng: np.random.Generator, n: int, d: int, k: int, m: int = None) -> KLocalHamiltonian:
    """Random k-local model: every site gets a field, then m random terms of locality 2..k."""
    if k > n:
        raise ArgumentError(f'locality {k} exceeds site count {n}')
    terms = [LocalTerm((i,), random_hermitian(rng, d), label=f'field{i}') for i in range(n)]
    m = n if m is None else m
    for index in range(m if k > 1 else 0):
        locality = int(rng.integers(2, k + 1))
        sites = tuple(int(s) for s in rng.choice(n, size=locality, replace=False))
        terms.append(LocalTerm(sites, random_hermitian(rng, d ** locality), label=f'random{index}'))
    return ensure_valid(KLocalHamiltonian(n=n, d=d, terms=tuple(terms)), k=k)
