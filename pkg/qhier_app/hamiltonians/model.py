import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, Diagnostic, ValidationFailed
from qhier_app.hilbert.core import (
    Operator,
    SpaceShape,
    StateVector,
    apply_local,
    check_dim,
    embed_local,
)


@dataclass(frozen=True, eq=False)
class LocalTerm:
    sites: tuple[int, ...]
    matrix: np.ndarray
    label: str = ''
    line: int = 0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)
        object.__setattr__(self, 'sites', tuple(int(s) for s in self.sites))

    @property
    def locality(self) -> int:
        return len(self.sites)

    @property
    def operator(self) -> Operator:
        return Operator(self.matrix)


@dataclass(frozen=True, eq=False)
class KLocalHamiltonian:
    """
    n-qudit Hamiltonian H = sum_l H_l, each term acting on at most k sites.

    Term order is kept as given; the eclectic construction indexes terms by position.
    """
    n: int
    d: int
    terms: tuple[LocalTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))

    @property
    def k(self) -> int:
        return max((t.locality for t in self.terms), default=0)

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def shape(self) -> SpaceShape:
        return SpaceShape.uniform(self.n, self.d)

    @property
    def full_dim(self) -> int:
        return self.d ** self.n

    def class_counts(self) -> dict[int, int]:
        """m_{k'} per locality class, ascending k'."""
        return dict(sorted(Counter(t.locality for t in self.terms).items()))

    def same_terms(self, other: 'KLocalHamiltonian', tol: float = 0.0) -> bool:
        if (self.n, self.d, self.m) != (other.n, other.d, other.m):
            return False
        for a, b in zip(self.terms, other.terms):
            if a.sites != b.sites or a.matrix.shape != b.matrix.shape:
                return False
            if np.max(np.abs(a.matrix - b.matrix), initial=0.0) > tol:
                return False
        return True


def validate(h: KLocalHamiltonian, k: Optional[int] = None) -> list[Diagnostic]:
    """
    Checks every model invariant and returns one diagnostic per violation.

    Args:
        h: The model.
        k: Declared maximum locality; defaults to the model's own.

    Returns:
        list[Diagnostic]: Empty iff the model is valid.
    """
    diagnostics = []
    if h.n < 1:
        diagnostics.append(Diagnostic(1, 1, f'site count must be positive, got {h.n}'))
    if h.d < 1:
        diagnostics.append(Diagnostic(1, 1, f'local dimension must be positive, got {h.d}'))
    if diagnostics:
        return diagnostics
    k = h.k if k is None else k
    tol = settings.TOLERANCES.hermitian
    for index, term in enumerate(h.terms):
        where = dict(line=term.line, column=1, term=index)
        if not term.sites:
            diagnostics.append(Diagnostic(message='term acts on no sites', **where))
            continue
        if term.locality > k:
            diagnostics.append(Diagnostic(message=f'locality {term.locality} exceeds k = {k}', **where))
        if len(set(term.sites)) != term.locality:
            diagnostics.append(Diagnostic(message=f'duplicate sites {list(term.sites)}', **where))
        bad = [s for s in term.sites if not 0 <= s < h.n]
        if bad:
            diagnostics.append(Diagnostic(message=f'site {bad[0]} out of range [0, {h.n})', **where))
        expected = h.d ** term.locality
        if term.matrix.shape != (expected, expected):
            diagnostics.append(Diagnostic(
                message=f'matrix shape {term.matrix.shape} does not match d^k\' = {expected}', **where))
            continue
        if not np.all(np.isfinite(term.matrix)):
            diagnostics.append(Diagnostic(message='matrix has non-finite entries', **where))
            continue
        error = float(np.max(np.abs(term.matrix - term.matrix.conj().T)))
        if error > tol:
            diagnostics.append(Diagnostic(message=f'matrix not hermitian (max |H - H^+| = {error:.3e})', **where))
    return diagnostics


def ensure_valid(h: KLocalHamiltonian, k: Optional[int] = None) -> KLocalHamiltonian:
    diagnostics = validate(h, k)
    if diagnostics:
        raise ValidationFailed('; '.join(str(d) for d in diagnostics))
    return h


def group_by_locality(h: KLocalHamiltonian) -> dict[int, list[LocalTerm]]:
    groups: dict[int, list[LocalTerm]] = {}
    for term in h.terms:
        groups.setdefault(term.locality, []).append(term)
    return dict(sorted(groups.items()))


def assemble_full(h: KLocalHamiltonian, terms: Sequence[LocalTerm] = None, cap: int = None) -> Operator:
    ensure_valid(h)
    check_dim(h.full_dim, 'assemble_full', cap)
    shape = h.shape
    total = np.zeros((h.full_dim, h.full_dim), dtype=complex)
    for term in (h.terms if terms is None else terms):
        total += embed_local(term.matrix, term.sites, shape, cap).matrix
    return Operator(total)


def term_energy(h: KLocalHamiltonian, term: LocalTerm, psi) -> float:
    """<psi|H_l|psi> on the full space, applied term-locally."""
    psi = StateVector.coerce(psi)
    applied = apply_local(term.matrix, term.sites, h.shape, psi)
    return float(np.vdot(psi.amplitudes, applied).real)


def energy(h: KLocalHamiltonian, psi) -> float:
    """<psi|H|psi> without forming the d^n x d^n matrix."""
    ensure_valid(h)
    psi = StateVector.coerce(psi)
    if psi.dim != h.full_dim:
        raise ArgumentError(f'state dim {psi.dim} does not match model dim {h.full_dim}')
    return math.fsum(term_energy(h, term, psi) for term in h.terms)


def _integer_root(value: int, power: int) -> int:
    root = round(value ** (1.0 / power))
    for candidate in (root - 1, root, root + 1):
        if candidate > 0 and candidate ** power == value:
            return candidate
    raise ArgumentError(f'{value} is not a perfect power {power}')


def embed_in_higher_locality(t: LocalTerm, target_k: int, partner_sites: Sequence[int]) -> LocalTerm:
    """
    Pads a term with identities on partner sites: (k-1)-local -> k-local.

    Args:
        t: Term to embed.
        target_k: Locality of the new term.
        partner_sites: Sites appended after ``t.sites``; disjoint from them.

    Returns:
        LocalTerm: Term with matrix ``t.matrix (x) 1`` on ``t.sites + partner_sites``.

    Raises:
        ArgumentError: On overlapping sites or a mismatching partner count.
    """
    partner_sites = tuple(int(s) for s in partner_sites)
    if t.locality >= target_k:
        raise ArgumentError(f'term is already {t.locality}-local, target {target_k}')
    if set(partner_sites) & set(t.sites) or len(set(partner_sites)) != len(partner_sites):
        raise ArgumentError(f'partner sites {list(partner_sites)} overlap term sites {list(t.sites)}')
    if t.locality + len(partner_sites) != target_k:
        raise ArgumentError(f'need {target_k - t.locality} partner sites, got {len(partner_sites)}')
    d = _integer_root(t.matrix.shape[0], t.locality)
    pad = np.eye(d ** len(partner_sites), dtype=complex)
    return LocalTerm(t.sites + partner_sites, np.kron(t.matrix, pad), label=t.label, line=t.line)


def lift_to_locality(t: LocalTerm, target_k: int, n: int) -> LocalTerm:
    """Embeds into ``target_k`` sites using the lowest-index free sites as partners."""
    if t.locality == target_k:
        return t
    free = [s for s in range(n) if s not in t.sites]
    return embed_in_higher_locality(t, target_k, free[:target_k - t.locality])
