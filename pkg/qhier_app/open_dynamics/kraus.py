"""
Kraus maps on first-quantized states and observables and on their second-quantized lifts.

On the field the operators act on the mode index, psi -> K psi.
"""
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, UnsupportedFormError
from qhier_app.fock.quantize import quadratic_form
from qhier_app.fock.space import FockOperator
from qhier_app.fock.states import SecondQuantizedState, lift_first_quantized
from qhier_app.hilbert.core import Operator, max_abs
from qhier_app.models import Picture


@dataclass(frozen=True, eq=False)
class KrausMap:
    kraus: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(Operator.coerce(k).matrix for k in self.kraus)
        if not ops:
            raise ArgumentError('a Kraus map needs at least one operator')
        if len({k.shape for k in ops}) != 1:
            raise ArgumentError('Kraus operators must share one shape')
        object.__setattr__(self, 'kraus', ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.kraus)

    def completeness_error(self) -> float:
        return max_abs(self.completeness() - np.eye(self.dim))

    @property
    def trace_preserving(self) -> bool:
        return self.completeness_error() <= settings.TOLERANCES.hermitian

    @property
    def subnormalized(self) -> bool:
        """sum K^+ K <= 1 without equality."""
        if self.trace_preserving:
            return False
        return float(np.linalg.eigvalsh(self.completeness())[-1]) <= 1.0 + settings.TOLERANCES.hermitian

    def adjoint(self) -> 'KrausMap':
        return KrausMap(tuple(k.conj().T for k in self.kraus))


Target = Union[Operator, np.ndarray, SecondQuantizedState, FockOperator]


def _sandwich(ops, x: np.ndarray, picture: Picture) -> np.ndarray:
    if picture is Picture.schrodinger:
        return sum(k @ x @ k.conj().T for k in ops)
    return sum(k.conj().T @ x @ k for k in ops)


def kraus_apply(kraus_map: KrausMap, target: Target, picture: Picture = Picture.schrodinger):
    """
    Applies sum K (.) K^+ (Schrodinger) or sum K^+ (.) K (Heisenberg).

    Args:
        kraus_map: The map.
        target: A d x d matrix (rho or O); a SecondQuantizedState, whose varrho is mapped with K (x) 1;
            or a quadratic FockOperator psi^+ O psi, mapped to psi^+ E(O) psi.
        picture: Which of the two actions to apply.

    Returns:
        Operator, np.ndarray (varrho on C^d (x) F) or FockOperator, matching the target.

    Raises:
        ArgumentError: On a dimension mismatch.
        UnsupportedFormError: For a Fock operator without a quadratic kernel.
    """
    picture = Picture(picture)
    if isinstance(target, SecondQuantizedState):
        if target.space.modes != kraus_map.dim:
            raise ArgumentError(f'Kraus dim {kraus_map.dim} does not match {target.space.modes} modes')
        lifted = [lift_first_quantized(k, target.space) for k in kraus_map.kraus]
        return _sandwich(lifted, target.matrix, picture)
    if isinstance(target, FockOperator):
        if not target.quadratic:
            raise UnsupportedFormError('Kraus lifts act on quadratic forms psi^+ O psi only')
        if target.space.modes != kraus_map.dim:
            raise ArgumentError(f'Kraus dim {kraus_map.dim} does not match {target.space.modes} modes')
        kernel = _sandwich(kraus_map.kraus, target.kernel, picture)
        return quadratic_form(kernel, target.space, label=f'E({target.label})')
    x = Operator.coerce(target).matrix
    if x.shape[0] != kraus_map.dim:
        raise ArgumentError(f'Kraus dim {kraus_map.dim} does not match operand dim {x.shape[0]}')
    return Operator(_sandwich(kraus_map.kraus, x, picture))


def duality_residual(kraus_map: KrausMap, rho: np.ndarray, o: np.ndarray) -> float:
    """|tr(E(rho) O) - tr(rho E^+(O))|."""
    forward = kraus_apply(kraus_map, rho, Picture.schrodinger).matrix
    backward = kraus_apply(kraus_map, o, Picture.heisenberg).matrix
    return abs(np.trace(forward @ o) - np.trace(rho @ backward))


def amplitude_damping_kraus(p: float) -> KrausMap:
    """Single-step qubit decay with probability ``p``."""
    k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return KrausMap((k0, k1))
