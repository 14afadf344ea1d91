"""
Markovian master equations: the Lindblad generator and its fixed-step RK4 integration.

Vectorization is row-major, vec(A rho B) = (A (x) B^T) vec(rho).
"""
import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qhier_app.exceptions import ArgumentError, ValidationFailed
from qhier_app.hilbert.core import MatrixLike, Operator, anticommutator, check_dim, commutator, require_hermitian

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 2000
DENSITY_TOL = 1e-10

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """
    Hamiltonian plus dissipators (L_alpha, gamma_alpha).

    Raises:
        ArgumentError: On mismatching dimensions.
        ValidationFailed: On a negative rate or a non-hermitian Hamiltonian.
    """
    h: np.ndarray
    ops: tuple[tuple[np.ndarray, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        h = require_hermitian(self.h, 'Hamiltonian').matrix
        object.__setattr__(self, 'h', h)
        ops = []
        for jump, rate in self.ops:
            jump = Operator.coerce(jump).matrix
            if jump.shape != h.shape:
                raise ArgumentError(f'jump operator shape {jump.shape} does not match Hamiltonian {h.shape}')
            if not rate >= 0:
                raise ValidationFailed(f'dissipation rates must be nonnegative, got {rate}')
            ops.append((jump, float(rate)))
        object.__setattr__(self, 'ops', tuple(ops))

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def derivative(self, rho: np.ndarray) -> np.ndarray:
        """-i[H, rho] + sum gamma (L rho L^+ - {L^+ L, rho} / 2)."""
        out = -1j * commutator(self.h, rho)
        for jump, rate in self.ops:
            out += rate * (jump @ rho @ jump.conj().T - 0.5 * anticommutator(jump.conj().T @ jump, rho))
        return out

    def adjoint_derivative(self, o: np.ndarray) -> np.ndarray:
        """Heisenberg picture: i[H, O] + sum gamma (L^+ O L - {L^+ L, O} / 2)."""
        out = 1j * commutator(self.h, o)
        for jump, rate in self.ops:
            out += rate * (jump.conj().T @ o @ jump - 0.5 * anticommutator(jump.conj().T @ jump, o))
        return out

    def superoperator(self, cap: int = None) -> np.ndarray:
        d = self.dim
        check_dim(d * d, 'Lindblad superoperator', cap)
        eye = np.eye(d, dtype=complex)
        out = -1j * (np.kron(self.h, eye) - np.kron(eye, self.h.T))
        for jump, rate in self.ops:
            decay = jump.conj().T @ jump
            out += rate * (np.kron(jump, jump.conj()) - 0.5 * np.kron(decay, eye) - 0.5 * np.kron(eye, decay.T))
        return out

    def effective_hamiltonian(self) -> np.ndarray:
        """H - (i/2) sum gamma L^+ L."""
        return self.h - 0.5j * sum((rate * jump.conj().T @ jump for jump, rate in self.ops),
                                   np.zeros_like(self.h))

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.h).tobytes())
        for jump, rate in self.ops:
            digest.update(np.ascontiguousarray(jump).tobytes())
            digest.update(np.float64(rate).tobytes())
        return digest.hexdigest()


def amplitude_damping(gamma: float = 1.0, h: MatrixLike = None) -> LindbladModel:
    """Qubit decay |1> -> |0> with L = sigma^- and rate ``gamma``; H = 0 unless given."""
    h = np.zeros((2, 2), dtype=complex) if h is None else h
    return LindbladModel(h, ((SIGMA_MINUS, gamma),))


def require_density(rho: MatrixLike, tol: float = DENSITY_TOL) -> np.ndarray:
    """
    Raises:
        ValidationFailed: Unless rho is hermitian, positive semidefinite and of unit trace within ``tol``.
    """
    rho = require_hermitian(rho, 'density matrix')
    if abs(float(np.trace(rho.matrix).real) - 1.0) > tol:
        raise ValidationFailed(f'density matrix trace {np.trace(rho.matrix).real!r} differs from 1')
    lowest = float(rho.spectrum[0])
    if lowest < -tol:
        raise ValidationFailed(f'density matrix has negative eigenvalue {lowest!r}')
    return rho.matrix


def _rk4(generator: np.ndarray, vec: np.ndarray, dt: float, steps: int) -> np.ndarray:
    for _ in range(steps):
        k1 = generator @ vec
        k2 = generator @ (vec + 0.5 * dt * k1)
        k3 = generator @ (vec + 0.5 * dt * k2)
        k4 = generator @ (vec + dt * k3)
        vec = vec + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return vec


def _steps(span: float, dt: float) -> int:
    return max(1, math.ceil(span / dt - 1e-9))


def lindblad_trajectory(m: LindbladModel, rho0: MatrixLike, times: Sequence[float], dt: float = None,
                        cap: int = None) -> list[np.ndarray]:
    """
    RK4 states at every time of ``times`` (nondecreasing, starting at or after 0).

    Between grid points the step is the largest value <= ``dt`` dividing the interval evenly;
    ``dt`` defaults to max(times) / 2000.
    """
    rho = require_density(rho0)
    if rho.shape[0] != m.dim:
        raise ArgumentError(f'density dim {rho.shape[0]} does not match model dim {m.dim}')
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ArgumentError('times must be nonnegative and nondecreasing')
    horizon = max(times, default=0.0)
    dt = horizon / DEFAULT_STEPS if dt is None else float(dt)
    generator = m.superoperator(cap)
    vec = rho.reshape(-1).astype(complex)
    out, now = [], 0.0
    for t in times:
        span = t - now
        if span > 0:
            steps = _steps(span, dt)
            vec = _rk4(generator, vec, span / steps, steps)
            now = t
        out.append(vec.reshape(m.dim, m.dim).copy())
    return out


def lindblad_evolve(m: LindbladModel, rho0: MatrixLike, t: float, dt: float = None, cap: int = None) -> Operator:
    """
    rho(t) by RK4 on the vectorized generator; dt defaults to t / 2000.

    Raises:
        ValidationFailed: If rho0 is not a density matrix.
    """
    rho = lindblad_trajectory(m, rho0, [t], dt, cap)[-1]
    trace_error, lowest = density_diagnostics(rho)
    logger.debug('lindblad t=%r: trace error %.2e, min eigenvalue %.2e', t, trace_error, lowest)
    return Operator((rho + rho.conj().T) / 2)


def density_diagnostics(rho: np.ndarray) -> tuple[float, float]:
    """(|tr rho - 1|, min eigenvalue of the hermitian part)."""
    herm = (rho + rho.conj().T) / 2
    return abs(float(np.trace(rho).real) - 1.0), float(np.linalg.eigvalsh(herm)[0])


def lindblad_step_halving(m: LindbladModel, rho0: MatrixLike, t: float, dt: float) -> float:
    """
    Error ratio e(dt) / e(dt/2) against a dt/8 reference; about 16 for RK4.
    """
    reference = lindblad_trajectory(m, rho0, [t], dt / 8)[-1]
    coarse = lindblad_trajectory(m, rho0, [t], dt)[-1]
    fine = lindblad_trajectory(m, rho0, [t], dt / 2)[-1]
    coarse_error = float(np.max(np.abs(coarse - reference)))
    fine_error = float(np.max(np.abs(fine - reference)))
    if fine_error == 0.0:
        return math.inf
    return coarse_error / fine_error


def settle_time_error(m: LindbladModel, rho0: MatrixLike, t: float, target: MatrixLike, dt: float = None) -> float:
    """max |rho(t) - target|, used for fixed-point checks."""
    rho = lindblad_evolve(m, rho0, t, dt).matrix
    return float(np.max(np.abs(rho - Operator.coerce(target).matrix)))
