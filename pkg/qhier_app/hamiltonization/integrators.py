"""
Symplectic integration of the hamiltonized flow psi_dot = -i H psi.

Integration runs in the real chart z = (Re psi, Im psi). Writing H = A + iB with
A real symmetric and B real antisymmetric, the flow is z_dot = M z with
M = [[B, A], [-A, B]].
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qhier_app.exceptions import ArgumentError, NumericError
from qhier_app.hamiltonization.phase_space import ClassicalSystem, PhaseSpacePoint
from qhier_app.hilbert.core import evolve_exact
from qhier_app.models import IntegrationMethod

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-13
FIXED_POINT_MAX_ITER = 50


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    norms: np.ndarray
    method: IntegrationMethod

    def point(self, index: int) -> PhaseSpacePoint:
        return PhaseSpacePoint(self.states[index])

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energies[0])))

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms ** 2 - self.norms[0] ** 2)))

    def rows(self) -> list[list[float]]:
        """CSV rows: t, re_psi_0, im_psi_0, ..., energy, norm."""
        out = []
        for t, psi, e, nrm in zip(self.times, self.states, self.energies, self.norms):
            row = [float(t)]
            for z in psi:
                row += [float(z.real), float(z.imag)]
            out.append(row + [float(e), float(nrm)])
        return out

    def header(self) -> list[str]:
        names = ['t']
        for i in range(self.states.shape[1]):
            names += [f're_psi_{i}', f'im_psi_{i}']
        return names + ['energy', 'norm']


def real_generator(h: np.ndarray) -> np.ndarray:
    a, b = h.real, h.imag
    return np.block([[b, a], [-a, b]])


def _midpoint_step(m: np.ndarray, z: np.ndarray, dt: float) -> np.ndarray:
    guess = z + dt * (m @ z)
    for iteration in range(1, FIXED_POINT_MAX_ITER + 1):
        new = z + dt * (m @ (0.5 * (z + guess)))
        if np.max(np.abs(new - guess)) <= FIXED_POINT_TOL:
            logger.debug('implicit midpoint converged in %d iterations', iteration)
            return new
        guess = new
    raise NumericError(f'implicit midpoint did not converge in {FIXED_POINT_MAX_ITER} iterations (dt = {dt})')


class _LeapfrogReIm:
    """Strang splitting: half rotation by B, leapfrog on A, half rotation by B."""

    def __init__(self, h: np.ndarray, dt: float):
        self.a = h.real
        self.rotation = scipy.linalg.expm(0.5 * dt * h.imag)
        self.dt = dt

    def step(self, z: np.ndarray) -> np.ndarray:
        half = z.shape[0] // 2
        x, y = self.rotation @ z[:half], self.rotation @ z[half:]
        y = y - 0.5 * self.dt * (self.a @ x)
        x = x + self.dt * (self.a @ y)
        y = y - 0.5 * self.dt * (self.a @ x)
        return np.concatenate([self.rotation @ x, self.rotation @ y])


def integrate_symplectic(sys: ClassicalSystem, p0: PhaseSpacePoint, dt: float, steps: int,
                         method: IntegrationMethod = IntegrationMethod.implicit_midpoint) -> Trajectory:
    """
    Integrates Hamilton's equations from ``p0``.

    Args:
        sys: Hamiltonized system.
        p0: Initial point.
        dt: Positive step.
        steps: Number of steps; 0 returns the initial point only.
        method: Integration scheme.

    Returns:
        Trajectory: ``steps + 1`` points with energy and norm columns.

    Raises:
        ArgumentError: On dt <= 0, negative steps or a dimension mismatch.
        NumericError: If the implicit solve does not converge.
    """
    if dt <= 0:
        raise ArgumentError(f'dt must be positive, got {dt}')
    if steps < 0:
        raise ArgumentError(f'steps must be nonnegative, got {steps}')
    if p0.dim != sys.dim:
        raise ArgumentError(f'point dim {p0.dim} does not match system dim {sys.dim}')
    method = IntegrationMethod(method)
    z = p0.to_real()
    states = np.empty((steps + 1, sys.dim), dtype=complex)
    states[0] = p0.psi
    if method is IntegrationMethod.implicit_midpoint:
        m = real_generator(sys.matrix)
        advance = lambda v: _midpoint_step(m, v, dt)
    else:
        advance = _LeapfrogReIm(sys.matrix, dt).step
    for index in range(1, steps + 1):
        z = advance(z)
        states[index] = PhaseSpacePoint.from_real(z).psi
    energies = np.einsum('ti,ij,tj->t', states.conj(), sys.matrix, states).real
    norms = np.linalg.norm(states, axis=1)
    return Trajectory(np.arange(steps + 1) * dt, states, energies, norms, method)


def convergence_ratio(sys: ClassicalSystem, p0: PhaseSpacePoint, dt: float, t: float,
                      method: IntegrationMethod = IntegrationMethod.implicit_midpoint) -> float:
    """Ratio of final-state errors against exact evolution at dt and dt/2; about 4 for order 2."""
    errors = []
    for step in (dt, dt / 2):
        steps = int(round(t / step))
        trajectory = integrate_symplectic(sys, p0, step, steps, method)
        exact = evolve_exact(sys.matrix, p0.psi, steps * step).amplitudes
        errors.append(float(np.linalg.norm(trajectory.states[-1] - exact)))
    if errors[1] == 0.0:
        return float('inf')
    return errors[0] / errors[1]
