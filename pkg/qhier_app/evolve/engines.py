"""
Time-series producers behind ``qhier evolve``. Every engine returns a ``Series``:
a CSV header plus numeric rows, and the summary object of the run where it has one.
"""
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from qhier_app.dependencies import load_model
from qhier_app.exceptions import ArgumentError
from qhier_app.fock.quantize import second_quantize_hamiltonian
from qhier_app.fock.space import build_fock_space
from qhier_app.hamiltonians.model import KLocalHamiltonian, assemble_full
from qhier_app.hamiltonization.integrators import Trajectory, integrate_symplectic
from qhier_app.hamiltonization.phase_space import PhaseSpacePoint, hamiltonize
from qhier_app.hilbert.core import SpaceShape, embed_local, evolve_exact, random_state
from qhier_app.models import IntegrationMethod, Statistics
from qhier_app.open_dynamics.lindblad import SIGMA_MINUS, LindbladModel, amplitude_damping, lindblad_trajectory
from qhier_app.open_dynamics.sse import TrajectoryEnsemble, compare_with_master_equation, sse_ensemble

OSCILLATOR_RE = re.compile(r'^oscillator(?::(\d+))?$')
BASIS_RE = re.compile(r'^basis:(\d+)$')
DEFAULT_OSCILLATOR_CUTOFF = 5


@dataclass(frozen=True)
class Series:
    header: list[str]
    rows: list[list[float]]
    trajectory: Optional[Trajectory] = None
    ensemble: Optional[TrajectoryEnsemble] = None


@dataclass(frozen=True, eq=False)
class EvolveSource:
    """Dense Hamiltonian of a source; ``model`` is set when it came from a k-local model."""
    label: str
    h: np.ndarray
    model: Optional[KLocalHamiltonian] = None

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def lindblad(self, gamma: float) -> LindbladModel:
        """
        Damps every qubit with sigma^- at rate ``gamma``.

        Raises:
            ArgumentError: For sources that are neither qubit models nor two-level.
        """
        if self.model is None:
            if self.dim != 2:
                raise ArgumentError(f'open engines need a two-level source or a qubit model, got dim {self.dim}')
            return amplitude_damping(gamma, self.h)
        if self.model.d != 2:
            raise ArgumentError(f'open engines need a qubit model (d = 2), got d = {self.model.d}')
        shape = SpaceShape.uniform(self.model.n, 2)
        ops = tuple((embed_local(SIGMA_MINUS, [site], shape).matrix, gamma) for site in range(self.model.n))
        return LindbladModel(self.h, ops)


def resolve_source(source: str, omega: float = 1.0, cap: int = None) -> EvolveSource:
    """
    Accepts ``oscillator[:N]`` (omega a^dagger a on a single mode, N_tot = N), ``damping``
    (a qubit with H = 0) or any model source.
    """
    match = OSCILLATOR_RE.match(source)
    if match:
        cutoff = int(match.group(1) or DEFAULT_OSCILLATOR_CUTOFF)
        space = build_fock_space(1, Statistics.boson, cutoff, cap=cap)
        return EvolveSource(source, second_quantize_hamiltonian([[omega]], space).matrix)
    if source == 'damping':
        return EvolveSource(source, np.zeros((2, 2), dtype=complex))
    model = load_model(source)
    return EvolveSource(source, assemble_full(model, cap=cap).matrix, model)


def initial_state(spec: str, dim: int, rng: np.random.Generator) -> np.ndarray:
    if spec == 'random':
        return random_state(rng, dim)
    match = BASIS_RE.match(spec)
    if not match or int(match.group(1)) >= dim:
        raise ArgumentError(f'--init expects random or basis:<i> with i < {dim}, got {spec!r}')
    psi = np.zeros(dim, dtype=complex)
    psi[int(match.group(1))] = 1.0
    return psi


def time_grid(t: float, points: int) -> np.ndarray:
    """``points + 1`` equally spaced times on [0, t]; a single 0 when t = 0."""
    if t < 0:
        raise ArgumentError(f't must be nonnegative, got {t}')
    if t == 0:
        return np.zeros(1)
    if points < 1:
        raise ArgumentError(f'--points must be positive, got {points}')
    return np.linspace(0.0, t, points + 1)


def _amplitude_columns(psi: np.ndarray) -> list[float]:
    row = []
    for z in psi:
        row += [float(z.real), float(z.imag)]
    return row


def run_exact(src: EvolveSource, psi0: np.ndarray, t: float, points: int) -> Series:
    times = time_grid(t, points)
    states = np.array([evolve_exact(src.h, psi0, time).amplitudes for time in times])
    energies = np.einsum('ti,ij,tj->t', states.conj(), src.h, states).real
    trajectory = Trajectory(times, states, energies, np.linalg.norm(states, axis=1), None)
    return Series(trajectory.header(), trajectory.rows())


def run_symplectic(src: EvolveSource, psi0: np.ndarray, t: float, dt: float,
                   method: IntegrationMethod = IntegrationMethod.implicit_midpoint, stride: int = 1) -> Series:
    """Every ``stride``-th step of the integrator; the final step is always written."""
    if stride < 1:
        raise ArgumentError(f'--stride must be positive, got {stride}')
    if not dt > 0:
        raise ArgumentError(f'dt must be positive, got {dt}')
    steps = max(1, int(round(t / dt))) if t > 0 else 0
    dt = t / steps if steps else dt
    trajectory = integrate_symplectic(hamiltonize(src.h), PhaseSpacePoint(psi0), dt, steps, method)
    rows = trajectory.rows()
    keep = list(range(0, len(rows), stride))
    if keep[-1] != len(rows) - 1:
        keep.append(len(rows) - 1)
    return Series(trajectory.header(), [rows[i] for i in keep], trajectory=trajectory)


def _density_header(dim: int) -> list[str]:
    names = []
    for i in range(dim):
        for j in range(dim):
            names += [f're_rho_{i}_{j}', f'im_rho_{i}_{j}']
    return names


def run_lindblad(m: LindbladModel, psi0: np.ndarray, t: float, points: int, dt: float = None,
                 cap: int = None) -> Series:
    times = time_grid(t, points)
    states = lindblad_trajectory(m, np.outer(psi0, psi0.conj()), times, dt, cap)
    rows = [[float(time)] + _amplitude_columns(rho.reshape(-1)) + [float(np.trace(rho).real)]
            for time, rho in zip(times, states)]
    return Series(['t'] + _density_header(m.dim) + ['trace'], rows)


def run_sse(m: LindbladModel, psi0: np.ndarray, t: float, dt: float, n_traj: int, seed: int,
            points: int) -> Series:
    """Ensemble means at ``points`` checkpoints with their trace-norm distance to the master equation."""
    ensemble = sse_ensemble(m, psi0, t, dt, n_traj, seed, n_checkpoints=points)
    comparison = compare_with_master_equation(ensemble)
    rows = [[c.t] + _amplitude_columns(rho.reshape(-1)) + [c.l1_error, c.bound]
            for c, rho in zip(comparison, ensemble.mean_states)]
    return Series(['t'] + _density_header(m.dim) + ['l1_error', 'bound'], rows, ensemble=ensemble)
