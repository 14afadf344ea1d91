"""
Quantum-jump unravelling of a Lindblad model and its ensemble average.

Trajectory j draws from its own stream ``sse.trajectory.<j>`` of the run seed, so the
ensemble does not depend on how trajectories are grouped into chunks.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from qhier_app.dependencies import stream
from qhier_app.exceptions import ArgumentError, StepSizeError
from qhier_app.hilbert.core import StateVector, VectorLike, trace_norm
from qhier_app.open_dynamics.lindblad import LindbladModel, lindblad_trajectory

logger = logging.getLogger(__name__)

MAX_JUMP_PROBABILITY = 0.1
CHUNK = 512
NORM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """
    Attributes:
        times: Checkpoint times.
        mean_states: rho_bar at every checkpoint, shape (len(times), d, d).
        jumps: Jump count per trajectory.
        norm_error: Largest |<psi|psi> - 1| seen on any path.
    """
    model: LindbladModel
    psi0: np.ndarray
    seed: int
    dt: float
    n_traj: int
    times: np.ndarray
    mean_states: np.ndarray
    jumps: np.ndarray
    norm_error: float


def _trajectory_draws(seed: int, first: int, count: int, steps: int) -> np.ndarray:
    """Uniforms of shape (count, steps, 2): jump test and channel choice."""
    return np.stack([stream(seed, f'sse.trajectory.{j}').random((steps, 2)) for j in range(first, first + count)])


def _run_chunk(m: LindbladModel, no_jump: np.ndarray, psi0: np.ndarray, draws: np.ndarray,
               checkpoints: Sequence[int]):
    count, steps = draws.shape[0], draws.shape[1]
    psi = np.repeat(psi0[:, None], count, axis=1)
    partial = []
    jumps = np.zeros(count, dtype=int)
    norm_error = 0.0
    marks = set(checkpoints)
    if 0 in marks:
        partial.append(psi @ psi.conj().T)
    for step in range(1, steps + 1):
        evolved = no_jump @ psi
        kept = np.sum(np.abs(evolved) ** 2, axis=0)
        probability = np.clip(1.0 - kept, 0.0, None)
        worst = float(np.max(probability))
        if worst > MAX_JUMP_PROBABILITY:
            raise StepSizeError(f'jump probability {worst:.3f} per step exceeds {MAX_JUMP_PROBABILITY}; reduce dt')
        jumped = (draws[:, step - 1, 0] < probability) & bool(m.ops)
        psi_next = evolved / np.sqrt(kept)
        for j in np.flatnonzero(jumped):
            outcomes = [jump @ psi[:, j] for jump, _ in m.ops]
            weights = np.array([rate * float(np.vdot(v, v).real) for v, (_, rate) in zip(outcomes, m.ops)])
            threshold = draws[j, step - 1, 1] * weights.sum()
            channel = min(int(np.searchsorted(np.cumsum(weights), threshold, side='right')), len(outcomes) - 1)
            chosen = outcomes[channel]
            psi_next[:, j] = chosen / np.linalg.norm(chosen)
            jumps[j] += 1
        psi = psi_next
        norm_error = max(norm_error, float(np.max(np.abs(np.sum(np.abs(psi) ** 2, axis=0) - 1.0))))
        if step in marks:
            partial.append(psi @ psi.conj().T)
    return np.array(partial), jumps, norm_error


def _fsum_stack(parts: list[np.ndarray]) -> np.ndarray:
    """Elementwise compensated sum of equally shaped complex arrays."""
    stacked = np.stack(parts)
    flat = stacked.reshape(len(parts), -1)
    real = [math.fsum(column) for column in flat.real.T]
    imag = [math.fsum(column) for column in flat.imag.T]
    return (np.array(real) + 1j * np.array(imag)).reshape(stacked.shape[1:])


def sse_ensemble(m: LindbladModel, psi0: VectorLike, t: float, dt: float, n_traj: int, seed: int,
                 n_checkpoints: int = 5) -> TrajectoryEnsemble:
    """
    Unravels the master equation into ``n_traj`` jump trajectories.

    Each step evolves with exp(-i H_eff dt); the path jumps with probability
    1 - |exp(-i H_eff dt) psi|^2, choosing channel alpha with weight gamma_alpha |L_alpha psi|^2.

    Raises:
        StepSizeError: If a jump probability per step exceeds 0.1.
        ArgumentError: On n_traj < 1 or a nonpositive dt.
    """
    if n_traj < 1:
        raise ArgumentError(f'n_traj must be at least 1, got {n_traj}')
    if not dt > 0 or t < 0:
        raise ArgumentError(f'need dt > 0 and t >= 0, got dt={dt}, t={t}')
    psi0 = StateVector.coerce(psi0)
    if psi0.dim != m.dim:
        raise ArgumentError(f'state dim {psi0.dim} does not match model dim {m.dim}')
    psi0 = psi0.unit().amplitudes
    steps = max(1, int(round(t / dt))) if t > 0 else 0
    dt = t / steps if steps else dt
    checkpoints = sorted({int(round(steps * i / n_checkpoints)) for i in range(1, n_checkpoints + 1)}) \
        if steps else [0]
    no_jump = scipy.linalg.expm(-1j * m.effective_hamiltonian() * dt)

    partials, jumps, norm_error = [], [], 0.0
    for first in range(0, n_traj, CHUNK):
        count = min(CHUNK, n_traj - first)
        draws = _trajectory_draws(seed, first, count, steps)
        partial, chunk_jumps, chunk_error = _run_chunk(m, no_jump, psi0, draws, checkpoints)
        partials.append(partial)
        jumps.append(chunk_jumps)
        norm_error = max(norm_error, chunk_error)
    mean = _fsum_stack(partials) / n_traj
    logger.info('sse: %d trajectories, %d steps, %d jumps', n_traj, steps, int(np.sum(np.concatenate(jumps))))
    return TrajectoryEnsemble(
        model=m, psi0=psi0, seed=seed, dt=dt, n_traj=n_traj,
        times=np.array([c * dt for c in checkpoints]),
        mean_states=mean, jumps=np.concatenate(jumps), norm_error=norm_error,
    )


def sse_trajectory_matrix(ensemble: TrajectoryEnsemble) -> np.ndarray:
    """rho_bar(t) on the checkpoint grid, shape (len(times), d, d)."""
    return ensemble.mean_states


@dataclass(frozen=True)
class EnsembleComparison:
    t: float
    l1_error: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.l1_error <= self.bound


def compare_with_master_equation(ensemble: TrajectoryEnsemble, dt: float = None) -> list[EnsembleComparison]:
    """|rho_bar(t) - rho(t)|_1 against 5 / sqrt(n_traj) at every checkpoint."""
    rho0 = np.outer(ensemble.psi0, ensemble.psi0.conj())
    reference = lindblad_trajectory(ensemble.model, rho0, ensemble.times, dt)
    bound = 5.0 / math.sqrt(ensemble.n_traj)
    return [EnsembleComparison(float(t), trace_norm(mean - rho), bound)
            for t, mean, rho in zip(ensemble.times, ensemble.mean_states, reference)]


def trace_error_max(ensemble: TrajectoryEnsemble) -> float:
    return max(abs(float(np.trace(rho).real) - 1.0) for rho in ensemble.mean_states)
