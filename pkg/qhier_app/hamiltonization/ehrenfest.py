from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from qhier_app.exceptions import ArgumentError
from qhier_app.hamiltonization.phase_space import ObservableField
from qhier_app.hilbert.core import MatrixLike, StateVector, require_hermitian


@dataclass(frozen=True)
class ExpectationSeries:
    times: np.ndarray
    values: np.ndarray  # (len(times), len(observables))

    def column(self, index: int) -> np.ndarray:
        return self.values[:, index]

    def spread(self, index: int) -> float:
        col = self.column(index)
        return float(np.max(col) - np.min(col))


def ehrenfest_reduce(h: MatrixLike, psi0, obs: Sequence[ObservableField], t_grid: Sequence[float]) -> ExpectationSeries:
    """<O>(t) for every observable along the exact Schrodinger flow of ``psi0``."""
    h = require_hermitian(h, 'Hamiltonian')
    psi0 = StateVector.coerce(psi0)
    if psi0.dim != h.dim or any(o.dim != h.dim for o in obs):
        raise ArgumentError(f'dimensions of state and observables must equal {h.dim}')
    times = np.asarray(t_grid, dtype=float)
    evals, evecs = scipy.linalg.eigh(h.matrix)
    coeffs = evecs.conj().T @ psi0.amplitudes
    states = (evecs @ (np.exp(-1j * np.outer(evals, times)) * coeffs[:, None])).T
    values = np.array([[np.vdot(psi, o.matrix @ psi).real for o in obs] for psi in states])
    return ExpectationSeries(times, values.reshape(len(times), len(obs)))


def central_derivative(series: np.ndarray, dt: float) -> np.ndarray:
    """Second-order central differences on interior points."""
    return (series[2:] - series[:-2]) / (2 * dt)
