from typing import Optional

from pydantic import BaseModel

from qhier_app.hamiltonization.integrators import Trajectory


class STrajectorySummary(BaseModel):
    method: str
    dim: int
    dt: float
    steps: int
    energy_drift: float
    norm_drift: float
    convergence_ratio: Optional[float] = None

    @classmethod
    def of(cls, trajectory: Trajectory, dt: float, convergence_ratio: float = None) -> 'STrajectorySummary':
        return cls(
            method=trajectory.method.value,
            dim=trajectory.states.shape[1],
            dt=dt,
            steps=len(trajectory.times) - 1,
            energy_drift=trajectory.energy_drift,
            norm_drift=trajectory.norm_drift,
            convergence_ratio=convergence_ratio,
        )
