from pydantic import BaseModel, ConfigDict, Field

from qhier_app.open_dynamics.sse import TrajectoryEnsemble, compare_with_master_equation, trace_error_max
from qhier_app.schemas import SReport


class SComparison(BaseModel):
    t: float
    l1_error: float
    bound: float
    passed: bool = Field(alias='pass')

    model_config = ConfigDict(populate_by_name=True)


class SEnsembleReport(SReport):
    model_hash: str
    seed: int
    n_traj: int
    dt: float
    times: list[float]
    trace_error_max: float
    norm_error_max: float
    jumps_total: int
    comparison: list[SComparison]

    model_config = ConfigDict(populate_by_name=True, protected_namespaces=())

    @classmethod
    def of(cls, ensemble: TrajectoryEnsemble, dt: float = None) -> 'SEnsembleReport':
        return cls(
            model_hash=ensemble.model.fingerprint(),
            seed=ensemble.seed,
            n_traj=ensemble.n_traj,
            dt=ensemble.dt,
            times=[float(t) for t in ensemble.times],
            trace_error_max=trace_error_max(ensemble),
            norm_error_max=ensemble.norm_error,
            jumps_total=int(ensemble.jumps.sum()),
            comparison=[SComparison(t=c.t, l1_error=c.l1_error, bound=c.bound, passed=c.passed)
                        for c in compare_with_master_equation(ensemble, dt)],
        )
