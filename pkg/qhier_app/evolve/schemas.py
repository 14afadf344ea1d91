from typing import Optional

from qhier_app.evolve.engines import Series
from qhier_app.hamiltonization.schemas import STrajectorySummary
from qhier_app.open_dynamics.schemas import SEnsembleReport
from qhier_app.schemas import SReport


class SEvolveReport(SReport):
    engine: str
    source: str
    columns: list[str]
    rows: list[list[float]]
    trajectory: Optional[STrajectorySummary] = None
    ensemble: Optional[SEnsembleReport] = None

    @classmethod
    def of(cls, engine: str, source: str, series: Series, dt: float = None) -> 'SEvolveReport':
        trajectory = ensemble = None
        if series.trajectory is not None:
            trajectory = STrajectorySummary.of(series.trajectory, dt)
        if series.ensemble is not None:
            ensemble = SEnsembleReport.of(series.ensemble)
        return cls(engine=engine, source=source, columns=series.header, rows=series.rows,
                   trajectory=trajectory, ensemble=ensemble)
