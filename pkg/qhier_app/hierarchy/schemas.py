from typing import Optional

from pydantic import BaseModel

from qhier_app.fock.schemas import SFockSpace
from qhier_app.schemas import SReport, SResidual


class SSector(BaseModel):
    total: int
    energies: list[float]


class SSpectrumReport(BaseModel):
    spectrum_h1: list[float]
    sectors: list[SSector]
    containment_residual: float
    h1_ground: float
    h2_ground: float
    h2_ground_sector: int
    vacuum_is_ground: bool
    ground_state_mismatch: bool


class SLevel(BaseModel):
    index: int
    kind: str
    dim: int
    provenance: str
    spectrum: Optional[list[float]] = None
    space: Optional[SFockSpace] = None


class SHierarchyReport(SReport):
    example: str
    levels: list[SLevel]
    comparisons: list[SSpectrumReport] = []
    residuals: list[SResidual]
    notes: list[str] = []

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals)
