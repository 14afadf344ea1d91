from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from qhier_app.eclectic.system import DimensionRow, EnergyIdentity
from qhier_app.hamiltonians.schemas import SModelSummary
from qhier_app.schemas import SReport


class SDims(BaseModel):
    full: int
    padded: int
    direct_sum: int


class STermIdentity(BaseModel):
    l: int
    sites: list[int]
    energy_full: float
    energy_block: float
    delta: float
    method: Optional[str] = None


class STotal(BaseModel):
    E_full: float
    E_eclectic: float
    E_normalized: float
    delta: float
    passed: bool = Field(alias='pass')

    model_config = ConfigDict(populate_by_name=True)


class SDimensionRow(BaseModel):
    n: int
    m: int
    classes: dict[int, int]
    n_bar: int
    full: int
    padded: int
    direct_sum: int
    crossover: bool

    @classmethod
    def of(cls, row: DimensionRow) -> 'SDimensionRow':
        return cls(n=row.n, m=row.m, classes=row.classes, n_bar=row.n_bar, full=row.full, padded=row.padded,
                   direct_sum=row.direct_sum, crossover=row.crossover)


class SEclecticReport(SReport):
    model: SModelSummary
    layout: str
    n_bar: int
    dims: SDims
    state: str
    consistency: str
    per_term: list[STermIdentity]
    total: STotal
    dimensions: list[SDimensionRow] = []

    @classmethod
    def build(cls, identity: EnergyIdentity, system, state_label: str, methods: list, rows: list[DimensionRow]):
        h = system.model
        per_term = [STermIdentity(l=t.term, sites=list(t.sites), energy_full=t.energy_full,
                                  energy_block=t.energy_block, delta=t.delta,
                                  method=None if method is None else method.value)
                    for t, method in zip(identity.per_term, methods)]
        return cls(
            model=SModelSummary.of(h),
            layout=system.layout.value,
            n_bar=system.n_bar,
            dims=SDims(full=h.full_dim, padded=rows[0].padded, direct_sum=rows[0].direct_sum),
            state=state_label,
            consistency=identity.consistency,
            per_term=per_term,
            total=STotal(E_full=identity.energy_full, E_eclectic=identity.energy_eclectic,
                         E_normalized=identity.energy_normalized, delta=identity.delta, passed=identity.passed),
            dimensions=[SDimensionRow.of(row) for row in rows],
        )
