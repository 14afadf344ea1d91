from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from qhier_app.config import settings


class SResidual(BaseModel):
    """One named residual against its tolerance; ``pass`` is the serialized name of ``passed``."""
    model_config = ConfigDict(populate_by_name=True)

    check: str
    statistics: Optional[str] = None
    d: Optional[int] = None
    cutoff: Optional[int] = None
    sector: str = 'full'
    residual: float
    tolerance: float
    passed: bool = Field(alias='pass')
    flag: Optional[str] = None


class SReport(BaseModel):
    schema_: str = Field(default_factory=lambda: settings.SCHEMA, alias='schema')

    model_config = ConfigDict(populate_by_name=True)

    def dump(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


def residual(check: str, value: float, tolerance: float, space=None, sector: str = 'full',
             flag: Optional[str] = None) -> SResidual:
    """
    Builds a residual record. Records flagged as a known truncation artifact always pass.

    Args:
        check: Dotted check name, e.g. ``fock.statistics.ccr``.
        value: Measured residual.
        tolerance: Upper bound for a pass.
        space: FockSpace the check ran on, if any.
        sector: Description of the subspace the residual was measured on.
        flag: Optional annotation.
    """
    fields = {}
    if space is not None:
        fields = dict(statistics=space.statistics.value, d=space.modes, cutoff=space.cutoff)
    passed = flag == 'truncation-artifact' or float(value) <= tolerance
    return SResidual(check=check, residual=float(value), tolerance=float(tolerance), sector=sector,
                     passed=passed, flag=flag, **fields)
