from typing import Optional

from qhier_app.schemas import SReport, SResidual


class SVerifyReport(SReport):
    suite: str
    seed: int
    source: Optional[str] = None
    residuals: list[SResidual]
    failures: list[str] = []

    @property
    def passed(self) -> bool:
        return not self.failures

    @classmethod
    def of(cls, suite: str, seed: int, source: Optional[str], residuals: list[SResidual]) -> 'SVerifyReport':
        return cls(suite=suite, seed=seed, source=source, residuals=residuals,
                   failures=[r.check for r in residuals if not r.passed])
