from typing import Optional

from pydantic import BaseModel


class SFockSpace(BaseModel):
    statistics: str
    modes: int
    cutoff: Optional[int] = None
    dim: int

    @classmethod
    def of(cls, space) -> 'SFockSpace':
        return cls(statistics=space.statistics.value, modes=space.modes, cutoff=space.cutoff, dim=space.dim)
