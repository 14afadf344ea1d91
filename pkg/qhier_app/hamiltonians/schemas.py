from pydantic import BaseModel

from qhier_app.hamiltonians.model import KLocalHamiltonian
from qhier_app.schemas import SReport


class SLocalityClass(BaseModel):
    locality: int
    count: int


class SModelSummary(SReport):
    n: int
    d: int
    k: int
    m: int
    classes: list[SLocalityClass]
    full_dim: int

    @classmethod
    def of(cls, h: KLocalHamiltonian) -> 'SModelSummary':
        return cls(n=h.n, d=h.d, k=h.k, m=h.m, full_dim=h.full_dim,
                   classes=[SLocalityClass(locality=k, count=c) for k, c in h.class_counts().items()])
