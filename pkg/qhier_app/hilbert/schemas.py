import numpy as np
from pydantic import BaseModel


class SMatrix(BaseModel):
    dim: int
    entries: list[tuple[float, float]]

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> 'SMatrix':
        flat = np.asarray(matrix, dtype=complex).reshape(-1)
        return cls(dim=int(matrix.shape[0]), entries=[(float(z.real), float(z.imag)) for z in flat])

    def to_array(self) -> np.ndarray:
        flat = np.array([complex(re, im) for re, im in self.entries], dtype=complex)
        return flat.reshape(self.dim, self.dim)
