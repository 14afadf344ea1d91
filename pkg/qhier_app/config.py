from typing import Literal

from pydantic import BaseModel, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseModel):
    hermitian: float = 1e-10
    normalized: float = 1e-12
    statistics: float = 1e-13
    field: float = 1e-12
    bracket: float = 1e-10
    jacobi: float = 1e-9
    one_excitation: float = 1e-13
    energy_match: float = 1e-12
    local_energy: float = 1e-10
    eclectic_energy: float = 1e-9
    lindblad_lift: float = 1e-10
    drift: float = 1e-8
    finite_difference: float = 1e-6


class Settings(BaseSettings):
    MODE: Literal['DEV', 'TEST', 'PROD'] = 'DEV'

    QHIER_CAP: int = 2 ** 14
    QHIER_LOG_LEVEL: str = 'WARNING'
    QHIER_SEED: int = 7

    TOLERANCES: Tolerances = Tolerances()

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    @field_validator('QHIER_CAP')
    @classmethod
    def cap_at_least_four(cls, value: int) -> int:
        if value < 4:
            raise ValueError('QHIER_CAP must be at least 4')
        return value

    @property
    def SCHEMA(self):
        return 'qhier/1'


settings = Settings()
