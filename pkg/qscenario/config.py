import logging
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SimulationSettings(BaseSettings):
    """Simulation Settings"""

    SIM_NORM_TOLERANCE: float = Field(
        title="Normalization Tolerance",
        description=(
            "Maximum deviation of the squared norm from one, "
            "for states, wave functions and outcome distributions."
        ),
        default=1e-9,
        gt=0.0,
    )
    SIM_OPTION_VOLUME: int = Field(
        title="Option Volume",
        description="Default number of option values (L) of a deterministic model.",
        default=1000,
        ge=1,
    )
    SIM_MASS: float = Field(
        title="Particle Mass",
        description="Default particle mass in grid units.",
        default=1.0,
        gt=0.0,
    )
    GRID_MAX_QUBITS: int = Field(
        title="Grid Qubit Cap",
        description="Largest grid exponent l accepted for wave functions.",
        default=20,
        ge=1,
    )


class DatabaseSettings(BaseSettings):
    """Propagator Database Settings"""

    DB_MAX_QUBITS: int = Field(
        title="Propagator Qubit Cap",
        description="Largest grid exponent l for which a dense propagator is built.",
        default=10,
        ge=1,
    )
    DB_PATH: Optional[Path] = Field(
        title="Database Path",
        description="Directory holding persisted propagators, in-memory only if unset.",
        default=None,
    )
    DB_MEMORY_ENTRIES: int = Field(
        title="In-Memory Entries",
        description="Number of propagators kept in memory.",
        default=16,
        ge=1,
    )


class AssemblySettings(BaseSettings):
    """Assembly Engine Settings"""

    ASSEMBLY_MAX_STEPS: int = Field(
        title="Maximum Scenario Length",
        description="Largest number of assembly steps in a scenario (T0).",
        default=64,
        ge=1,
    )
    ASSEMBLY_MAX_OUTCOMES: Optional[int] = Field(
        title="Outcome Budget",
        description=(
            "Largest number of outcomes kept after a scattering, "
            "the lightest outcomes are dropped and the rest renormalized."
        ),
        default=None,
        ge=1,
    )
    ASSEMBLY_OPTION_MODE: Literal["residual", "fixed"] = Field(
        title="Option Mode",
        description=(
            "Whether each selection consumes the leading part of the option value "
            "(residual) or every selection reuses the same option value (fixed)."
        ),
        default="residual",
    )
    ASSEMBLY_COMPARE_COORDINATES: bool = Field(
        title="Compare Coordinates",
        description="Compare unit coordinates as well as letters against the sample.",
        default=False,
    )
    ASSEMBLY_CACHE_SIZE: int = Field(
        title="Scattering Cache Size",
        description="Entries kept in the scattering-result database.",
        default=65536,
        ge=1,
    )
    SWEEP_WORKERS: int = Field(
        title="Sweep Workers",
        description="Worker threads used for option sweeps.",
        default=1,
        ge=1,
    )
    LS_MAX_DIM: int = Field(
        title="Lippmann-Schwinger Dimension Cap",
        description="Largest system dimension accepted by the iterative solver.",
        default=64,
        ge=1,
    )
    LS_MAX_ITER: int = Field(
        title="Lippmann-Schwinger Iteration Limit",
        description="Largest iterate index reached before reporting divergence.",
        default=10_000_000,
        ge=1,
    )
    LS_TOLERANCE: float = Field(
        title="Lippmann-Schwinger Tolerance",
        default=1e-12,
        gt=0.0,
    )


class LogSettings(BaseSettings):
    """Logger Settings"""

    LOG_NAME: str = Field(
        title="Logger Name",
        default="QSCENARIO",
    )
    LOG_LEVEL: int = Field(
        title="Logger Level",
        default=logging.INFO,
    )
    LOG_FORMAT: str = Field(
        title="Logger Format",
        default="%(asctime)s %(name)s :: %(levelname)-8s :: %(message)s",
    )
    LOG_PATH: Optional[str] = Field(
        title="Logger File Path",
        default=None,
    )


class Settings(SimulationSettings, DatabaseSettings, AssemblySettings, LogSettings):
    """Settings"""

    model_config = SettingsConfigDict(
        str_strip_whitespace=True,
        env_prefix="QS_",
        validate_assignment=True,
    )


@lru_cache()
def get_settings() -> Settings:
    """Cache the settings, this allows the settings to be used in dependencies and
    for overwriting in tests
    """
    return Settings()
