from typing import Any, ClassVar, Optional

from pydantic import Field
from pydantic.dataclasses import dataclass

from ..schemas.common.exit_code import ExitCode, ExitCodes


@dataclass(frozen=True)
class SimulationException(Exception):
    """General Simulation Exception"""

    exit_code: ClassVar[ExitCode] = ExitCodes.SIMULATION_ERROR

    msg: str = Field(title="Message")

    def __str__(self) -> str:
        return self.msg

    @property
    def args(self) -> tuple[Any, ...]:
        """ """
        return (self.msg,)


@dataclass(frozen=True)
class SimulationError(SimulationException):
    """Simulation Error"""

    msg: str = Field(
        title="Message",
        description="Shortend error message.",
        default="Simulation error occured.",
    )
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default=None,
    )
