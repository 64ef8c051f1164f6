from typing import ClassVar, Optional

from pydantic import Field
from pydantic.dataclasses import dataclass

from ..schemas.common.exit_code import ExitCode, ExitCodes
from .base import SimulationError


@dataclass(frozen=True)
class AssemblyError(SimulationError):
    """Assembly Error"""

    msg: str = Field(title="Message", default="Assembly error occured.")


@dataclass(frozen=True)
class UnknownReactionError(AssemblyError):
    """Unknown Reaction Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.UNKNOWN_REACTION

    context: Optional[str] = Field(
        title="Context",
        description="Reaction context that has no table entry.",
        default=None,
    )
    msg: str = Field(title="Message", default="Unknown reaction.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="The scattering table holds no outcome list for this context.",
    )


@dataclass(frozen=True)
class NonAdmittedOutcomeError(AssemblyError):
    """Non-Admitted Outcome Error"""

    msg: str = Field(title="Message", default="Outcome is not admitted for assembly.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Only admitted outcomes can extend the growing chain.",
    )


@dataclass(frozen=True)
class InvalidPulseError(AssemblyError):
    """Invalid Pulse Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.PARSE_ERROR

    pulse: Optional[str] = Field(title="Pulse", default=None)
    msg: str = Field(title="Message", default="Pulse letter is not in the alphabet.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Photon scenarios are defined over a two-element alphabet.",
    )


@dataclass(frozen=True)
class NegativeDensityError(AssemblyError):
    """Negative Density Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.NUMERICAL_ERROR

    density: Optional[float] = Field(title="Density", default=None)
    msg: str = Field(title="Message", default="Density of states is negative.")
