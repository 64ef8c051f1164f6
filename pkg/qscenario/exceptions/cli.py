from typing import ClassVar, Optional

from pydantic import Field
from pydantic.dataclasses import dataclass

from ..schemas.common.exit_code import ExitCode, ExitCodes
from .base import SimulationError


@dataclass(frozen=True)
class ParseError(SimulationError):
    """Input Parse Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.PARSE_ERROR

    path: Optional[str] = Field(title="Path", default=None)
    line: Optional[int] = Field(title="Line", default=None)
    msg: str = Field(title="Message", default="Input file could not be parsed.")


@dataclass(frozen=True)
class UsageError(SimulationError):
    """Command Usage Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.USAGE_ERROR

    option: Optional[str] = Field(title="Option", default=None)
    msg: str = Field(title="Message", default="Invalid combination of options.")
