from typing import ClassVar, Optional

from pydantic import Field
from pydantic.dataclasses import dataclass

from ..schemas.common.exit_code import ExitCode, ExitCodes
from .base import SimulationError


@dataclass(frozen=True)
class DatabaseError(SimulationError):
    """Propagator Database Error"""

    digest: Optional[str] = Field(
        title="Digest",
        description="Digest of the propagator key involved.",
        default=None,
    )
    msg: str = Field(title="Message", default="Propagator database error occured.")


@dataclass(frozen=True)
class KeyMismatchError(DatabaseError):
    """Key Mismatch Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.NUMERICAL_ERROR

    msg: str = Field(title="Message", default="Key does not match its inputs.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="The propagator key was derived from a different grid or potential.",
    )


@dataclass(frozen=True)
class MissingEntryError(DatabaseError):
    """Missing Entry Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.MISSING_ENTRY

    msg: str = Field(title="Message", default="Propagator not found.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Build the propagator first, or allow building on lookup.",
    )


@dataclass(frozen=True)
class PersistenceError(DatabaseError):
    """Persistence Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.IO_ERROR

    path: Optional[str] = Field(title="Path", default=None)
    msg: str = Field(title="Message", default="Propagator persistence failed.")
