from typing import Iterator, Union

from pydantic import Field

from .base import FrozenModel


class ExitCode(FrozenModel):
    """Process Exit Code Model"""

    id: int = Field(title="ID", ge=0, le=255)
    name: str = Field(title="Name")
    description: str = Field(title="Description")

    def __int__(self) -> int:
        return self.id

    def __str__(self) -> str:
        return f"{self.name} ({self.id})"


class ExitCodesMeta(type):
    """Collects the exit codes declared on a registry class, ordered by ID."""

    __items__: tuple[ExitCode, ...]

    def __new__(metacls, name: str, bases: tuple[type, ...], namespace: dict):
        _cls = super().__new__(metacls, name, bases, namespace)
        _cls.__items__ = tuple(
            sorted(
                (_item for _item in namespace.values() if isinstance(_item, ExitCode)),
                key=lambda _item: _item.id,
            )
        )
        return _cls

    def __iter__(cls) -> Iterator[ExitCode]:
        return iter(cls.__items__)

    def __len__(cls) -> int:
        return len(cls.__items__)

    def __getitem__(cls, item: Union[int, str]) -> ExitCode:
        for _code in cls.__items__:
            if item in (_code.id, _code.name):
                return _code
        raise KeyError(item)


class ExitCodes(metaclass=ExitCodesMeta):
    """Command Line Exit Codes"""

    SUCCESS = ExitCode(
        id=0,
        name="SUCCESS",
        description="Command completed, report written.",
    )
    SIMULATION_ERROR = ExitCode(
        id=1,
        name="SIMULATION_ERROR",
        description="Unclassified simulation error.",
    )
    USAGE_ERROR = ExitCode(
        id=2,
        name="USAGE_ERROR",
        description="Invalid command line arguments.",
    )
    PARSE_ERROR = ExitCode(
        id=3,
        name="PARSE_ERROR",
        description="An input file could not be parsed or validated.",
    )
    UNKNOWN_REACTION = ExitCode(
        id=4,
        name="UNKNOWN_REACTION",
        description="A scattering context is missing from the table.",
    )
    CAP_EXCEEDED = ExitCode(
        id=5,
        name="CAP_EXCEEDED",
        description="A numeric parameter exceeds its configured cap.",
    )
    MISSING_ENTRY = ExitCode(
        id=6,
        name="MISSING_ENTRY",
        description="Propagator database entry not found.",
    )
    NUMERICAL_ERROR = ExitCode(
        id=7,
        name="NUMERICAL_ERROR",
        description="Inputs are numerically inconsistent or an iteration diverged.",
    )
    IO_ERROR = ExitCode(
        id=8,
        name="IO_ERROR",
        description="Reading or writing a file failed.",
    )
