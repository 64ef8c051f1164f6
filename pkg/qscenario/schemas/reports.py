import json
from typing import Any, Literal, Optional

from pydantic import Field, field_validator

from ..config import get_settings
from ..exceptions.model import CapExceededError
from .common.base import FrozenModel

Command = Literal[
    "sweep",
    "compare",
    "evolve",
    "db-build",
    "db-apply",
    "db-inspect",
    "photon-gen",
    "ls-solve",
    "golden-rule",
    "measure",
]


class RunConfig(FrozenModel):
    """Run Configuration Model

    Echo of a command invocation. Unset parameters fall back to the input files
    or the settings.
    """

    command: Command = Field(title="Command")
    inputs: dict[str, str] = Field(
        title="Inputs",
        description="Input files or tags by role.",
        default_factory=dict,
    )
    output: Optional[str] = Field(title="Output Path", default=None)

    # assembly
    volume: Optional[int] = Field(title="Option Volume", default=None, ge=1)
    max_steps: Optional[int] = Field(
        title="Scenario Length Limit", description="T0.", default=None, ge=1
    )
    mode: Optional[Literal["residual", "fixed"]] = Field(
        title="Option Mode", default=None
    )
    threshold: Optional[float] = Field(
        title="Success Threshold", default=None, ge=0.0, le=1.0
    )
    name: Optional[str] = Field(title="Scenario Name", default=None)
    workers: Optional[int] = Field(title="Sweep Workers", default=None, ge=1)
    max_outcomes: Optional[int] = Field(title="Outcome Budget", default=None, ge=1)
    compare_coordinates: bool = Field(title="Compare Coordinates", default=False)
    pulses: Optional[str] = Field(title="Pulse Sequence", default=None, min_length=1)
    bias: Optional[float] = Field(title="Pulse Bias", default=None, ge=1.0)
    option: Optional[int] = Field(title="Option Value", default=None, ge=1)

    # grid
    qubits: Optional[int] = Field(title="Grid Qubits", default=None, ge=1)
    dt: Optional[float] = Field(title="Time Step", default=None)
    steps: Optional[int] = Field(title="Steps", default=None, ge=0)
    mass: Optional[float] = Field(title="Mass", default=None, gt=0.0)
    trace_every: int = Field(
        title="Trace Interval",
        description="Steps between trace points, 0 disables the trace.",
        default=1,
        ge=0,
    )
    classical: bool = Field(title="Classical Trajectory", default=False)

    # database
    db: Optional[str] = Field(title="Database Path", default=None)
    build_missing: bool = Field(title="Build Missing Entries", default=True)
    verify: bool = Field(title="Verify Against Direct Evolution", default=False)

    @field_validator("qubits", mode="after")
    @classmethod
    def _check_qubits(cls, value: Optional[int]) -> Optional[int]:
        _cap = get_settings().GRID_MAX_QUBITS
        if value is not None and value > _cap:
            raise CapExceededError(
                value=value,
                cap=_cap,
                msg=f"Grid of {value} qubits exceeds GRID_MAX_QUBITS={_cap}.",
            )
        return value

    @field_validator("max_steps", mode="after")
    @classmethod
    def _check_max_steps(cls, value: Optional[int]) -> Optional[int]:
        _cap = get_settings().ASSEMBLY_MAX_STEPS
        if value is not None and value > _cap:
            raise CapExceededError(
                value=value,
                cap=_cap,
                msg=f"Scenario length {value} exceeds ASSEMBLY_MAX_STEPS={_cap}.",
            )
        return value


class CommandOutput(FrozenModel):
    """Command Output Model

    Everything a command produced, written out only once the command succeeded.
    """

    config: RunConfig = Field(title="Configuration")
    input_digests: dict[str, str] = Field(
        title="Input Digests", default_factory=dict
    )
    results: dict[str, Any] = Field(title="Results")
    artifacts: dict[str, str] = Field(
        title="Artifacts",
        description="Text files to write, by path.",
        default_factory=dict,
    )


class RunReport(FrozenModel):
    """Run Report Model

    The body excludes timing, so identical inputs give identical bodies.
    """

    tool_version: str = Field(title="Tool Version")
    command: Command = Field(title="Command")
    config: RunConfig = Field(title="Configuration")
    input_digests: dict[str, str] = Field(
        title="Input Digests", description="SHA-256 of each input file by role."
    )
    results: dict[str, Any] = Field(title="Results")
    timing: dict[str, float] = Field(title="Timing", default_factory=dict)

    def body(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude={"timing"})

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
