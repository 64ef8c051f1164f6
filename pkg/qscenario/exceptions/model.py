from typing import ClassVar, Optional

from pydantic import Field
from pydantic.dataclasses import dataclass

from ..schemas.common.exit_code import ExitCode, ExitCodes
from .base import SimulationError


@dataclass(frozen=True)
class NumericalError(SimulationError):
    """Numerical Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.NUMERICAL_ERROR

    msg: str = Field(title="Message", default="Inputs are numerically inconsistent.")


@dataclass(frozen=True)
class DimensionMismatchError(NumericalError):
    """Dimension Mismatch Error"""

    expected: Optional[int] = Field(title="Expected Dimension", default=None)
    received: Optional[int] = Field(title="Received Dimension", default=None)
    msg: str = Field(title="Message", default="Dimensions do not match.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="The state and the model (or grid) disagree on the dimension.",
    )


@dataclass(frozen=True)
class UnnormalizedStateError(NumericalError):
    """Unnormalized State Error"""

    norm: Optional[float] = Field(title="Squared Norm", default=None)
    msg: str = Field(title="Message", default="State is not normalized.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="The squared norm deviates from one beyond the configured tolerance.",
    )


@dataclass(frozen=True)
class InvalidOptionError(NumericalError):
    """Invalid Option Error"""

    msg: str = Field(title="Message", default="Option value is out of range.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Option values must lie in 1..L for a model of volume L.",
    )


@dataclass(frozen=True)
class ZeroNormBlockError(NumericalError):
    """Zero Norm Block Error"""

    msg: str = Field(title="Message", default="Selected block has zero norm.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default=(
            "Partial measurement selected a block without amplitude, "
            "thresholds and block probabilities are inconsistent."
        ),
    )


@dataclass(frozen=True)
class InvalidStepCountError(NumericalError):
    """Invalid Step Count Error"""

    msg: str = Field(title="Message", default="Invalid number of time steps.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default=(
            "Step counts must be non-negative and covered by the potential sequence."
        ),
    )


@dataclass(frozen=True)
class OutOfGridRangeError(NumericalError):
    """Out Of Grid Range Error"""

    position: Optional[float] = Field(title="Position", default=None)
    step: Optional[int] = Field(title="Step", default=None)
    msg: str = Field(title="Message", default="Trajectory left the grid range.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Classical trajectories must stay within (-A, A).",
    )


@dataclass(frozen=True)
class DivergenceError(NumericalError):
    """Divergence Error"""

    iterations: Optional[int] = Field(title="Iterations", default=None)
    spectral_radius: Optional[float] = Field(title="Spectral Radius", default=None)
    msg: str = Field(title="Message", default="Iteration did not converge.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default=(
            "Sequential approximation requires the iteration operator "
            "to be a contraction."
        ),
    )


@dataclass(frozen=True)
class CapExceededError(SimulationError):
    """Cap Exceeded Error"""

    exit_code: ClassVar[ExitCode] = ExitCodes.CAP_EXCEEDED

    value: Optional[int] = Field(title="Value", default=None)
    cap: Optional[int] = Field(title="Cap", default=None)
    msg: str = Field(title="Message", default="Parameter exceeds its cap.")
    detail: Optional[str] = Field(
        title="Detail",
        description="Detailed error message.",
        default="Raise the corresponding QS_* setting to allow larger problems.",
    )
