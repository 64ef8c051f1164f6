import hashlib
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import Field, field_validator, model_validator
from typing_extensions import Self

from ..config import get_settings
from ..exceptions.cli import ParseError
from ..exceptions.model import (
    CapExceededError,
    DimensionMismatchError,
    InvalidStepCountError,
    UnnormalizedStateError,
)
from ..types import ComplexVector, RealArray
from .common.base import ArrayModel, FrozenModel
from .state import OptionValue

config = get_settings()


def _tag_arguments(tag: str, name: str, low: int, high: int) -> list[float]:
    _parts = tag.strip().split(":")
    _arguments = _parts[1:]
    if not low <= len(_arguments) <= high:
        raise ParseError(
            msg=f"Tag {tag!r}: {name} takes {low} to {high} arguments.",
        )
    try:
        return [float(_a) for _a in _arguments]
    except ValueError as _ex:
        raise ParseError(msg=f"Tag {tag!r} has a non-numeric argument.") from _ex


class Representation(str, Enum):
    """Wave Function Representation"""

    POSITION = "position"
    MOMENTUM = "momentum"


class Observable(str, Enum):
    """Grid Observable"""

    POSITION = "position"
    MOMENTUM = "momentum"


class Grid(FrozenModel):
    """Coordinate Grid Model

    N = 2^l points with spacing dq = dp = sqrt(2 pi / N), so dq * dp * N = 2 pi.
    Coordinates run over [-A, A) with A = sqrt(pi N / 2); momenta are taken in the
    centered convention, indices b >= N/2 standing for negative momenta.
    """

    qubits: int = Field(
        title="Qubits",
        description="Grid exponent l, N = 2^l, at most GRID_MAX_QUBITS.",
        ge=1,
    )

    @field_validator("qubits", mode="after")
    @classmethod
    def _check_qubits(cls, value: int) -> int:
        _cap = get_settings().GRID_MAX_QUBITS
        if value > _cap:
            raise CapExceededError(
                value=value,
                cap=_cap,
                msg=f"Grid of {value} qubits exceeds GRID_MAX_QUBITS={_cap}.",
            )
        return value

    @property
    def points(self) -> int:
        return 1 << self.qubits

    @property
    def spacing(self) -> float:
        """Coordinate spacing dq, equal to the momentum spacing dp."""
        return math.sqrt(2.0 * math.pi / self.points)

    @property
    def half_range(self) -> float:
        """Half range A = B = sqrt(pi N / 2)."""
        return math.sqrt(math.pi * self.points / 2.0)

    @property
    def positions(self) -> np.ndarray:
        """Coordinates q_a = -A + a dq."""
        return -self.half_range + self.spacing * np.arange(self.points)

    @property
    def signed_indices(self) -> np.ndarray:
        """Momentum indices in the centered convention, -N/2 <= b < N/2."""
        _indices = np.arange(self.points)
        return np.where(_indices >= self.points // 2, _indices - self.points, _indices)

    @property
    def momenta(self) -> np.ndarray:
        """Momenta p_b = b dp over the unshifted transform order."""
        return self.spacing * self.signed_indices


class GridWaveFunction(ArrayModel):
    """Grid Wave Function Model

    Amplitudes are kept exactly as given, a norm outside the tolerance is rejected.
    """

    grid: Grid = Field(title="Grid")
    amplitudes: ComplexVector = Field(title="Amplitudes")
    representation: Representation = Field(
        title="Representation",
        default=Representation.POSITION,
    )

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.amplitudes.size != self.grid.points:
            raise DimensionMismatchError(
                expected=self.grid.points,
                received=int(self.amplitudes.size),
                msg=(
                    f"Grid of {self.grid.points} points got "
                    f"{self.amplitudes.size} amplitudes."
                ),
            )
        _norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(_norm - 1.0) > config.SIM_NORM_TOLERANCE:
            raise UnnormalizedStateError(
                norm=_norm,
                msg=f"Wave function has squared norm {_norm!r}.",
            )
        return self

    @classmethod
    def normalized(
        cls,
        grid: Grid,
        amplitudes: np.ndarray,
        representation: Representation = Representation.POSITION,
    ) -> Self:
        """Build a wave function after dividing the amplitudes by their norm."""
        _amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        return cls(
            grid=grid,
            amplitudes=_amplitudes / np.linalg.norm(_amplitudes),
            representation=representation,
        )

    @classmethod
    def delta(cls, grid: Grid, index: int) -> Self:
        """Point mass at grid index a."""
        _amplitudes = np.zeros(grid.points, dtype=np.complex128)
        _amplitudes[index] = 1.0
        return cls(grid=grid, amplitudes=_amplitudes)

    @classmethod
    def plane_wave(cls, grid: Grid, index: int) -> Self:
        """Plane wave exp(2 pi i a b0 / N) / sqrt(N), the momentum eigenstate b0."""
        _a = np.arange(grid.points)
        return cls(
            grid=grid,
            amplitudes=np.exp(2j * np.pi * _a * index / grid.points)
            / math.sqrt(grid.points),
        )

    @classmethod
    def gaussian(
        cls,
        grid: Grid,
        position: float = 0.0,
        momentum: float = 0.0,
        width: float = 1.0,
    ) -> Self:
        """Gaussian packet centered at (x0, p0) with coordinate width sigma."""
        _q = grid.positions
        _amplitudes = np.exp(
            -((_q - position) ** 2) / (4.0 * width**2) + 1j * momentum * _q
        )
        return cls.normalized(grid, _amplitudes)

    @classmethod
    def from_tag(cls, grid: Grid, tag: str) -> Self:
        """Resolve an initial state tag, "gaussian:x0:p0:sigma", "delta:a" or
        "plane:b".
        """
        _kind = tag.strip().split(":", 1)[0]
        if _kind == "gaussian":
            _x0, _p0, _sigma = _tag_arguments(tag, _kind, 3, 3)
            if _sigma <= 0.0:
                raise ParseError(msg=f"Tag {tag!r}: width must be positive.")
            return cls.gaussian(grid, position=_x0, momentum=_p0, width=_sigma)
        if _kind in ("delta", "plane"):
            (_index,) = _tag_arguments(tag, _kind, 1, 1)
            if not _index.is_integer() or not 0 <= _index < grid.points:
                raise ParseError(msg=f"Tag {tag!r}: index outside the grid.")
            if _kind == "delta":
                return cls.delta(grid, int(_index))
            return cls.plane_wave(grid, int(_index))
        raise ParseError(msg=f"Unknown wave function tag {tag!r}.")

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class PotentialField(ArrayModel):
    """Potential Field Model

    Samples V(q_a) on the grid, either one row shared by every step or one row per
    time step.
    """

    samples: RealArray = Field(
        title="Samples",
        description="Potential values, shape (N,) or (steps, N).",
    )
    mass: float = Field(title="Mass", default=config.SIM_MASS, gt=0.0)

    @field_validator("samples", mode="after")
    @classmethod
    def _check_samples(cls, value: np.ndarray) -> np.ndarray:
        if value.shape[-1] < 2:
            raise ValueError("A potential needs at least two grid samples.")
        return value

    @classmethod
    def free(cls, grid: Grid, mass: float = config.SIM_MASS) -> Self:
        return cls(samples=np.zeros(grid.points), mass=mass)

    @classmethod
    def harmonic(
        cls,
        grid: Grid,
        frequency: float = 1.0,
        center: float = 0.0,
        mass: float = config.SIM_MASS,
    ) -> Self:
        """V(q) = m w^2 (q - c)^2 / 2."""
        return cls(
            samples=0.5 * mass * frequency**2 * (grid.positions - center) ** 2,
            mass=mass,
        )

    @classmethod
    def linear(cls, grid: Grid, slope: float, mass: float = config.SIM_MASS) -> Self:
        """V(q) = g q, a constant force -g."""
        return cls(samples=slope * grid.positions, mass=mass)

    @classmethod
    def from_tag(cls, grid: Grid, tag: str, mass: float = config.SIM_MASS) -> Self:
        """Resolve a potential tag, "free", "harmonic:w[:center]" or "linear:g"."""
        _kind = tag.strip().split(":", 1)[0]
        if _kind == "free":
            _tag_arguments(tag, _kind, 0, 0)
            return cls.free(grid, mass=mass)
        if _kind == "harmonic":
            _arguments = _tag_arguments(tag, _kind, 1, 2)
            return cls.harmonic(
                grid,
                frequency=_arguments[0],
                center=_arguments[1] if len(_arguments) > 1 else 0.0,
                mass=mass,
            )
        if _kind == "linear":
            (_slope,) = _tag_arguments(tag, _kind, 1, 1)
            return cls.linear(grid, slope=_slope, mass=mass)
        raise ParseError(msg=f"Unknown potential tag {tag!r}.")

    @property
    def points(self) -> int:
        return int(self.samples.shape[-1])

    @property
    def is_time_dependent(self) -> bool:
        return self.samples.ndim == 2

    @property
    def steps(self) -> Optional[int]:
        """Number of step rows, None for a constant potential."""
        return int(self.samples.shape[0]) if self.is_time_dependent else None

    def at(self, step: int) -> np.ndarray:
        """Samples in effect at a time step (0-based)."""
        if not self.is_time_dependent:
            return self.samples
        if step >= self.samples.shape[0]:
            raise InvalidStepCountError(
                msg=(
                    f"Potential sequence holds {self.samples.shape[0]} steps, "
                    f"step {step} requested."
                )
            )
        return self.samples[step]

    def check_grid(self, grid: Grid) -> None:
        if self.points != grid.points:
            raise DimensionMismatchError(
                expected=grid.points,
                received=self.points,
                msg=(
                    f"Potential of {self.points} samples does not fit a grid of "
                    f"{grid.points} points."
                ),
            )

    @property
    def fingerprint(self) -> str:
        """Content digest of the samples at full precision and the mass."""
        _digest = hashlib.sha256()
        _digest.update(repr(self.samples.shape).encode())
        _digest.update(np.ascontiguousarray(self.samples, dtype="<f8").tobytes())
        _digest.update(float(self.mass).hex().encode())
        return _digest.hexdigest()


class PhasePoint(FrozenModel):
    """Classical Phase Point Model"""

    step: int = Field(title="Step", ge=0)
    time: float = Field(title="Time")
    position: float = Field(title="Position", description="Coordinate X.")
    momentum: float = Field(title="Momentum", description="Impulse P.")


class GridMeasurement(FrozenModel):
    """Grid Measurement Model

    Outcome of a deterministic coordinate or impulse measurement.
    """

    observable: Observable = Field(title="Observable")
    index: int = Field(
        title="Index",
        description="Grid index a, or signed momentum index b.",
    )
    value: float = Field(title="Value", description="Coordinate q_a or momentum p_b.")


class CoarseMeasurement(ArrayModel):
    """Coarse Coordinate Measurement Model

    Result of measuring the leading bits of the coordinate only, which localizes the
    particle within an interval of the grid.
    """

    prefix: int = Field(title="Prefix", description="Measured leading bits x.", ge=0)
    measured_bits: int = Field(title="Measured Bits", ge=1)
    lower: float = Field(title="Lower Bound", description="Interval start.")
    upper: float = Field(title="Upper Bound", description="Interval end, exclusive.")
    collapsed: GridWaveFunction = Field(title="Collapsed Wave Function")
    residual: OptionValue = Field(title="Residual Option")

    @property
    def width(self) -> float:
        return self.upper - self.lower
