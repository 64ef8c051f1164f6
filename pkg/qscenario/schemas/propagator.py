import hashlib
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import Field, model_validator
from typing_extensions import Self

from ..exceptions.model import DimensionMismatchError
from ..types import ComplexMatrix
from .common.base import ArrayModel, FrozenModel
from .grid import Grid, PotentialField


class PropagatorKey(FrozenModel):
    """Propagator Key Model

    Identifies a propagator by the grid, the potential content, the time step and
    the horizon. Equal keys are equal inputs bit for bit.
    """

    qubits: int = Field(title="Qubits", description="Grid exponent l.", ge=1)
    fingerprint: str = Field(
        title="Potential Fingerprint",
        description="SHA-256 of the potential samples and the mass.",
        min_length=64,
        max_length=64,
    )
    dt: float = Field(title="Time Step")
    steps: int = Field(title="Steps", description="Horizon T / dt.", ge=0)

    @classmethod
    def from_inputs(
        cls, grid: Grid, field: PotentialField, dt: float, steps: int
    ) -> Self:
        return cls(
            qubits=grid.qubits,
            fingerprint=field.fingerprint,
            dt=dt,
            steps=steps,
        )

    @property
    def canonical(self) -> str:
        """Canonical text form, the time step as an exact hexadecimal float."""
        return f"l={self.qubits};v={self.fingerprint};dt={self.dt.hex()};T={self.steps}"

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical.encode()).hexdigest()


class PropagatorMatrix(ArrayModel):
    """Propagator Matrix Model

    Dense N x N evolution operator M(T) of a key.
    """

    key: PropagatorKey = Field(title="Key")
    matrix: ComplexMatrix = Field(title="Matrix")

    @model_validator(mode="after")
    def _check_shape(self) -> Self:
        _points = 1 << self.key.qubits
        if self.matrix.shape != (_points, _points):
            raise DimensionMismatchError(
                expected=_points,
                received=int(self.matrix.shape[0]),
                msg=(
                    f"Propagator of shape {self.matrix.shape} does not fit "
                    f"a grid of {_points} points."
                ),
            )
        return self

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def unitarity_residual(self) -> float:
        """Largest entry of |M^dagger M - I|."""
        _product = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(_product - np.eye(self.dimension))))


class PropagatorSummary(FrozenModel):
    """Propagator Inspection Model"""

    key: PropagatorKey = Field(title="Key")
    digest: str = Field(title="Digest")
    dimension: int = Field(title="Dimension")
    unitarity_residual: float = Field(title="Unitarity Residual")
    path: Optional[Path] = Field(
        title="Path",
        description="Persisted file, None for an in-memory database.",
        default=None,
    )
