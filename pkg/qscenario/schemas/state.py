from typing import Any, Iterator

import numpy as np
from pydantic import Field, field_validator, model_validator
from typing_extensions import Self

from ..config import get_settings
from ..exceptions.model import InvalidOptionError, UnnormalizedStateError
from ..types import ComplexVector
from .common.base import ArrayModel, FrozenModel

config = get_settings()


class StateVector(ArrayModel):
    """State Vector Model

    Amplitudes of a pure state over N basic states. States within the normalization
    tolerance are renormalized on construction, others are rejected.
    """

    amplitudes: ComplexVector = Field(
        title="Amplitudes",
        description="Complex amplitudes over the basic states.",
    )

    @field_validator("amplitudes", mode="after")
    @classmethod
    def _check_norm(cls, value: np.ndarray) -> np.ndarray:
        if value.size < 1:
            raise UnnormalizedStateError(msg="State vector has no amplitudes.")
        _norm = float(np.vdot(value, value).real)
        if abs(_norm - 1.0) > config.SIM_NORM_TOLERANCE:
            raise UnnormalizedStateError(
                norm=_norm,
                msg=f"State vector has squared norm {_norm!r}.",
            )
        if _norm != 1.0:
            value = value / np.sqrt(_norm)
            value.setflags(write=False)
        return value

    @classmethod
    def from_probabilities(cls, probabilities: Any) -> Self:
        """Build the state with real non-negative amplitudes sqrt(p_j).

        Parameters
        ----------
        probabilities : Any
            Sequence of outcome probabilities.

        Returns
        -------
        Self
            New state vector.
        """
        return cls(amplitudes=np.sqrt(np.asarray(probabilities, dtype=np.float64)))

    @classmethod
    def basis(cls, dimension: int, index: int) -> Self:
        """Basic state |index> of the given dimension."""
        _amplitudes = np.zeros(dimension, dtype=np.complex128)
        _amplitudes[index] = 1.0
        return cls(amplitudes=_amplitudes)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    @property
    def probabilities(self) -> np.ndarray:
        """Born probabilities |lambda_j|^2."""
        return np.abs(self.amplitudes) ** 2


class DeterministicModel(FrozenModel):
    """Deterministic Measurement Model

    Dimension N and L option values per outcome set. The option set holds N*L
    (outcome, option) pairs.
    """

    dimension: int = Field(title="Dimension", description="Basic state count N.", ge=1)
    volume: int = Field(
        title="Volume Per Outcome",
        description="Option values per outcome set (L).",
        default=config.SIM_OPTION_VOLUME,
        ge=1,
    )

    @property
    def accuracy(self) -> float:
        """Accuracy epsilon = 1/L."""
        return 1.0 / self.volume

    @property
    def option_count(self) -> int:
        """Total count of (outcome, option) pairs, N*L."""
        return self.dimension * self.volume

    @property
    def fidelity(self) -> float:
        """Fidelity L/N of the urn model."""
        return self.volume / self.dimension

    def options(self) -> Iterator["OptionValue"]:
        """Iterate over every option value 1..L."""
        for _k in range(1, self.volume + 1):
            yield OptionValue(k=_k)

    def check_option(self, option: "OptionValue") -> None:
        if option.k > self.volume:
            raise InvalidOptionError(
                msg=f"Option value {option.k} exceeds the model volume {self.volume}."
            )


class OptionValue(FrozenModel):
    """Option Value Model

    Accepts a bare integer in place of the mapping form.
    """

    k: int = Field(title="Option", description="Option value, 1-based.", ge=1)

    @model_validator(mode="before")
    @classmethod
    def _from_int(cls, value: Any) -> Any:
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return {"k": int(value)}
        return value

    def __int__(self) -> int:
        return self.k


class OptionAssignment(FrozenModel):
    """Option Assignment Model

    Thresholds L_0 <= ... <= L_{N-1} = L, with L_{-1} = 0 implied. Option k is
    assigned to outcome j when L_{j-1} < k <= L_j.
    """

    thresholds: tuple[int, ...] = Field(title="Thresholds", min_length=1)

    @model_validator(mode="after")
    def _check_thresholds(self) -> Self:
        _previous = 0
        for _threshold in self.thresholds:
            if _threshold < _previous:
                raise ValueError("Thresholds must be nondecreasing and non-negative.")
            _previous = _threshold
        if self.thresholds[-1] < 1:
            raise ValueError("The last threshold must equal the volume L >= 1.")
        return self

    @property
    def volume(self) -> int:
        return self.thresholds[-1]

    @property
    def dimension(self) -> int:
        return len(self.thresholds)

    def bin(self, outcome: int) -> range:
        """Option values assigned to an outcome."""
        _lower = self.thresholds[outcome - 1] if outcome > 0 else 0
        return range(_lower + 1, self.thresholds[outcome] + 1)

    def outcome(self, k: int) -> int:
        """Outcome j holding option k."""
        return int(np.searchsorted(self.thresholds, k, side="left"))

    def sizes(self) -> tuple[int, ...]:
        return tuple(int(_s) for _s in np.diff(self.thresholds, prepend=0))

    def pairs(self) -> frozenset[tuple[int, int]]:
        """The set of (outcome, option) pairs of the assignment."""
        return frozenset(
            (_j, _k) for _j in range(self.dimension) for _k in self.bin(_j)
        )


class OptionTransition(FrozenModel):
    """Per-option Transition Model"""

    source: int = Field(title="Source Outcome", ge=0)
    target: int = Field(title="Target Outcome", ge=0)


class OptionPermutation(FrozenModel):
    """Option Permutation Model

    ``transitions[k - 1]`` moves the pair (source, k) to (target, k).
    """

    transitions: tuple[OptionTransition, ...] = Field(title="Transitions", min_length=1)

    @property
    def volume(self) -> int:
        return len(self.transitions)

    @property
    def is_identity(self) -> bool:
        return all(_t.source == _t.target for _t in self.transitions)

    def moved(self) -> tuple[int, ...]:
        """Option values whose outcome changes."""
        return tuple(
            _k
            for _k, _t in enumerate(self.transitions, start=1)
            if _t.source != _t.target
        )

    def apply(self, pairs: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
        """Act on a set of (outcome, option) pairs.

        Pairs whose outcome is not the transition source for their option are left
        out, as they are not in the permutation's domain.
        """
        _image = set()
        for _j, _k in pairs:
            _transition = self.transitions[_k - 1]
            if _transition.source == _j:
                _image.add((_transition.target, _k))
        return frozenset(_image)


class PartialMeasurement(ArrayModel):
    """Partial Measurement Result Model"""

    prefix: int = Field(title="Prefix", description="Measured leading bits x.", ge=0)
    measured_bits: int = Field(title="Measured Bits", ge=1)
    collapsed: StateVector = Field(title="Collapsed State")
    norm: float = Field(title="Block Norm", description="Normalizing factor d.", gt=0)
    residual: OptionValue = Field(title="Residual Option")
