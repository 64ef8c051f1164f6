"""Deterministic measurement model.

Measurement outcomes are selected by a fixed option value instead of a random draw.
The option set 1..L is split into consecutive bins whose sizes follow the Born
probabilities of the measured state, so a sweep over every option value reproduces
the quantum statistics to within 1/L.
"""

from typing import Sequence, Union

import numpy as np
from pydantic import validate_call

from .exceptions.model import (
    DimensionMismatchError,
    InvalidOptionError,
    ZeroNormBlockError,
)
from .logger import get_logger
from .schemas.state import (
    DeterministicModel,
    OptionAssignment,
    OptionPermutation,
    OptionTransition,
    OptionValue,
    PartialMeasurement,
    StateVector,
)

logger = get_logger("option_model")

Probabilities = Union[Sequence[float], np.ndarray]

# scaled bounds this close to an integer are taken as that integer
BOUND_SNAP = 1e-9


def cumulative_bounds(probabilities: Probabilities, volume: int) -> np.ndarray:
    """Scaled cumulative probabilities L * sum_{p<=j} w_p, the last one forced to L.

    Parameters
    ----------
    probabilities : Probabilities
        Outcome weights, assumed normalized.
    volume : int
        Option volume L.

    Returns
    -------
    np.ndarray
        Upper bin bounds as floats, snapped onto integers within BOUND_SNAP.
    """
    _bounds = volume * np.cumsum(np.asarray(probabilities, dtype=np.float64))
    _nearest = np.round(_bounds)
    _bounds = np.where(np.abs(_bounds - _nearest) < BOUND_SNAP, _nearest, _bounds)
    _bounds[-1] = volume
    return _bounds


def thresholds(probabilities: Probabilities, volume: int) -> tuple[int, ...]:
    """Integer thresholds L_j = floor(L * sum_{p<=j} w_p), with L_{N-1} = L."""
    _floors = np.floor(cumulative_bounds(probabilities, volume)).astype(np.int64)
    # cumsum drift can push a bound a hair past L before the last entry
    np.minimum(_floors, volume, out=_floors)
    return tuple(int(_t) for _t in _floors)


def locate(
    probabilities: Probabilities, position: float, volume: int
) -> tuple[int, float]:
    """Select the outcome whose bin holds a position, and the residual position.

    Integer positions give the same outcome as the floor thresholds. The residual
    is the position rescaled within its bin back onto (0, L], so it carries the
    trailing option information to a following selection.

    Parameters
    ----------
    probabilities : Probabilities
        Outcome weights, assumed normalized.
    position : float
        Position in (0, L].
    volume : int
        Option volume L.

    Returns
    -------
    tuple[int, float]
        Outcome index and residual position.
    """
    if not 0.0 < position <= volume:
        raise InvalidOptionError(
            msg=f"Position {position!r} is outside the option range (0, {volume}]."
        )
    _bounds = cumulative_bounds(probabilities, volume)
    _index = int(np.searchsorted(_bounds, position, side="left"))
    _index = min(_index, len(_bounds) - 1)
    _lower = float(_bounds[_index - 1]) if _index > 0 else 0.0
    _upper = float(_bounds[_index])
    _residual = (position - _lower) * volume / (_upper - _lower)
    return _index, min(max(_residual, np.nextafter(0.0, 1.0)), float(volume))


def _check(model: DeterministicModel, state: StateVector) -> None:
    if state.dimension != model.dimension:
        raise DimensionMismatchError(
            expected=model.dimension,
            received=state.dimension,
            msg=(
                f"State of dimension {state.dimension} does not fit a model "
                f"of dimension {model.dimension}."
            ),
        )


@validate_call
def phi(model: DeterministicModel, state: StateVector) -> OptionAssignment:
    """Partition the option set into outcome bins for a state.

    Parameters
    ----------
    model : DeterministicModel
        Model fixing N and L.
    state : StateVector
        Normalized state of dimension N.

    Returns
    -------
    OptionAssignment
        Thresholds of the bins.
    """
    _check(model, state)
    return OptionAssignment(thresholds=thresholds(state.probabilities, model.volume))


@validate_call
def measure(model: DeterministicModel, state: StateVector, option: OptionValue) -> int:
    """Deterministic measurement of a state under a fixed option value.

    Parameters
    ----------
    model : DeterministicModel
        Model fixing N and L.
    state : StateVector
        Measured state.
    option : OptionValue
        Option value in 1..L.

    Returns
    -------
    int
        The unique outcome j with L_{j-1} < k <= L_j.
    """
    model.check_option(option)
    return phi(model, state).outcome(option.k)


@validate_call
def theta(
    model: DeterministicModel, evolved: StateVector, source: StateVector
) -> OptionPermutation:
    """Per-option permutation carrying the bins of a state onto those of its image.

    Parameters
    ----------
    model : DeterministicModel
        Model fixing N and L.
    evolved : StateVector
        Image U|source> of the source state.
    source : StateVector
        State before the evolution.

    Returns
    -------
    OptionPermutation
        For each k, the move (measure(source, k), k) -> (measure(evolved, k), k).
    """
    _before = phi(model, source)
    _after = phi(model, evolved)
    return OptionPermutation(
        transitions=tuple(
            OptionTransition(source=_before.outcome(_k), target=_after.outcome(_k))
            for _k in range(1, model.volume + 1)
        )
    )


@validate_call
def sweep_statistics(model: DeterministicModel, state: StateVector) -> np.ndarray:
    """Outcome frequencies over the full option sweep, (L_j - L_{j-1}) / L."""
    _assignment = phi(model, state)
    return np.asarray(_assignment.sizes(), dtype=np.float64) / model.volume


@validate_call
def partial_measure(
    model: DeterministicModel,
    state: StateVector,
    measured_bits: int,
    option: OptionValue,
) -> PartialMeasurement:
    """Measure the leading bits of an n-qubit state and collapse onto the block.

    The coarse model over the 2^m prefixes uses the block probabilities. The
    selected prefix x consumes the leading part of the option, the rest is
    rescaled into a fresh option value of the same volume.

    Parameters
    ----------
    model : DeterministicModel
        Model of the full state, N = 2^n.
    state : StateVector
        State over n qubits.
    measured_bits : int
        Number m of leading bits measured, 1 <= m < n.
    option : OptionValue
        Option value in 1..L.

    Returns
    -------
    PartialMeasurement
        Prefix, collapsed block state, normalizing factor and residual option.
    """
    _check(model, state)
    model.check_option(option)
    _qubits = model.dimension.bit_length() - 1
    if model.dimension != 1 << _qubits:
        raise DimensionMismatchError(
            received=model.dimension,
            msg=f"Dimension {model.dimension} is not a power of two.",
        )
    if not 1 <= measured_bits < _qubits:
        raise DimensionMismatchError(
            expected=_qubits,
            received=measured_bits,
            msg=f"Cannot measure {measured_bits} of {_qubits} bits partially.",
        )

    _block = 1 << (_qubits - measured_bits)
    _blocks = state.amplitudes.reshape(1 << measured_bits, _block)
    _block_probabilities = np.sum(np.abs(_blocks) ** 2, axis=1)

    _thresholds = thresholds(_block_probabilities, model.volume)
    _prefix = int(np.searchsorted(_thresholds, option.k, side="left"))
    _norm = float(np.sqrt(_block_probabilities[_prefix]))
    if _norm == 0.0:
        raise ZeroNormBlockError(msg=f"Block {_prefix} selected with zero norm.")

    _lower = _thresholds[_prefix - 1] if _prefix > 0 else 0
    _width = _thresholds[_prefix] - _lower
    _residual = -(-(option.k - _lower) * model.volume // _width)
    logger.debug(
        f"Partial measurement: prefix={_prefix}, d={_norm!r}, residual={_residual}"
    )

    return PartialMeasurement(
        prefix=_prefix,
        measured_bits=measured_bits,
        collapsed=StateVector(amplitudes=_blocks[_prefix] / _norm),
        norm=_norm,
        residual=OptionValue(k=_residual),
    )


@validate_call
def resolution(qubits: int, measured_bits: int) -> tuple[float, float]:
    """Coordinate and impulse bin widths after measuring m of n coordinate bits.

    Parameters
    ----------
    qubits : int
        Bits n of the coordinate encoding.
    measured_bits : int
        Bits m measured, 0 <= m <= n.

    Returns
    -------
    tuple[float, float]
        (2^-m, 2^-(n-m)).
    """
    if not 0 <= measured_bits <= qubits:
        raise DimensionMismatchError(
            expected=qubits,
            received=measured_bits,
            msg=f"Cannot split {qubits} bits at {measured_bits}.",
        )
    return 2.0**-measured_bits, 2.0 ** -(qubits - measured_bits)


def uncertainty_product(qubits: int, measured_bits: int) -> float:
    """Product of the coordinate and impulse bin widths, always 2^-n."""
    _coordinate, _impulse = resolution(qubits, measured_bits)
    return _coordinate * _impulse
