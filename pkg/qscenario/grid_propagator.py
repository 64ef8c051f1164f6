"""Split-operator propagation on a 2^l point coordinate grid.

One step multiplies by the potential phase exp(-i V dt) in the coordinate basis, then
by the kinetic phase exp(-i pi b^2 dt / (m N)) in the impulse basis reached through
the discrete Fourier transform. The grid is periodic, hbar = 1.
"""

from threading import RLock
from typing import Optional

import numpy as np
from cachetools import LRUCache, cached
from pydantic import validate_call
from scipy import fft

from .exceptions.model import (
    DimensionMismatchError,
    InvalidStepCountError,
    OutOfGridRangeError,
)
from .logger import get_logger
from .option_model import measure, partial_measure
from .schemas.grid import (
    CoarseMeasurement,
    Grid,
    GridMeasurement,
    GridWaveFunction,
    Observable,
    PhasePoint,
    PotentialField,
    Representation,
)
from .schemas.state import DeterministicModel, OptionValue, StateVector

logger = get_logger("grid")


def _as_representation(
    wave: GridWaveFunction, representation: Representation
) -> GridWaveFunction:
    if wave.representation == representation:
        return wave
    if representation == Representation.MOMENTUM:
        return dft(wave)
    return idft(wave)


@cached(cache=LRUCache(maxsize=32), lock=RLock())
def _kinetic_factor(grid: Grid, dt: float, mass: float) -> np.ndarray:
    _b = grid.signed_indices
    _factor = np.exp(-1j * np.pi * _b**2 * dt / (mass * grid.points))
    _factor.setflags(write=False)
    return _factor


def _check_field(wave: GridWaveFunction, field: PotentialField) -> None:
    field.check_grid(wave.grid)


def _check_steps(field: PotentialField, steps: int, start: int = 0) -> None:
    if steps < 0:
        raise InvalidStepCountError(msg=f"Step count {steps} is negative.")
    if field.is_time_dependent and start + steps > field.steps:
        raise InvalidStepCountError(
            msg=(
                f"Potential sequence holds {field.steps} steps, "
                f"{start + steps} required."
            )
        )


def propagate_amplitudes(
    amplitudes: np.ndarray,
    field: PotentialField,
    dt: float,
    steps: int,
    start: int = 0,
) -> np.ndarray:
    """Apply split-operator steps to raw coordinate amplitudes.

    Works on a single vector or on a matrix whose columns are independent states.

    Parameters
    ----------
    amplitudes : np.ndarray
        Coordinate amplitudes, shape (N,) or (N, K).
    field : PotentialField
        Potential, constant or step-indexed.
    dt : float
        Time step.
    steps : int
        Number of steps.
    start : int, optional
        Index of the first step into a time-dependent potential, by default 0.

    Returns
    -------
    np.ndarray
        Evolved amplitudes, a fresh array of the input shape.
    """
    _check_steps(field, steps, start)
    _grid = grid_for(field.points)
    _kinetic = _kinetic_factor(_grid, dt, field.mass)
    _column = (slice(None),) + (None,) * (np.ndim(amplitudes) - 1)

    _psi = np.array(amplitudes, dtype=np.complex128, copy=True)
    _potential: Optional[np.ndarray] = None
    if not field.is_time_dependent:
        _potential = np.exp(-1j * field.samples * dt)[_column]

    for _step in range(start, start + steps):
        if field.is_time_dependent:
            _potential = np.exp(-1j * field.at(_step) * dt)[_column]
        _psi = fft.fft(_potential * _psi, axis=0, norm="ortho")
        _psi = fft.ifft(_kinetic[_column] * _psi, axis=0, norm="ortho")
    return _psi


@validate_call
def dft(wave: GridWaveFunction) -> GridWaveFunction:
    """Unitary discrete Fourier transform to the impulse representation.

    Kernel exp(-2 pi i a b / N) / sqrt(N), index b in the unshifted order.
    """
    return GridWaveFunction(
        grid=wave.grid,
        amplitudes=fft.fft(wave.amplitudes, norm="ortho"),
        representation=Representation.MOMENTUM,
    )


@validate_call
def idft(wave: GridWaveFunction) -> GridWaveFunction:
    """Inverse of ``dft``, back to the coordinate representation."""
    return GridWaveFunction(
        grid=wave.grid,
        amplitudes=fft.ifft(wave.amplitudes, norm="ortho"),
        representation=Representation.POSITION,
    )


@validate_call
def potential_phase(
    wave: GridWaveFunction, field: PotentialField, dt: float, step: int = 0
) -> GridWaveFunction:
    """Multiply psi(q_a) by exp(-i V(q_a) dt).

    Parameters
    ----------
    wave : GridWaveFunction
        Coordinate representation wave function.
    field : PotentialField
        Potential.
    dt : float
        Time step.
    step : int, optional
        Row of a time-dependent potential, by default 0.

    Returns
    -------
    GridWaveFunction
        Phase-shifted wave function.
    """
    _check_field(wave, field)
    _wave = _as_representation(wave, Representation.POSITION)
    return GridWaveFunction(
        grid=_wave.grid,
        amplitudes=np.exp(-1j * field.at(step) * dt) * _wave.amplitudes,
    )


@validate_call
def kinetic_phase(wave: GridWaveFunction, dt: float, mass: float) -> GridWaveFunction:
    """Multiply the impulse amplitude at signed index b by exp(-i pi b^2 dt / (m N)).

    Parameters
    ----------
    wave : GridWaveFunction
        Impulse representation wave function, transformed first if needed.
    dt : float
        Time step.
    mass : float
        Particle mass.

    Returns
    -------
    GridWaveFunction
        Phase-shifted wave function in the impulse representation.
    """
    _wave = _as_representation(wave, Representation.MOMENTUM)
    return GridWaveFunction(
        grid=_wave.grid,
        amplitudes=_kinetic_factor(_wave.grid, dt, mass) * _wave.amplitudes,
        representation=Representation.MOMENTUM,
    )


@validate_call
def step(
    wave: GridWaveFunction, field: PotentialField, dt: float, index: int = 0
) -> GridWaveFunction:
    """One split-operator step, potential first, then kinetic."""
    _shifted = potential_phase(wave, field, dt, step=index)
    return idft(kinetic_phase(dft(_shifted), dt, field.mass))


@validate_call
def adjoint_step(
    wave: GridWaveFunction, field: PotentialField, dt: float, index: int = 0
) -> GridWaveFunction:
    """Split-operator step in reverse order, kinetic first, then potential.

    With -dt it undoes ``step`` with dt.
    """
    _shifted = idft(kinetic_phase(dft(wave), dt, field.mass))
    return potential_phase(_shifted, field, dt, step=index)


@validate_call
def evolve(
    wave: GridWaveFunction, field: PotentialField, dt: float, steps: int
) -> GridWaveFunction:
    """Evolve a wave function over a number of split-operator steps.

    Parameters
    ----------
    wave : GridWaveFunction
        Initial wave function.
    field : PotentialField
        Potential, a time-dependent one must hold at least ``steps`` rows.
    dt : float
        Time step.
    steps : int
        Number of steps T / dt, zero returns the input.

    Returns
    -------
    GridWaveFunction
        Wave function in the coordinate representation at time steps * dt.
    """
    _check_field(wave, field)
    _check_steps(field, steps)
    if steps == 0:
        return wave
    _wave = _as_representation(wave, Representation.POSITION)
    logger.debug(f"Evolving {steps} steps of dt={dt!r} on {_wave.grid.points} points")
    return GridWaveFunction(
        grid=_wave.grid,
        amplitudes=propagate_amplitudes(_wave.amplitudes, field, dt, steps),
    )


@validate_call
def expectation(wave: GridWaveFunction, observable: Observable) -> float:
    """Expectation of the coordinate or the centered momentum.

    Parameters
    ----------
    wave : GridWaveFunction
        Wave function in either representation.
    observable : Observable
        Position or momentum.

    Returns
    -------
    float
        Sum of q_a |psi(q_a)|^2, or of p_b |phi(p_b)|^2.
    """
    if observable == Observable.POSITION:
        _wave = _as_representation(wave, Representation.POSITION)
        return float(np.dot(_wave.grid.positions, _wave.probabilities))
    _wave = _as_representation(wave, Representation.MOMENTUM)
    return float(np.dot(_wave.grid.momenta, _wave.probabilities))


@validate_call
def classical_trajectory(
    grid: Grid,
    position: float,
    momentum: float,
    field: PotentialField,
    dt: float,
    steps: int,
) -> tuple[PhasePoint, ...]:
    """Symplectic Euler integration of X' = P/m, P' = -dV/dX.

    The force is the central-difference gradient of the grid samples, linearly
    interpolated between grid points. Each step kicks the impulse before drifting
    the coordinate, the order of the split-operator step.

    Parameters
    ----------
    grid : Grid
        Grid the potential is sampled on.
    position : float
        Initial coordinate x0.
    momentum : float
        Initial impulse p0.
    field : PotentialField
        Potential.
    dt : float
        Time step.
    steps : int
        Number of steps.

    Returns
    -------
    tuple[PhasePoint, ...]
        Phase points for steps 0..steps.
    """
    field.check_grid(grid)
    _check_steps(field, steps)
    _q = grid.positions
    _limit = grid.half_range

    _x, _p = float(position), float(momentum)
    if not -_limit < _x < _limit:
        raise OutOfGridRangeError(
            position=_x, step=0, msg=f"Initial position {_x!r} is off the grid."
        )
    _points = [PhasePoint(step=0, time=0.0, position=_x, momentum=_p)]
    for _step in range(steps):
        _slope = np.gradient(field.at(_step), grid.spacing)
        _p -= float(np.interp(_x, _q, _slope)) * dt
        _x += _p * dt / field.mass
        if not -_limit < _x < _limit:
            raise OutOfGridRangeError(
                position=_x,
                step=_step + 1,
                msg=f"Trajectory left the grid at step {_step + 1}, X={_x!r}.",
            )
        _points.append(
            PhasePoint(step=_step + 1, time=(_step + 1) * dt, position=_x, momentum=_p)
        )
    return tuple(_points)


def _model(grid: Grid, volume: Optional[int]) -> DeterministicModel:
    if volume is None:
        return DeterministicModel(dimension=grid.points)
    return DeterministicModel(dimension=grid.points, volume=volume)


@validate_call
def measure_position(
    wave: GridWaveFunction, option: OptionValue, volume: Optional[int] = None
) -> GridMeasurement:
    """Deterministic coordinate measurement, bins along ascending a."""
    _wave = _as_representation(wave, Representation.POSITION)
    _index = measure(
        _model(_wave.grid, volume), StateVector(amplitudes=_wave.amplitudes), option
    )
    return GridMeasurement(
        observable=Observable.POSITION,
        index=_index,
        value=float(_wave.grid.positions[_index]),
    )


@validate_call
def measure_momentum(
    wave: GridWaveFunction, option: OptionValue, volume: Optional[int] = None
) -> GridMeasurement:
    """Deterministic impulse measurement, bins along ascending signed momentum."""
    _wave = _as_representation(wave, Representation.MOMENTUM)
    _centered = fft.fftshift(_wave.amplitudes)
    _shifted = measure(
        _model(_wave.grid, volume), StateVector(amplitudes=_centered), option
    )
    _index = _shifted - _wave.grid.points // 2
    return GridMeasurement(
        observable=Observable.MOMENTUM,
        index=_index,
        value=_index * _wave.grid.spacing,
    )


@validate_call
def coarse_position(
    wave: GridWaveFunction,
    measured_bits: int,
    option: OptionValue,
    volume: Optional[int] = None,
) -> CoarseMeasurement:
    """Inexact coordinate measurement of the leading bits of the grid index.

    Parameters
    ----------
    wave : GridWaveFunction
        Wave function over l >= 2 qubits.
    measured_bits : int
        Leading bits m measured, 1 <= m < l.
    option : OptionValue
        Option value.
    volume : Optional[int], optional
        Option volume L, by default the configured one.

    Returns
    -------
    CoarseMeasurement
        Interval of width 2^(l-m) dq, the wave function collapsed onto it and the
        residual option.
    """
    _wave = _as_representation(wave, Representation.POSITION)
    _grid = _wave.grid
    _partial = partial_measure(
        _model(_grid, volume),
        StateVector(amplitudes=_wave.amplitudes),
        measured_bits,
        option,
    )
    _block = _grid.points >> measured_bits
    _start = _partial.prefix * _block

    _amplitudes = np.zeros(_grid.points, dtype=np.complex128)
    _amplitudes[_start : _start + _block] = _partial.collapsed.amplitudes
    _lower = float(_grid.positions[_start])
    return CoarseMeasurement(
        prefix=_partial.prefix,
        measured_bits=measured_bits,
        lower=_lower,
        upper=_lower + _block * _grid.spacing,
        collapsed=GridWaveFunction(grid=_grid, amplitudes=_amplitudes),
        residual=_partial.residual,
    )


def grid_for(points: int) -> Grid:
    """Grid of a given point count, which must be a power of two."""
    _qubits = points.bit_length() - 1
    if points < 2 or points != 1 << _qubits:
        raise DimensionMismatchError(
            received=points, msg=f"{points} is not a power of two grid size."
        )
    return Grid(qubits=_qubits)

