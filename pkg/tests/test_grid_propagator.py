import numpy as np
import pytest
from scipy import fft
from scipy.linalg import expm

from qscenario.config import get_settings
from qscenario.exceptions.cli import ParseError
from qscenario.exceptions.model import (
    CapExceededError,
    DimensionMismatchError,
    InvalidStepCountError,
    OutOfGridRangeError,
)
from qscenario.grid_propagator import (
    adjoint_step,
    classical_trajectory,
    coarse_position,
    evolve,
    expectation,
    grid_for,
    measure_momentum,
    measure_position,
    propagate_amplitudes,
    step,
)
from qscenario.schemas.grid import (
    Grid,
    GridWaveFunction,
    Observable,
    PotentialField,
    Representation,
)


def _dense_hamiltonian(grid: Grid, field: PotentialField) -> np.ndarray:
    _fourier = fft.fft(np.eye(grid.points), axis=0, norm="ortho")
    _kinetic = _fourier.conj().T @ np.diag(grid.momenta**2 / (2 * field.mass))
    return np.diag(field.samples) + _kinetic @ _fourier


def test_grid_geometry():
    grid = Grid(qubits=4)
    assert grid.points == 16
    assert grid.spacing**2 * grid.points == pytest.approx(2 * np.pi)
    assert grid.positions[0] == pytest.approx(-grid.half_range)
    assert list(grid.signed_indices[7:10]) == [7, -8, -7]
    assert grid_for(16) == grid
    with pytest.raises(DimensionMismatchError):
        grid_for(12)


def test_grid_size_is_capped(monkeypatch):
    with pytest.raises(CapExceededError) as info:
        Grid(qubits=get_settings().GRID_MAX_QUBITS + 1)
    assert info.value.cap == get_settings().GRID_MAX_QUBITS

    monkeypatch.setattr(get_settings(), "GRID_MAX_QUBITS", 4)
    assert Grid(qubits=4).points == 16
    with pytest.raises(CapExceededError):
        Grid(qubits=5)


def test_norm_is_conserved_over_long_evolution():
    grid = Grid(qubits=8)
    wave = GridWaveFunction.gaussian(grid, position=2.0, momentum=-1.0, width=1.5)
    evolved = evolve(wave, PotentialField.harmonic(grid), 0.01, 10_000)
    assert abs(evolved.norm - 1.0) < 1e-10


def test_step_error_is_first_order():
    grid = Grid(qubits=8)
    field = PotentialField.harmonic(grid)
    wave = GridWaveFunction.gaussian(grid, position=1.0, momentum=0.5)
    exact = expm(-1j * _dense_hamiltonian(grid, field)) @ wave.amplitudes

    errors = [
        np.linalg.norm(evolve(wave, field, dt, steps).amplitudes - exact)
        for dt, steps in ((0.02, 50), (0.01, 100))
    ]
    assert 1.5 <= errors[0] / errors[1] <= 2.5


def test_expectations_follow_classical_motion():
    grid = Grid(qubits=8)
    field = PotentialField.linear(grid, slope=0.1)
    wave = GridWaveFunction.gaussian(grid, position=0.0, momentum=1.0)
    trajectory = classical_trajectory(grid, 0.0, 1.0, field, 0.05, 100)
    assert len(trajectory) == 101

    current = wave
    for point in trajectory[1:]:
        current = step(current, field, 0.05)
        position = expectation(current, Observable.POSITION)
        momentum = expectation(current, Observable.MOMENTUM)
        # dq and dp share one spacing
        assert abs(position - point.position) <= 2 * grid.spacing
        assert abs(momentum - point.momentum) <= 2 * grid.spacing
    assert trajectory[-1].momentum == pytest.approx(1.0 - 0.1 * 5.0)


def test_classical_trajectory_leaving_grid_raises():
    grid = Grid(qubits=4)
    with pytest.raises(OutOfGridRangeError):
        classical_trajectory(grid, 0.0, 10.0, PotentialField.free(grid), 0.1, 100)


def test_zero_steps_returns_input():
    grid = Grid(qubits=5)
    wave = GridWaveFunction.gaussian(grid, momentum=1.0)
    assert evolve(wave, PotentialField.harmonic(grid), 0.1, 0) == wave


def test_invalid_step_counts():
    grid = Grid(qubits=4)
    wave = GridWaveFunction.delta(grid, 3)
    with pytest.raises(InvalidStepCountError):
        evolve(wave, PotentialField.free(grid), 0.1, -1)
    sequence = PotentialField(samples=np.zeros((3, grid.points)))
    with pytest.raises(InvalidStepCountError):
        evolve(wave, sequence, 0.1, 4)
    with pytest.raises(DimensionMismatchError):
        evolve(wave, PotentialField.free(Grid(qubits=5)), 0.1, 1)


def test_time_dependent_potential_can_be_chunked(rng):
    grid = Grid(qubits=5)
    field = PotentialField(samples=rng.uniform(-1.0, 1.0, size=(6, grid.points)))
    wave = GridWaveFunction.gaussian(grid, momentum=0.5)
    whole = propagate_amplitudes(wave.amplitudes, field, 0.1, 6)
    first = propagate_amplitudes(wave.amplitudes, field, 0.1, 3)
    chunked = propagate_amplitudes(first, field, 0.1, 3, start=3)
    np.testing.assert_allclose(chunked, whole, atol=1e-13)


def test_adjoint_step_undoes_step():
    grid = Grid(qubits=6)
    field = PotentialField.harmonic(grid, frequency=0.7, center=1.0)
    wave = GridWaveFunction.gaussian(grid, position=-1.0, momentum=2.0)
    restored = adjoint_step(step(wave, field, 0.05), field, -0.05)
    assert restored.representation == Representation.POSITION
    np.testing.assert_allclose(restored.amplitudes, wave.amplitudes, atol=1e-12)


def test_position_and_momentum_measurement():
    grid = Grid(qubits=4)
    delta = GridWaveFunction.delta(grid, 5)
    for k in (1, 4, 10):
        result = measure_position(delta, k, volume=10)
        assert result.index == 5
        assert result.value == pytest.approx(grid.positions[5])

    assert measure_momentum(GridWaveFunction.plane_wave(grid, 3), 7).index == 3
    backwards = measure_momentum(GridWaveFunction.plane_wave(grid, 15), 7)
    assert backwards.index == -1
    assert backwards.value == pytest.approx(-grid.spacing)


def test_coarse_position_collapses_onto_interval():
    grid = Grid(qubits=3)
    result = coarse_position(GridWaveFunction.delta(grid, 6), 1, 1, volume=100)
    assert result.prefix == 1
    assert result.lower == pytest.approx(grid.positions[4])
    assert result.width == pytest.approx(4 * grid.spacing)
    assert result.collapsed.probabilities[6] == pytest.approx(1.0)


def test_tags():
    grid = Grid(qubits=4)
    assert GridWaveFunction.from_tag(grid, "delta:3") == GridWaveFunction.delta(grid, 3)
    assert GridWaveFunction.from_tag(grid, "plane:2") == (
        GridWaveFunction.plane_wave(grid, 2)
    )
    assert PotentialField.from_tag(grid, "harmonic:2:1") == (
        PotentialField.harmonic(grid, frequency=2.0, center=1.0)
    )
    assert PotentialField.from_tag(grid, "linear:0.5") == (
        PotentialField.linear(grid, slope=0.5)
    )
    for tag in ("gaussian:0:0:0", "delta:16", "delta:1.5", "bogus"):
        with pytest.raises(ParseError):
            GridWaveFunction.from_tag(grid, tag)
    for tag in ("linear:x", "harmonic", "free:1"):
        with pytest.raises(ParseError):
            PotentialField.from_tag(grid, tag)
