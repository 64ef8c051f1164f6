import numpy as np
import pytest
from pydantic import ValidationError

from qscenario.exceptions.model import (
    DimensionMismatchError,
    InvalidOptionError,
    UnnormalizedStateError,
)
from qscenario.option_model import (
    locate,
    measure,
    partial_measure,
    phi,
    resolution,
    sweep_statistics,
    theta,
    thresholds,
    uncertainty_product,
)
from qscenario.schemas.state import DeterministicModel, StateVector

VOLUME = 1000


def test_thresholds_follow_cumulative_probabilities():
    assert thresholds([0.5, 0.3, 0.2], VOLUME) == (500, 800, 1000)
    assert thresholds([0.0, 1.0], 7) == (0, 7)
    assert thresholds([1 / 3, 1 / 3, 1 / 3], 10) == (3, 6, 10)


def test_measure_respects_bins():
    model = DeterministicModel(dimension=3, volume=VOLUME)
    state = StateVector.from_probabilities([0.5, 0.3, 0.2])
    assignment = phi(model, state)
    for k in (1, 500, 501, 800, 801, 1000):
        j = measure(model, state, k)
        lower = assignment.thresholds[j - 1] if j > 0 else 0
        assert lower < k <= assignment.thresholds[j]
    assert [measure(model, state, k) for k in (500, 501, 800, 801)] == [0, 1, 1, 2]


def test_born_statistics(random_state):
    model = DeterministicModel(dimension=4, volume=VOLUME)
    for _ in range(100):
        state = random_state(4)
        frequencies = sweep_statistics(model, state)
        assert np.all(np.abs(frequencies - state.probabilities) <= 2 / VOLUME)
        cumulative = np.cumsum(frequencies) - np.cumsum(state.probabilities)
        assert np.all(np.abs(cumulative) <= 1 / VOLUME + 1e-12)
        assert frequencies.sum() == pytest.approx(1.0, abs=1e-12)


def test_basis_state_is_measured_with_certainty():
    model = DeterministicModel(dimension=4, volume=50)
    state = StateVector.basis(4, 2)
    assert {measure(model, state, k) for k in range(1, 51)} == {2}


def test_repeated_measurement_is_identical(random_state):
    model = DeterministicModel(dimension=4, volume=VOLUME)
    state = random_state(4)
    first = measure(model, state, 617)
    assert all(measure(model, state, 617) == first for _ in range(10_000))


def test_theta_maps_assignment_onto_evolved_assignment(random_state, random_unitary):
    for dimension in (2, 4):
        model = DeterministicModel(dimension=dimension, volume=100)
        for _ in range(25):
            source = random_state(dimension)
            evolved = StateVector(
                amplitudes=random_unitary(dimension) @ source.amplitudes
            )
            permutation = theta(model, evolved, source)
            assert permutation.volume == 100
            for k, transition in enumerate(permutation.transitions, start=1):
                assert transition.source == measure(model, source, k)
                assert transition.target == measure(model, evolved, k)
            assert permutation.apply(phi(model, source).pairs()) == (
                phi(model, evolved).pairs()
            )


def test_theta_of_unchanged_state_is_identity(random_state):
    model = DeterministicModel(dimension=4, volume=100)
    state = random_state(4)
    permutation = theta(model, state, state)
    assert permutation.is_identity
    assert permutation.moved() == ()


def test_partial_then_full_measurement_matches_full_measurement(random_state):
    qubits = 3
    model = DeterministicModel(dimension=1 << qubits, volume=VOLUME)
    for measured_bits in (1, 2):
        block = 1 << (qubits - measured_bits)
        block_model = DeterministicModel(dimension=block, volume=VOLUME)
        for _ in range(10):
            state = random_state(1 << qubits)
            counts = np.zeros(1 << qubits)
            for k in range(1, VOLUME + 1):
                partial = partial_measure(model, state, measured_bits, k)
                assert partial.collapsed.dimension == block
                j = measure(block_model, partial.collapsed, partial.residual)
                counts[partial.prefix * block + j] += 1
            direct = sweep_statistics(model, state)
            assert np.all(np.abs(counts / VOLUME - direct) <= 4 / VOLUME)


def test_partial_measure_collapses_onto_block():
    model = DeterministicModel(dimension=4, volume=100)
    state = StateVector.from_probabilities([0.1, 0.3, 0.2, 0.4])
    partial = partial_measure(model, state, 1, 100)
    assert partial.prefix == 1
    assert partial.norm == pytest.approx(np.sqrt(0.6))
    np.testing.assert_allclose(
        partial.collapsed.probabilities, [0.2 / 0.6, 0.4 / 0.6], atol=1e-12
    )


def test_partial_measure_rejects_full_width():
    model = DeterministicModel(dimension=4, volume=100)
    with pytest.raises(DimensionMismatchError):
        partial_measure(model, StateVector.basis(4, 0), 2, 1)


def test_locate_returns_residual_position():
    assert locate([0.5, 0.5], 250.0, VOLUME) == (0, 500.0)
    index, residual = locate([0.25, 0.75], 625.0, VOLUME)
    assert index == 1
    assert residual == pytest.approx(500.0)
    with pytest.raises(InvalidOptionError):
        locate([0.5, 0.5], 0.0, VOLUME)


def test_resolution_and_uncertainty_product():
    assert resolution(4, 1) == (0.5, 0.125)
    for measured_bits in range(5):
        assert uncertainty_product(4, measured_bits) == 2.0**-4
    with pytest.raises(DimensionMismatchError):
        resolution(4, 5)


def test_model_properties():
    model = DeterministicModel(dimension=4, volume=200)
    assert model.accuracy == 1 / 200
    assert model.option_count == 800
    assert model.fidelity == 50
    assert [option.k for option in model.options()][-1] == 200


def test_invalid_inputs():
    model = DeterministicModel(dimension=2, volume=10)
    state = StateVector.basis(2, 0)
    with pytest.raises(InvalidOptionError):
        measure(model, state, 11)
    with pytest.raises(ValidationError):
        measure(model, state, 0)
    with pytest.raises(DimensionMismatchError):
        phi(DeterministicModel(dimension=3, volume=10), state)
    with pytest.raises(UnnormalizedStateError):
        StateVector(amplitudes=[1.0, 1.0])
