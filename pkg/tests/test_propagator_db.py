import shutil
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from qscenario.config import get_settings
from qscenario.exceptions.database import KeyMismatchError, MissingEntryError
from qscenario.exceptions.model import CapExceededError, DimensionMismatchError
from qscenario.grid_propagator import dft, evolve
from qscenario.propagator_db import (
    PropagatorDatabase,
    apply,
    build,
    inspect,
    lookup_or_build,
)
from qscenario.schemas.grid import Grid, GridWaveFunction, PotentialField
from qscenario.schemas.propagator import PropagatorKey

DT = 0.05
STEPS = 40


@pytest.fixture
def grid() -> Grid:
    return Grid(qubits=6)


@pytest.fixture
def field(grid: Grid) -> PotentialField:
    return PotentialField.harmonic(grid, frequency=0.8, center=0.5)


@pytest.fixture
def key(grid: Grid, field: PotentialField) -> PropagatorKey:
    return PropagatorKey.from_inputs(grid, field, DT, STEPS)


def _random_wave(grid: Grid, rng: np.random.Generator) -> GridWaveFunction:
    _amplitudes = rng.normal(size=grid.points) + 1j * rng.normal(size=grid.points)
    return GridWaveFunction.normalized(grid, _amplitudes)


def test_apply_matches_direct_evolution(grid, field, key, rng):
    db = PropagatorDatabase(path=None)
    entry = lookup_or_build(db, key, field, grid)
    for _ in range(10):
        wave = _random_wave(grid, rng)
        np.testing.assert_allclose(
            apply(entry, wave).amplitudes,
            evolve(wave, field, DT, STEPS).amplitudes,
            atol=1e-12,
        )


def test_apply_accepts_momentum_representation(grid, field, key, rng):
    entry = lookup_or_build(PropagatorDatabase(path=None), key, field, grid)
    wave = _random_wave(grid, rng)
    np.testing.assert_allclose(
        apply(entry, dft(wave)).amplitudes, apply(entry, wave).amplitudes, atol=1e-12
    )


def test_propagator_is_unitary(grid, field, key):
    db = PropagatorDatabase(path=None)
    lookup_or_build(db, key, field, grid)
    summary = inspect(db, key)
    assert summary.dimension == grid.points
    assert summary.digest == key.digest
    assert summary.path is None
    assert summary.unitarity_residual < 1e-9


def test_lookup_builds_once(grid, field, key):
    db = PropagatorDatabase(path=None)
    first = lookup_or_build(db, key, field, grid)
    second = lookup_or_build(db, key, field, grid)
    assert second is first
    assert db.builds == 1
    assert key in db
    assert list(db.keys()) == [key]


def test_persisted_entry_reloads(tmp_path, grid, field, key):
    stored = lookup_or_build(PropagatorDatabase(path=tmp_path), key, field, grid)
    assert (tmp_path / f"{key.digest}.npz").exists()

    reopened = PropagatorDatabase(path=tmp_path)
    assert key in reopened
    loaded = lookup_or_build(reopened, key, build_missing=False)
    assert reopened.builds == 0
    assert np.max(np.abs(loaded.matrix - stored.matrix)) <= 1e-15
    assert inspect(reopened, key).path == tmp_path / f"{key.digest}.npz"


def test_missing_entry_without_build(tmp_path, grid, field, key):
    db = PropagatorDatabase(path=tmp_path)
    with pytest.raises(MissingEntryError):
        lookup_or_build(db, key, field, grid, build_missing=False)
    with pytest.raises(MissingEntryError):
        lookup_or_build(db, key)
    with pytest.raises(MissingEntryError):
        inspect(db, key)
    assert list(tmp_path.iterdir()) == []


def test_key_must_match_inputs(grid, field, key):
    other = PotentialField.harmonic(grid, frequency=0.8, center=0.5, mass=2.0)
    assert PropagatorKey.from_inputs(grid, other, DT, STEPS) != key
    with pytest.raises(KeyMismatchError):
        build(key, other, grid)


def test_file_holding_another_key_is_rejected(tmp_path, grid, field, key):
    db = PropagatorDatabase(path=tmp_path)
    lookup_or_build(db, key, field, grid)
    shorter = PropagatorKey.from_inputs(grid, field, DT, STEPS - 1)
    shutil.copy(db.file_for(key), db.file_for(shorter))
    with pytest.raises(KeyMismatchError):
        PropagatorDatabase(path=tmp_path).get(shorter)


def test_key_digest_tracks_every_input(grid, field):
    base = PropagatorKey.from_inputs(grid, field, DT, STEPS)
    variants = [
        PropagatorKey.from_inputs(grid, field, DT, STEPS + 1),
        PropagatorKey.from_inputs(grid, field, np.nextafter(DT, 1.0), STEPS),
        PropagatorKey.from_inputs(
            grid, PotentialField.harmonic(grid, frequency=0.8, center=0.6), DT, STEPS
        ),
    ]
    assert len({base.digest, *(_key.digest for _key in variants)}) == 4


def test_dimension_mismatch_on_apply(grid, field, key):
    entry = lookup_or_build(PropagatorDatabase(path=None), key, field, grid)
    with pytest.raises(DimensionMismatchError):
        apply(entry, GridWaveFunction.delta(Grid(qubits=5), 0))


def test_build_respects_qubit_cap(monkeypatch, grid, field, key):
    monkeypatch.setattr(get_settings(), "DB_MAX_QUBITS", 5)
    with pytest.raises(CapExceededError):
        lookup_or_build(PropagatorDatabase(path=None), key, field, grid)


def test_concurrent_builds_are_counted(grid, field):
    db = PropagatorDatabase(path=None)
    keys = [
        PropagatorKey.from_inputs(grid, field, DT, _steps) for _steps in range(1, 9)
    ]

    def _build(key: PropagatorKey):
        return lookup_or_build(db, key, field, grid)

    with ThreadPoolExecutor(max_workers=4) as executor:
        entries = list(executor.map(_build, keys + keys))
    assert db.builds == len(keys)
    assert all(_a is _b for _a, _b in zip(entries[: len(keys)], entries[len(keys) :]))
