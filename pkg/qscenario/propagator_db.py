"""Propagator database.

The full linear evolution operator of a fixed potential, time step and horizon is
computed once and stored, so each further initial condition costs a single
matrix-vector product.
"""

import json
import os
from pathlib import Path
from threading import Lock
from typing import Iterator, Optional, Union

import numpy as np
from cachetools import LRUCache
from pydantic import validate_call

from .config import get_settings
from .decorators import enforce_cap
from .exceptions.database import KeyMismatchError, MissingEntryError, PersistenceError
from .exceptions.model import DimensionMismatchError
from .grid_propagator import idft, propagate_amplitudes
from .logger import get_logger
from .schemas.grid import Grid, GridWaveFunction, PotentialField, Representation
from .schemas.propagator import PropagatorKey, PropagatorMatrix, PropagatorSummary

config = get_settings()
logger = get_logger("database")

SUFFIX = ".npz"


class PropagatorDatabase:
    """Store of propagator matrices keyed by ``PropagatorKey``.

    An in-memory LRU sits in front of an optional directory holding one file per
    key, named by the key digest. Builds of the same key are serialized.
    """

    def __init__(
        self,
        path: Optional[Union[Path, str]] = config.DB_PATH,
        memory_entries: int = config.DB_MEMORY_ENTRIES,
    ) -> None:
        self.path = Path(path) if path is not None else None
        self.builds = 0
        self._memory: LRUCache = LRUCache(maxsize=memory_entries)
        self._lock = Lock()
        self._key_locks: dict[str, Lock] = {}

        if self.path is not None:
            try:
                self.path.mkdir(parents=True, exist_ok=True)
            except OSError as _ex:
                raise PersistenceError(
                    path=str(self.path),
                    msg=f"Cannot create database directory {self.path}: {_ex}",
                ) from _ex

    def __contains__(self, key: PropagatorKey) -> bool:
        with self._lock:
            if key.digest in self._memory:
                return True
        _file = self.file_for(key)
        return _file is not None and _file.exists()

    def file_for(self, key: PropagatorKey) -> Optional[Path]:
        if self.path is None:
            return None
        return self.path / f"{key.digest}{SUFFIX}"

    def key_lock(self, key: PropagatorKey) -> Lock:
        with self._lock:
            return self._key_locks.setdefault(key.digest, Lock())

    def get(self, key: PropagatorKey) -> Optional[PropagatorMatrix]:
        """Fetch a stored propagator, loading it from disk if needed."""
        with self._lock:
            _entry = self._memory.get(key.digest)
        if _entry is not None:
            logger.debug(f"Propagator {key.digest[:12]} found in memory")
            return _entry

        _file = self.file_for(key)
        if _file is None or not _file.exists():
            return None
        _entry = self._load(key, _file)
        with self._lock:
            self._memory[key.digest] = _entry
        return _entry

    def insert(self, entry: PropagatorMatrix, built: bool = False) -> None:
        """Persist a propagator, then publish it in memory."""
        _file = self.file_for(entry.key)
        if _file is not None:
            self._save(entry, _file)
        with self._lock:
            self._memory[entry.key.digest] = entry
            if built:
                self.builds += 1

    def keys(self) -> Iterator[PropagatorKey]:
        """Keys of every stored propagator, persisted ones first, by digest."""
        _seen: set[str] = set()
        if self.path is not None:
            for _file in sorted(self.path.glob(f"*{SUFFIX}")):
                _key = self._read_key(_file)
                _seen.add(_key.digest)
                yield _key
        with self._lock:
            _entries = list(self._memory.values())
        for _entry in sorted(_entries, key=lambda _e: _e.key.digest):
            if _entry.key.digest not in _seen:
                yield _entry.key

    def _read_key(self, file: Path) -> PropagatorKey:
        try:
            with np.load(file, allow_pickle=False) as _data:
                return PropagatorKey.model_validate(json.loads(str(_data["key"])))
        except (OSError, KeyError, ValueError) as _ex:
            raise PersistenceError(
                path=str(file), msg=f"Cannot read propagator {file}: {_ex}"
            ) from _ex

    def _load(self, key: PropagatorKey, file: Path) -> PropagatorMatrix:
        try:
            with np.load(file, allow_pickle=False) as _data:
                _stored = PropagatorKey.model_validate(json.loads(str(_data["key"])))
                _matrix = _data["matrix"]
        except (OSError, KeyError, ValueError) as _ex:
            logger.error(f"Loading {file} failed: {_ex}")
            raise PersistenceError(
                digest=key.digest,
                path=str(file),
                msg=f"Cannot read propagator {file}: {_ex}",
            ) from _ex
        if _stored != key:
            raise KeyMismatchError(
                digest=key.digest,
                msg=f"File {file} holds a propagator for a different key.",
            )
        logger.debug(f"Propagator {key.digest[:12]} loaded from {file}")
        return PropagatorMatrix(key=key, matrix=_matrix)

    def _save(self, entry: PropagatorMatrix, file: Path) -> None:
        _partial = file.with_name(f"{file.name}.partial")
        try:
            with open(_partial, "wb") as _handle:
                np.savez(
                    _handle,
                    matrix=entry.matrix,
                    key=np.array(entry.key.model_dump_json()),
                )
            os.replace(_partial, file)
        except OSError as _ex:
            logger.error(f"Persisting {file} failed: {_ex}")
            raise PersistenceError(
                digest=entry.key.digest,
                path=str(file),
                msg=f"Cannot write propagator {file}: {_ex}",
            ) from _ex
        logger.debug(f"Propagator {entry.key.digest[:12]} written to {file}")


@enforce_cap(argument="grid", setting="DB_MAX_QUBITS", measure=lambda g: g.qubits)
@validate_call
def build(key: PropagatorKey, field: PotentialField, grid: Grid) -> PropagatorMatrix:
    """Assemble M(T) by evolving every basis vector.

    Parameters
    ----------
    key : PropagatorKey
        Key of the propagator, must be derived from ``field`` and ``grid``.
    field : PotentialField
        Potential.
    grid : Grid
        Grid, at most DB_MAX_QUBITS qubits.

    Returns
    -------
    PropagatorMatrix
        Columns M[:, a] = evolve(delta_a).
    """
    field.check_grid(grid)
    if key != PropagatorKey.from_inputs(grid, field, key.dt, key.steps):
        raise KeyMismatchError(
            digest=key.digest,
            msg="Propagator key does not match the grid and potential.",
        )
    logger.debug(
        f"Building propagator {key.digest[:12]}: N={grid.points}, steps={key.steps}"
    )
    _matrix = propagate_amplitudes(
        np.eye(grid.points, dtype=np.complex128), field, key.dt, key.steps
    )
    return PropagatorMatrix(key=key, matrix=_matrix)


def lookup_or_build(
    db: PropagatorDatabase,
    key: PropagatorKey,
    field: Optional[PotentialField] = None,
    grid: Optional[Grid] = None,
    build_missing: bool = True,
) -> PropagatorMatrix:
    """Return the stored propagator of a key, building and persisting it on a miss.

    Parameters
    ----------
    db : PropagatorDatabase
        Database.
    key : PropagatorKey
        Requested key.
    field : Optional[PotentialField], optional
        Potential, required to build, by default None.
    grid : Optional[Grid], optional
        Grid, required to build, by default None.
    build_missing : bool, optional
        Build on a miss instead of raising, by default True.

    Returns
    -------
    PropagatorMatrix
        The same entry for every lookup of the key.
    """
    _entry = db.get(key)
    if _entry is not None:
        return _entry
    if not build_missing or field is None or grid is None:
        raise MissingEntryError(
            digest=key.digest,
            msg=f"No propagator stored for key {key.digest[:12]}.",
        )

    with db.key_lock(key):
        # another thread may have built it while we waited
        _entry = db.get(key)
        if _entry is not None:
            return _entry
        _entry = build(key, field, grid)
        db.insert(_entry, built=True)
    logger.info(f"Propagator {key.digest[:12]} built and stored")
    return _entry


@validate_call
def apply(entry: PropagatorMatrix, wave: GridWaveFunction) -> GridWaveFunction:
    """Evolve an initial wave function by a matrix-vector product."""
    if wave.grid.points != entry.dimension:
        raise DimensionMismatchError(
            expected=entry.dimension,
            received=wave.grid.points,
            msg=(
                f"Propagator of dimension {entry.dimension} cannot act on "
                f"{wave.grid.points} amplitudes."
            ),
        )
    _wave = wave
    if wave.representation != Representation.POSITION:
        _wave = idft(wave)
    return GridWaveFunction(grid=_wave.grid, amplitudes=entry.matrix @ _wave.amplitudes)


def inspect(db: PropagatorDatabase, key: PropagatorKey) -> PropagatorSummary:
    """Key metadata and unitarity residual of a stored propagator."""
    _entry = db.get(key)
    if _entry is None:
        raise MissingEntryError(
            digest=key.digest,
            msg=f"No propagator stored for key {key.digest[:12]}.",
        )
    return PropagatorSummary(
        key=key,
        digest=key.digest,
        dimension=_entry.dimension,
        unitarity_residual=_entry.unitarity_residual,
        path=db.file_for(key),
    )
