import time

import numpy as np

from qscenario.grid_propagator import evolve
from qscenario.propagator_db import PropagatorDatabase, apply, lookup_or_build
from qscenario.schemas.grid import Grid, GridWaveFunction, PotentialField
from qscenario.schemas.propagator import PropagatorKey

# Informational benchmark, the timings vary between machines
grid = Grid(qubits=6)
field = PotentialField.harmonic(grid, frequency=0.5)
dt, steps = 0.01, 2 * grid.points

# One initial packet per grid point
centers = np.linspace(-3.0, 3.0, grid.points)
waves = [GridWaveFunction.gaussian(grid, position=float(_c)) for _c in centers]

start = time.perf_counter()
direct = [evolve(_wave, field, dt, steps) for _wave in waves]
direct_seconds = time.perf_counter() - start

# In-memory database, build once then one matrix-vector product per state
db = PropagatorDatabase(path=None)
key = PropagatorKey.from_inputs(grid, field, dt, steps)
start = time.perf_counter()
entry = lookup_or_build(db, key, field, grid)
stored = [apply(entry, _wave) for _wave in waves]
stored_seconds = time.perf_counter() - start

deviation = max(
    float(np.max(np.abs(_a.amplitudes - _b.amplitudes)))
    for _a, _b in zip(direct, stored)
)
print(f"direct {direct_seconds:.3f} s, database {stored_seconds:.3f} s")
print(f"speedup {direct_seconds / stored_seconds:.1f}, deviation {deviation:.2e}")
