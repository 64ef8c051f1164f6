from qscenario.grid_propagator import classical_trajectory, evolve, expectation
from qscenario.schemas.grid import Grid, GridWaveFunction, Observable, PotentialField

# 256 grid points, dq = dp = sqrt(2 pi / 256)
grid = Grid(qubits=8)

# Gaussian packet at x0 = 2 in a harmonic well
wave = GridWaveFunction.gaussian(grid, position=2.0, momentum=0.0, width=1.0)
field = PotentialField.harmonic(grid, frequency=1.0)

# Evolve for T = 1 with dt = 0.01
final = evolve(wave, field, dt=0.01, steps=100)
print(final.norm)  # 1.0 up to rounding

# Ehrenfest, compare <X> with the classical trajectory
path = classical_trajectory(grid, 2.0, 0.0, field, dt=0.01, steps=100)
print(expectation(final, Observable.POSITION), path[-1].position)
