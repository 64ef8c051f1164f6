from qscenario.option_model import measure, phi, sweep_statistics
from qscenario.schemas.state import DeterministicModel, StateVector

# Three basic states, option volume L = 1000
model = DeterministicModel(dimension=3, volume=1000)
state = StateVector.from_probabilities([0.5, 0.3, 0.2])

# Option bins of the state, thresholds L_0..L_{N-1}
assignment = phi(model, state)
print(assignment.thresholds)  # (500, 800, 1000)

# Measurement is a function of the option value
assert measure(model, state, 1) == 0
assert measure(model, state, 650) == 1
assert measure(model, state, 1000) == 2

# Sweeping every option value reproduces the Born probabilities
print(sweep_statistics(model, state))  # [0.5 0.3 0.2]
