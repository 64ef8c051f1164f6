from qscenario.assembly import complement, photon_scenario
from qscenario.schemas.assembly import TableFile

# Scattering table over a two-element alphabet, e.g. the output of golden-rule
with open("table.json") as file:
    table = TableFile.model_validate_json(file.read()).build()

# Pulses favouring A, A then B with bias l = 3
scenario = photon_scenario("AAB", 3.0, table)
print(scenario.model_dump_json(indent=2))

# The pulsed chain is l^3 = 27 times as likely as its complement
print(complement("AAB", ("A", "B")))  # "BBA"
