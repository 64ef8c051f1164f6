from qscenario.assembly import evaluate_scenario
from qscenario.schemas.assembly import (
    ActiveSystem,
    Attachment,
    BondKind,
    Outcome,
    OutcomeDistribution,
    ReactionContext,
    ReservoirEntry,
    ReservoirSpec,
    ScatteringTable,
    Scenario,
    TableEntry,
)

# Coding chain "AB" paired with a growing chain "B", one covalent bond
initial = ActiveSystem.aligned("AB", "B", 1, (BondKind.COVALENT,))

# A attaches with probability 0.75, otherwise it bounces off
table = ScatteringTable(
    entries=(
        TableEntry(
            context=ReactionContext(
                bond=BondKind.COVALENT,
                coding="A",
                growing="B",
                element="A",
                state="ground",
            ),
            distribution=OutcomeDistribution.normalized(
                (
                    (
                        Outcome.admitted(
                            Attachment(element="A", bond_to_coding=BondKind.HYDROGEN)
                        ),
                        0.75,
                    ),
                    (Outcome.non_admitted("bounce"), 0.25),
                )
            ),
        ),
    )
)

# One step with a pure A reservoir
scenario = Scenario(
    name="single",
    steps=(ReservoirSpec(entries=(ReservoirEntry(element="A", weight=1.0),)),),
)

report = evaluate_scenario(scenario, "BA", initial, table, volume=100)
print(report.lucky_fraction)  # 0.75
for entry in report.histogram:
    print(entry.label, entry.count)
