from .cache import ScatterCache
from .engine import (
    assembly_step,
    compare_scenarios,
    evaluate_scenario,
    run_assembly,
    scatter,
    select_outcome,
)
from .photon import complement, photon_scenario
from .scattering import (
    channel_distribution,
    golden_rule_prob,
    lippmann_schwinger_solve,
    regular_singular,
)

__all__ = (
    "ScatterCache",
    "assembly_step",
    "channel_distribution",
    "compare_scenarios",
    "complement",
    "evaluate_scenario",
    "golden_rule_prob",
    "lippmann_schwinger_solve",
    "photon_scenario",
    "regular_singular",
    "run_assembly",
    "scatter",
    "select_outcome",
)
