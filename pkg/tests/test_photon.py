from itertools import product

import pytest
from pydantic import ValidationError

from qscenario.assembly import complement, evaluate_scenario, photon_scenario
from qscenario.assembly.photon import pulse_pair
from qscenario.exceptions.assembly import InvalidPulseError
from qscenario.schemas.assembly import Chain, ScatteringTable

VOLUME = 1000
PULSES = "AAB"
BIAS = 2.0


def _chain_probability(letters: str) -> float:
    _probability = 1.0
    for _letter, _pulse in zip(letters, PULSES):
        _probability *= BIAS / (BIAS + 1) if _letter == _pulse else 1 / (BIAS + 1)
    return _probability


def test_pulse_weights(sticky_table):
    scenario = photon_scenario(PULSES, BIAS, sticky_table, name="pulsed")
    assert scenario.name == "pulsed"
    assert len(scenario.steps) == len(PULSES)
    for step, pulse in zip(scenario.steps, PULSES):
        weights = {_e.element: _e.weight for _e in step.entries}
        assert weights[pulse] == pytest.approx(2 / 3)
        assert sum(weights.values()) == pytest.approx(1.0)


def test_chain_frequencies_follow_pulse_bias(initial, sticky_table):
    scenario = photon_scenario(PULSES, BIAS, sticky_table)
    report = evaluate_scenario(
        scenario, Chain.model_validate("B" + PULSES), initial, sticky_table, VOLUME
    )
    assert report.impossible_fraction == 0.0
    for letters in map("".join, product("AB", repeat=len(PULSES))):
        assert abs(report.fraction("B" + letters) - _chain_probability(letters)) <= (
            2 * len(PULSES) / VOLUME
        )

    target = report.fraction("B" + PULSES)
    swapped = report.fraction("B" + complement(PULSES, ("A", "B")))
    assert _chain_probability(PULSES) / _chain_probability("BBA") == pytest.approx(
        BIAS ** len(PULSES)
    )
    assert target / swapped == pytest.approx(BIAS ** len(PULSES), rel=0.1)


def test_unit_bias_is_uniform(initial, sticky_table):
    report = evaluate_scenario(
        photon_scenario("AB", 1.0, sticky_table),
        Chain.model_validate("BAB"),
        initial,
        sticky_table,
        volume=400,
    )
    assert {_e.label: _e.count for _e in report.histogram} == {
        "BAA": 100,
        "BAB": 100,
        "BBA": 100,
        "BBB": 100,
    }


def test_complement():
    assert complement("AAB", ("A", "B")) == "BBA"
    assert complement("", ("A", "B")) == ""
    with pytest.raises(InvalidPulseError):
        complement("AC", ("A", "B"))


def test_pulse_pair(sticky_table, lossy_table):
    assert pulse_pair(sticky_table) == (("A", "ground"), ("B", "ground"))
    assert pulse_pair(lossy_table) == (("A", "ground"), ("B", "ground"))
    with pytest.raises(InvalidPulseError):
        pulse_pair(ScatteringTable(entries=sticky_table.entries[:1]))


def test_invalid_pulses(sticky_table):
    with pytest.raises(InvalidPulseError):
        photon_scenario("AC", BIAS, sticky_table)
    with pytest.raises(ValidationError):
        photon_scenario("AB", 0.5, sticky_table)
    with pytest.raises(ValidationError):
        photon_scenario("", BIAS, sticky_table)
