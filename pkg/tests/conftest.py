import json
from itertools import product
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from helpers import CODING, attach, context, reservoir, reservoir_json
from qscenario.schemas.assembly import (
    ActiveSystem,
    BondKind,
    Outcome,
    OutcomeDistribution,
    ScatteringTable,
    Scenario,
    TableEntry,
)
from qscenario.schemas.state import StateVector


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1998)


@pytest.fixture
def random_state(rng: np.random.Generator) -> Callable[[int], StateVector]:
    def _make(dimension: int) -> StateVector:
        _amplitudes = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
        return StateVector(amplitudes=_amplitudes / np.linalg.norm(_amplitudes))

    return _make


@pytest.fixture
def random_unitary(rng: np.random.Generator) -> Callable[[int], np.ndarray]:
    def _make(dimension: int) -> np.ndarray:
        _z = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(
            size=(dimension, dimension)
        )
        _q, _r = np.linalg.qr(_z)
        return _q * (np.diag(_r) / np.abs(np.diag(_r)))

    return _make


@pytest.fixture
def initial() -> ActiveSystem:
    """Coding chain of A units, growing chain "B", one covalent bond."""
    return ActiveSystem.aligned(CODING, "B", 1, (BondKind.COVALENT,))


@pytest.fixture
def sticky_table() -> ScatteringTable:
    """Every incoming A or B attaches covalently, whatever the terminal unit."""
    return ScatteringTable(
        entries=tuple(
            TableEntry(
                context=context(_growing, _element),
                distribution=OutcomeDistribution.point(attach(_element)),
            )
            for _growing, _element in product("AB", "AB")
        )
    )


@pytest.fixture
def lossy_table() -> ScatteringTable:
    """A attaches covalently or by a hydrogen bond, or is lost; B always attaches."""
    _entries = []
    for _bond, _growing in product(BondKind, "AB"):
        _entries.append(
            TableEntry(
                context=context(_growing, "A", _bond),
                distribution=OutcomeDistribution.normalized(
                    (
                        (attach("A"), 0.5),
                        (attach("A", BondKind.HYDROGEN), 0.3),
                        (Outcome.non_admitted("lost"), 0.2),
                    )
                ),
            )
        )
        _entries.append(
            TableEntry(
                context=context(_growing, "B", _bond),
                distribution=OutcomeDistribution.point(attach("B")),
            )
        )
    return ScatteringTable(entries=tuple(_entries))


@pytest.fixture
def pure_scenario() -> Scenario:
    return Scenario(
        name="pure",
        steps=(reservoir(A=1.0), reservoir(B=1.0), reservoir(A=1.0)),
    )


@pytest.fixture
def scenario_files(tmp_path: Path, sticky_table: ScatteringTable) -> dict[str, Path]:
    """Scenario and table JSON files of a deterministic and a mixed scenario."""
    _scenario = {
        "format": "qscenario-scenario/1",
        "alphabet": "AB",
        "initial": {
            "coding": CODING,
            "growing": "B",
            "alignment": 1,
            "bonds": ["covalent"],
        },
        "sample": "BABA",
        "volume": 200,
        "scenarios": [
            {
                "name": "mixed",
                "steps": [
                    reservoir_json(A=0.5, B=0.5),
                    reservoir_json(B=1.0),
                    reservoir_json(A=1.0),
                ],
            },
            {
                "name": "pure",
                "steps": [
                    reservoir_json(A=1.0),
                    reservoir_json(B=1.0),
                    reservoir_json(A=1.0),
                ],
            },
        ],
    }
    _table = {
        "format": "qscenario-table/1",
        "entries": [
            _entry.model_dump(mode="json") for _entry in sticky_table.entries
        ],
    }
    _files = {"scenario": tmp_path / "scenario.json", "table": tmp_path / "table.json"}
    _files["scenario"].write_text(json.dumps(_scenario, indent=2))
    _files["table"].write_text(json.dumps(_table, indent=2))
    return _files
