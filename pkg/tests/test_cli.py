import json
from pathlib import Path

import numpy as np
import pytest
from scipy import linalg

from qscenario.cli import main
from qscenario.cli.formats import format_state, format_wavefunction, read_document
from qscenario.schemas.assembly import ScenarioFile, TableFile
from qscenario.schemas.common.exit_code import ExitCodes
from qscenario.schemas.grid import Grid, GridWaveFunction
from qscenario.schemas.state import StateVector

GRID_FLAGS = ["--qubits", "5", "--potential", "harmonic:1", "--dt", "0.05"]


def _run(*argv: str, report: Path) -> int:
    return main([*argv, "--report", str(report), "--quiet"])


def _load(report: Path) -> dict:
    return json.loads(report.read_text())


def _assembly_args(command: str, files: dict) -> list:
    return [
        command, "--scenario", str(files["scenario"]), "--table", str(files["table"])
    ]


def test_sweep_of_deterministic_scenario(tmp_path, scenario_files):
    report = tmp_path / "report.json"
    args = _assembly_args("sweep", scenario_files)
    code = _run(*args, "--name", "pure", report=report)
    assert code == ExitCodes.SUCCESS.id

    body = _load(report)
    assert body["command"] == "sweep"
    assert body["results"]["volume"] == 200
    (entry,) = body["results"]["reports"]
    assert entry["scenario"] == "pure"
    assert entry["lucky_fraction"] == 1.0
    assert set(body["input_digests"]) == {"scenario", "table"}
    assert "seconds" in body["timing"]


def test_sweep_prints_summary(scenario_files, capsys):
    assert main(_assembly_args("sweep", scenario_files)) == 0
    output = capsys.readouterr().out
    assert "pure: lucky 1.0" in output
    assert "mixed: lucky 0.5" in output


def test_rerun_gives_identical_body(tmp_path, scenario_files):
    bodies = []
    for name in ("first.json", "second.json"):
        report = tmp_path / name
        assert _run(*_assembly_args("sweep", scenario_files), report=report) == 0
        body = _load(report)
        body.pop("timing")
        bodies.append(body)
    assert bodies[0] == bodies[1]


def test_compare_ranks_scenarios(tmp_path, scenario_files):
    report = tmp_path / "report.json"
    assert _run(*_assembly_args("compare", scenario_files), report=report) == 0
    results = _load(report)["results"]
    assert results["threshold"] == 0.5
    assert [_r["report"]["scenario"] for _r in results["ranking"]] == [
        "pure",
        "mixed",
    ]
    assert [_r["successful"] for _r in results["ranking"]] == [True, False]


def test_malformed_input_leaves_no_report(tmp_path, scenario_files):
    scenario_files["scenario"].write_text('{"format": "qscenario-scenario/1",')
    report = tmp_path / "report.json"
    code = _run(*_assembly_args("sweep", scenario_files), report=report)
    assert code == ExitCodes.PARSE_ERROR.id
    assert not report.exists()


def test_invalid_document_is_a_parse_error(tmp_path, scenario_files):
    scenario_files["table"].write_text(json.dumps({"format": "qscenario-table/9"}))
    report = tmp_path / "report.json"
    code = _run(*_assembly_args("sweep", scenario_files), report=report)
    assert code == ExitCodes.PARSE_ERROR.id


def test_missing_input_is_an_io_error(tmp_path, scenario_files):
    scenario_files["table"].unlink()
    report = tmp_path / "report.json"
    code = _run(*_assembly_args("sweep", scenario_files), report=report)
    assert code == ExitCodes.IO_ERROR.id
    assert not report.exists()


def test_scenario_length_limit(tmp_path, scenario_files):
    report = tmp_path / "report.json"
    args = _assembly_args("sweep", scenario_files)
    assert _run(*args, "--max-steps", "2", report=report) == ExitCodes.CAP_EXCEEDED.id
    assert _run(*args, "--max-steps", "99", report=report) == ExitCodes.CAP_EXCEEDED.id
    assert not report.exists()


def test_unknown_scenario_name_is_a_usage_error(tmp_path, scenario_files):
    report = tmp_path / "report.json"
    args = _assembly_args("sweep", scenario_files)
    assert _run(*args, "--name", "absent", report=report) == ExitCodes.USAGE_ERROR.id


def test_evolve_zero_steps_reproduces_input(tmp_path):
    source = tmp_path / "initial.wf"
    source.write_text(
        format_wavefunction(GridWaveFunction.gaussian(Grid(qubits=5), momentum=1.0))
    )
    output = tmp_path / "final.wf"
    code = _run(
        "evolve",
        "--state",
        str(source),
        *GRID_FLAGS,
        "--steps",
        "0",
        "--output",
        str(output),
        report=tmp_path / "report.json",
    )
    assert code == 0
    assert output.read_text() == source.read_text()


def test_evolve_free_packet_keeps_norm(tmp_path):
    report = tmp_path / "report.json"
    code = _run(
        "evolve",
        "--qubits",
        "6",
        "--state",
        "gaussian:0:1:1",
        "--dt",
        "0.05",
        "--steps",
        "20",
        "--trace-every",
        "5",
        "--classical",
        report=report,
    )
    assert code == 0
    results = _load(report)["results"]
    assert [_p["step"] for _p in results["trace"]] == [0, 5, 10, 15, 20]
    assert all(abs(_p["norm"] - 1.0) < 1e-12 for _p in results["trace"])
    assert results["final"]["time"] == pytest.approx(1.0)
    assert len(results["classical"]) == 5
    assert results["max_classical_deviation"] < 0.1


def test_evolve_tag_needs_grid_size(tmp_path):
    code = _run(
        "evolve",
        "--state",
        "delta:3",
        "--dt",
        "0.1",
        "--steps",
        "1",
        report=tmp_path / "report.json",
    )
    assert code == ExitCodes.PARSE_ERROR.id


def test_grid_cap(tmp_path):
    code = _run(
        "evolve",
        "--qubits",
        "30",
        "--state",
        "delta:0",
        "--dt",
        "0.1",
        "--steps",
        "1",
        report=tmp_path / "report.json",
    )
    assert code == ExitCodes.CAP_EXCEEDED.id


def test_propagator_database_commands(tmp_path):
    db = str(tmp_path / "db")
    built = tmp_path / "built.json"
    code = _run("db-build", "--db", db, *GRID_FLAGS, "--steps", "10", report=built)
    assert code == 0
    entry = _load(built)["results"]["entry"]
    assert entry["dimension"] == 32
    assert entry["unitarity_residual"] < 1e-9

    applied = tmp_path / "applied.json"
    code = _run(
        "db-apply",
        "--db",
        db,
        "--state",
        "gaussian:1:0:1",
        *GRID_FLAGS,
        "--steps",
        "10",
        "--no-build",
        "--verify",
        report=applied,
    )
    assert code == 0
    results = _load(applied)["results"]
    assert results["digest"] == entry["digest"]
    assert results["max_deviation"] < 1e-12

    inspected = tmp_path / "inspected.json"
    assert _run("db-inspect", "--db", db, report=inspected) == 0
    assert [_e["digest"] for _e in _load(inspected)["results"]["entries"]] == [
        entry["digest"]
    ]

    rebuilt = tmp_path / "rebuilt.json"
    code = _run("db-build", "--db", db, *GRID_FLAGS, "--steps", "10", report=rebuilt)
    assert code == 0
    assert _load(rebuilt)["results"] == _load(built)["results"]


def test_db_apply_without_entry(tmp_path):
    code = _run(
        "db-apply",
        "--db",
        str(tmp_path / "db"),
        "--state",
        "delta:0",
        *GRID_FLAGS,
        "--steps",
        "3",
        "--no-build",
        report=tmp_path / "report.json",
    )
    assert code == ExitCodes.MISSING_ENTRY.id


def test_db_needs_a_path(tmp_path):
    code = _run("db-build", *GRID_FLAGS, "--steps", "1", report=tmp_path / "r.json")
    assert code == ExitCodes.USAGE_ERROR.id


def test_missing_required_flag():
    assert main(["evolve", "--state", "delta:0"]) == 2


def test_measure_state_file(tmp_path):
    state = tmp_path / "state.txt"
    state.write_text(
        format_state(StateVector.from_probabilities([0.5, 0.5]), volume=10)
    )
    report = tmp_path / "report.json"
    assert _run("measure", "--state", str(state), "--option", "6", report=report) == 0
    results = _load(report)["results"]
    assert results["volume"] == 10
    assert results["thresholds"] == [5, 10]
    assert results["frequencies"] == pytest.approx([0.5, 0.5])
    assert results["outcome"] == 1


def test_photon_generation(tmp_path, scenario_files):
    output = tmp_path / "photon.json"
    report = tmp_path / "report.json"
    code = _run(
        "photon-gen",
        "--table",
        str(scenario_files["table"]),
        "--base",
        str(scenario_files["scenario"]),
        "--pulses",
        "AAB",
        "--bias",
        "2",
        "--output",
        str(output),
        report=report,
    )
    assert code == 0
    results = _load(report)["results"]
    assert results["complement"] == "BBA"
    assert results["ratio"] == pytest.approx(8.0)
    generated = read_document(output, ScenarioFile)
    assert [_s.name for _s in generated.scenarios] == ["photon"]

    swept = tmp_path / "swept.json"
    args = ["sweep", "--scenario", str(output), "--table", str(scenario_files["table"])]
    assert _run(*args, "--volume", "1000", report=swept) == 0
    (entry,) = _load(swept)["results"]["reports"]
    assert entry["impossible_fraction"] == 0.0


def test_golden_rule_writes_table(tmp_path):
    channels = tmp_path / "channels.json"
    channels.write_text(
        json.dumps(
            {
                "format": "qscenario-channels/1",
                "context": {
                    "bond": "covalent",
                    "coding": "A",
                    "growing": "B",
                    "element": "A",
                    "state": "ground",
                },
                "channels": [
                    {
                        "outcome": {
                            "kind": "admitted",
                            "attachment": {
                                "element": "A",
                                "bond_to_coding": "covalent",
                            },
                        },
                        "matrix_element": 1.0,
                        "density": 1.0,
                    },
                    {
                        "outcome": {"kind": "non_admitted", "label": "lost"},
                        "matrix_element": [0.0, 2.0],
                        "density": 1.0,
                    },
                ],
            }
        )
    )
    output = tmp_path / "table.json"
    report = tmp_path / "report.json"
    code = _run(
        "golden-rule",
        "--channels",
        str(channels),
        "--output",
        str(output),
        report=report,
    )
    assert code == 0
    weights = [_w["weight"] for _w in _load(report)["results"]["weights"]]
    assert weights == pytest.approx([2 * np.pi, 8 * np.pi])

    (entry,) = read_document(output, TableFile).build().entries
    assert list(entry.distribution.weights) == pytest.approx([0.2, 0.8])


def test_ls_solve(tmp_path):
    hamiltonian = [[0.0, 0.3], [0.3, 1.0]]
    interaction = [[0.1, 0.0], [0.0, -0.1]]
    problem = tmp_path / "problem.json"
    problem.write_text(
        json.dumps(
            {
                "format": "qscenario-ls/1",
                "hamiltonian": hamiltonian,
                "interaction": interaction,
                "free_state": [1.0, 0.0],
                "energy": 0.5,
                "eta": 0.5,
            }
        )
    )
    report = tmp_path / "report.json"
    assert _run("ls-solve", "--problem", str(problem), report=report) == 0
    results = _load(report)["results"]

    green = linalg.inv((0.5 + 0.5j) * np.eye(2) - np.array(hamiltonian))
    direct = linalg.solve(np.eye(2) - green @ np.array(interaction), [1.0, 0.0])
    state = np.array([complex(*_pair) for _pair in results["state"]])
    np.testing.assert_allclose(state, direct, atol=1e-10)
    assert results["spectral_radius"] < 1.0


def test_exit_code_registry():
    assert [_code.id for _code in ExitCodes] == list(range(9))
    assert ExitCodes[5] is ExitCodes.CAP_EXCEEDED
    assert ExitCodes["IO_ERROR"].id == 8
    assert int(ExitCodes.PARSE_ERROR) == 3
    with pytest.raises(KeyError):
        ExitCodes[42]


def test_help_lists_exit_codes(capsys):
    assert main(["--help"]) == 0
    output = capsys.readouterr().out
    for code in ExitCodes:
        assert f"{code.id}  {code.name}" in output
