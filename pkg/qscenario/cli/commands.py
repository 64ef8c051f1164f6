"""Command implementations.

Each command is a function of its ``RunConfig`` alone. It reads its inputs,
runs the simulation and returns a ``CommandOutput``; nothing is written until
the command has returned.
"""

from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from ..assembly import (
    ScatterCache,
    channel_distribution,
    compare_scenarios,
    complement,
    evaluate_scenario,
    golden_rule_prob,
    lippmann_schwinger_solve,
    photon_scenario,
)
from ..assembly.photon import pulse_pair
from ..config import get_settings
from ..exceptions.cli import UsageError
from ..exceptions.model import CapExceededError
from ..grid_propagator import (
    classical_trajectory,
    evolve,
    expectation,
    propagate_amplitudes,
)
from ..logger import get_logger
from ..option_model import measure, phi, sweep_statistics
from ..propagator_db import PropagatorDatabase, apply, inspect, lookup_or_build
from ..schemas.assembly import (
    ChannelFile,
    LippmannSchwingerFile,
    ScatteringTable,
    Scenario,
    ScenarioFile,
    TableEntry,
    TableFile,
)
from ..schemas.grid import Grid, GridWaveFunction, Observable, PotentialField
from ..schemas.propagator import PropagatorKey
from ..schemas.reports import CommandOutput, RunConfig
from ..schemas.state import DeterministicModel, OptionValue
from .formats import (
    digest_file,
    digest_text,
    dump_document,
    format_wavefunction,
    load_potential,
    load_wavefunction,
    read_document,
    read_state,
)

config = get_settings()
logger = get_logger("cli")

DEFAULT_THRESHOLD = 0.5


def _digests(run: RunConfig) -> dict[str, str]:
    return {
        _role: digest_file(_source)
        for _role, _source in run.inputs.items()
        if Path(_source).is_file()
    }


def _require(run: RunConfig, name: str, flag: str) -> Any:
    _value = run.inputs.get(name) if name in ("state", "potential") else None
    if _value is None:
        _value = getattr(run, name, None)
    if _value is None:
        raise UsageError(option=flag, msg=f"{run.command} requires {flag}.")
    return _value


def _wave_point(wave: GridWaveFunction, step: int, dt: float) -> dict[str, Any]:
    return {
        "step": step,
        "time": step * dt if step else 0.0,
        "norm": wave.norm,
        "position": expectation(wave, Observable.POSITION),
        "momentum": expectation(wave, Observable.MOMENTUM),
    }


def _grid_summary(grid: Grid) -> dict[str, Any]:
    return {
        "qubits": grid.qubits,
        "points": grid.points,
        "spacing": grid.spacing,
        "half_range": grid.half_range,
    }


# assembly


def _assembly_inputs(
    run: RunConfig,
) -> tuple[ScenarioFile, ScatteringTable, tuple[Scenario, ...], int]:
    _file = read_document(run.inputs["scenario"], ScenarioFile)
    _table = read_document(run.inputs["table"], TableFile).build()
    _scenarios = _file.scenarios
    if run.name is not None:
        _scenarios = tuple(_s for _s in _scenarios if _s.name == run.name)
        if not _scenarios:
            raise UsageError(option="--name", msg=f"No scenario named {run.name!r}.")
    if run.max_steps is not None:
        for _scenario in _scenarios:
            if len(_scenario.steps) > run.max_steps:
                raise CapExceededError(
                    value=len(_scenario.steps),
                    cap=run.max_steps,
                    msg=(
                        f"Scenario {_scenario.name!r} has {len(_scenario.steps)} "
                        f"steps, the limit is {run.max_steps}."
                    ),
                )
    _volume = run.volume or _file.volume or config.SIM_OPTION_VOLUME
    logger.debug(
        f"{len(_scenarios)} scenario(s), {len(_table)} table entries, L={_volume}"
    )
    return _file, _table, _scenarios, _volume


def _sweep_options(run: RunConfig, volume: int) -> dict[str, Any]:
    return {
        "volume": volume,
        "cache": ScatterCache(),
        "workers": run.workers or config.SWEEP_WORKERS,
        "mode": run.mode or config.ASSEMBLY_OPTION_MODE,
        "compare_coordinates": (
            run.compare_coordinates or config.ASSEMBLY_COMPARE_COORDINATES
        ),
        "max_outcomes": run.max_outcomes or config.ASSEMBLY_MAX_OUTCOMES,
    }


def cmd_sweep(run: RunConfig) -> CommandOutput:
    """Sweep every option value over each scenario of a scenario file."""
    _file, _table, _scenarios, _volume = _assembly_inputs(run)
    _options = _sweep_options(run, _volume)
    _initial = _file.initial.build()
    _reports = [
        evaluate_scenario(_scenario, _file.sample, _initial, _table, **_options)
        for _scenario in _scenarios
    ]
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={
            "volume": _volume,
            "mode": _options["mode"],
            "reports": [_report.model_dump(mode="json") for _report in _reports],
        },
    )


def cmd_compare(run: RunConfig) -> CommandOutput:
    """Rank the scenarios of a scenario file by lucky fraction."""
    _file, _table, _scenarios, _volume = _assembly_inputs(run)
    _options = _sweep_options(run, _volume)
    _threshold = run.threshold
    if _threshold is None:
        _threshold = (
            _file.threshold if _file.threshold is not None else DEFAULT_THRESHOLD
        )
    _ranking = compare_scenarios(
        _scenarios,
        _file.sample,
        _file.initial.build(),
        _table,
        threshold=_threshold,
        **_options,
    )
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={
            "volume": _volume,
            "mode": _options["mode"],
            "threshold": _threshold,
            "ranking": [_entry.model_dump(mode="json") for _entry in _ranking],
        },
    )


def cmd_photon_gen(run: RunConfig) -> CommandOutput:
    """Generate a photon-biased scenario and write it into a scenario file."""
    _pulses = _require(run, "pulses", "--pulses")
    _bias = _require(run, "bias", "--bias")
    _table = read_document(run.inputs["table"], TableFile).build()
    _base = read_document(run.inputs["base"], ScenarioFile)
    _scenario = photon_scenario(_pulses, _bias, _table, name=run.name or "photon")
    _pair = tuple(_element for _element, _ in pulse_pair(_table))
    _file = ScenarioFile(
        format=_base.format,
        alphabet=_base.alphabet,
        initial=_base.initial,
        sample=_base.sample,
        scenarios=(_scenario,),
        volume=_base.volume,
        threshold=_base.threshold,
    )
    _favoured = _bias / (_bias + 1.0)
    _text = dump_document(_file)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={
            "scenario": _scenario.model_dump(mode="json"),
            "pair": list(_pair),
            "complement": complement(_pulses, _pair),
            "target_probability": _favoured ** len(_pulses),
            "complement_probability": (1.0 - _favoured) ** len(_pulses),
            "ratio": _bias ** len(_pulses),
            "output_digest": digest_text(_text),
        },
        artifacts={run.output: _text} if run.output else {},
    )


def cmd_golden_rule(run: RunConfig) -> CommandOutput:
    """Golden-rule weights of listed channels, optionally written as a table."""
    _file = read_document(run.inputs["channels"], ChannelFile)
    _weights = [
        {
            "outcome": str(_channel.outcome),
            "weight": golden_rule_prob(
                _channel.matrix_element, _channel.density, _file.hbar
            ),
        }
        for _channel in _file.channels
    ]
    _distribution = channel_distribution(_file.channels, _file.hbar)
    _artifacts = {}
    if run.output:
        if _file.context is None:
            raise UsageError(
                option="--output",
                msg="Writing a table needs a reaction context in the channel file.",
            )
        _table = TableFile(
            format="qscenario-table/1",
            entries=(TableEntry(context=_file.context, distribution=_distribution),),
        )
        _artifacts[run.output] = dump_document(_table)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={
            "weights": _weights,
            "distribution": _distribution.model_dump(mode="json"),
        },
        artifacts=_artifacts,
    )


def cmd_ls_solve(run: RunConfig) -> CommandOutput:
    """Scattering state of a small system by sequential approximation."""
    _problem = read_document(run.inputs["problem"], LippmannSchwingerFile)
    _solution = lippmann_schwinger_solve(
        np.array(_problem.hamiltonian, dtype=np.complex128),
        np.array(_problem.interaction, dtype=np.complex128),
        np.array(_problem.free_state, dtype=np.complex128),
        _problem.energy,
        _problem.eta,
        tolerance=_problem.tolerance or config.LS_TOLERANCE,
        max_iter=_problem.max_iter,
    )
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results=_solution.model_dump(mode="json"),
    )


def cmd_measure(run: RunConfig) -> CommandOutput:
    """Option assignment of a state vector, and its outcome under one option."""
    _state, _header_volume = read_state(run.inputs["state"])
    _volume = run.volume or _header_volume or config.SIM_OPTION_VOLUME
    _model = DeterministicModel(dimension=_state.dimension, volume=_volume)
    _results: dict[str, Any] = {
        "dimension": _state.dimension,
        "volume": _volume,
        "probabilities": _state.probabilities.tolist(),
        "thresholds": list(phi(_model, _state).thresholds),
        "frequencies": sweep_statistics(_model, _state).tolist(),
    }
    if run.option is not None:
        _results["option"] = run.option
        _results["outcome"] = measure(_model, _state, OptionValue(k=run.option))
    return CommandOutput(config=run, input_digests=_digests(run), results=_results)


# grid


def _optional_grid(run: RunConfig) -> Optional[Grid]:
    return Grid(qubits=run.qubits) if run.qubits is not None else None


def _potential(run: RunConfig, grid: Grid) -> PotentialField:
    return load_potential(
        run.inputs.get("potential", "free"), grid, mass=run.mass or config.SIM_MASS
    )


def cmd_evolve(run: RunConfig) -> CommandOutput:
    """Evolve an initial wave function, tracing the norm and the expectations."""
    _dt = _require(run, "dt", "--dt")
    _steps = _require(run, "steps", "--steps")
    _wave = load_wavefunction(_require(run, "state", "--state"), _optional_grid(run))
    _field = _potential(run, _wave.grid)

    _trace = [_wave_point(_wave, 0, _dt)]
    if run.trace_every:
        _amplitudes = _wave.amplitudes
        _done = 0
        while _done < _steps:
            _chunk = min(run.trace_every, _steps - _done)
            _amplitudes = propagate_amplitudes(
                _amplitudes, _field, _dt, _chunk, start=_done
            )
            _done += _chunk
            _trace.append(
                _wave_point(
                    GridWaveFunction(grid=_wave.grid, amplitudes=_amplitudes),
                    _done,
                    _dt,
                )
            )
        _final = (
            GridWaveFunction(grid=_wave.grid, amplitudes=_amplitudes)
            if _steps
            else _wave
        )
    else:
        _final = evolve(_wave, _field, _dt, _steps)
        _trace.append(_wave_point(_final, _steps, _dt))

    _results: dict[str, Any] = {
        "grid": _grid_summary(_wave.grid),
        "final": _trace[-1],
        "trace": _trace if run.trace_every else [],
    }
    if run.classical:
        _path = classical_trajectory(
            _wave.grid,
            _trace[0]["position"],
            _trace[0]["momentum"],
            _field,
            _dt,
            _steps,
        )
        _points = [_path[_point["step"]] for _point in _trace]
        _results["classical"] = [_p.model_dump(mode="json") for _p in _points]
        _results["max_classical_deviation"] = max(
            abs(_point["position"] - _p.position) for _point, _p in zip(_trace, _points)
        )

    _artifacts = {}
    if run.output:
        _text = format_wavefunction(_final, _steps, _steps * _dt if _steps else 0.0)
        _artifacts[run.output] = _text
        _results["output_digest"] = digest_text(_text)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results=_results,
        artifacts=_artifacts,
    )


# database


def _database(run: RunConfig) -> PropagatorDatabase:
    _path = run.db or config.DB_PATH
    if _path is None:
        raise UsageError(
            option="--db", msg=f"{run.command} needs --db or QS_DB_PATH to be set."
        )
    return PropagatorDatabase(path=_path)


def _propagator_key(run: RunConfig, grid: Grid, field: PotentialField) -> PropagatorKey:
    return PropagatorKey.from_inputs(
        grid,
        field,
        _require(run, "dt", "--dt"),
        _require(run, "steps", "--steps"),
    )


def cmd_db_build(run: RunConfig) -> CommandOutput:
    """Build and persist the propagator of a potential, time step and horizon."""
    _db = _database(run)
    _grid = Grid(qubits=_require(run, "qubits", "--qubits"))
    _field = _potential(run, _grid)
    _key = _propagator_key(run, _grid, _field)
    lookup_or_build(_db, _key, _field, _grid)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={"entry": inspect(_db, _key).model_dump(mode="json")},
    )


def cmd_db_apply(run: RunConfig) -> CommandOutput:
    """Evolve an initial wave function with a stored propagator."""
    _db = _database(run)
    _wave = load_wavefunction(_require(run, "state", "--state"), _optional_grid(run))
    _field = _potential(run, _wave.grid)
    _key = _propagator_key(run, _wave.grid, _field)
    _entry = lookup_or_build(
        _db, _key, _field, _wave.grid, build_missing=run.build_missing
    )
    _final = apply(_entry, _wave)

    _results: dict[str, Any] = {
        "digest": _key.digest,
        "final": _wave_point(_final, _key.steps, _key.dt),
    }
    if run.verify:
        _direct = evolve(_wave, _field, _key.dt, _key.steps)
        _results["max_deviation"] = float(
            np.max(np.abs(_final.amplitudes - _direct.amplitudes))
        )

    _artifacts = {}
    if run.output:
        _time = _key.steps * _key.dt if _key.steps else 0.0
        _text = format_wavefunction(_final, _key.steps, _time)
        _artifacts[run.output] = _text
        _results["output_digest"] = digest_text(_text)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results=_results,
        artifacts=_artifacts,
    )


def cmd_db_inspect(run: RunConfig) -> CommandOutput:
    """Key metadata and unitarity residual of one stored propagator, or of all."""
    _db = _database(run)
    if "potential" in run.inputs:
        _grid = Grid(qubits=_require(run, "qubits", "--qubits"))
        _keys = [_propagator_key(run, _grid, _potential(run, _grid))]
    else:
        _keys = sorted(_db.keys(), key=lambda _k: _k.digest)
    return CommandOutput(
        config=run,
        input_digests=_digests(run),
        results={
            "entries": [inspect(_db, _k).model_dump(mode="json") for _k in _keys]
        },
    )


COMMANDS: dict[str, Callable[[RunConfig], CommandOutput]] = {
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "evolve": cmd_evolve,
    "db-build": cmd_db_build,
    "db-apply": cmd_db_apply,
    "db-inspect": cmd_db_inspect,
    "photon-gen": cmd_photon_gen,
    "ls-solve": cmd_ls_solve,
    "golden-rule": cmd_golden_rule,
    "measure": cmd_measure,
}
