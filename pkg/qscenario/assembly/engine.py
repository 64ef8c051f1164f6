"""Scenario assembly engine.

An assembly pass scatters the reservoir of each step on the active system, selects
one outcome deterministically from the option value and, for an admitted outcome,
grows the chain by one unit.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Optional, Sequence

from pydantic import validate_call

from ..config import get_settings
from ..exceptions.assembly import (
    AssemblyError,
    NonAdmittedOutcomeError,
    UnknownReactionError,
)
from ..exceptions.model import InvalidOptionError
from ..logger import get_logger
from ..option_model import locate
from ..schemas.assembly import (
    ActiveSystem,
    AssemblyResult,
    BondDescriptor,
    Chain,
    HistogramEntry,
    Impossible,
    OptionRecord,
    Outcome,
    OutcomeDistribution,
    RankedReport,
    ReservoirSpec,
    ScatteringTable,
    Scenario,
    ScenarioReport,
)
from ..schemas.state import OptionValue
from .cache import ScatterCache

config = get_settings()
logger = get_logger("assembly")

OptionMode = Literal["residual", "fixed"]


def _site(table: ScatteringTable, active: ActiveSystem) -> tuple:
    _context = active.context("", "")
    return (table.digest, _context.bond, _context.coding, _context.growing)


@validate_call
def scatter(
    table: ScatteringTable,
    active: ActiveSystem,
    reservoir: ReservoirSpec,
    max_outcomes: Optional[int] = config.ASSEMBLY_MAX_OUTCOMES,
) -> OutcomeDistribution:
    """Mix the outcome lists of every reservoir entry by its weight.

    Parameters
    ----------
    table : ScatteringTable
        Outcome lists per reaction context.
    active : ActiveSystem
        Active system hit by the reservoir.
    reservoir : ReservoirSpec
        Weighted incoming elements.
    max_outcomes : Optional[int], optional
        Keep only this many heaviest outcomes, by default ASSEMBLY_MAX_OUTCOMES.

    Returns
    -------
    OutcomeDistribution
        Sum of p_rho times the entry distributions, equal outcomes merged.
    """
    _pairs: list[tuple[Outcome, float]] = []
    for _entry in reservoir.entries:
        _context = active.context(_entry.element, _entry.state)
        _distribution = table.get(_context)
        if _distribution is None:
            logger.error(f"No table entry for context {_context}")
            raise UnknownReactionError(
                context=str(_context),
                msg=f"Unknown reaction {_context}.",
            )
        _pairs.extend(
            (_weighted.outcome, _entry.weight * _weighted.weight)
            for _weighted in _distribution.outcomes
        )
    return OutcomeDistribution.normalized(_pairs).truncate(max_outcomes)


def select_position(
    distribution: OutcomeDistribution, position: float, volume: int
) -> tuple[Outcome, float]:
    """Select an outcome from a position in (0, L] and return the residual position."""
    _index, _residual = locate(distribution.weights, position, volume)
    return distribution.outcomes[_index].outcome, _residual


@validate_call
def select_outcome(
    distribution: OutcomeDistribution,
    option: OptionValue,
    volume: int = config.SIM_OPTION_VOLUME,
) -> Outcome:
    """Outcome j with L_{j-1} < k <= L_j for the weights of a distribution.

    Parameters
    ----------
    distribution : OutcomeDistribution
        Weighted outcomes.
    option : OptionValue
        Option value k in 1..L.
    volume : int, optional
        Option volume L, by default SIM_OPTION_VOLUME.

    Returns
    -------
    Outcome
        Selected outcome.
    """
    _check_option(option, volume)
    return select_position(distribution, float(option.k), volume)[0]


def _check_option(option: OptionValue, volume: int) -> None:
    if option.k > volume:
        raise InvalidOptionError(
            msg=f"Option value {option.k} exceeds the volume {volume}."
        )


@validate_call
def assembly_step(active: ActiveSystem, outcome: Outcome) -> ActiveSystem:
    """Grow the active system by the unit of an admitted outcome.

    The new terminal bond joins coding position s + 1 with the new growing unit.

    Parameters
    ----------
    active : ActiveSystem
        Current active system.
    outcome : Outcome
        Admitted outcome.

    Returns
    -------
    ActiveSystem
        System with one more growing unit and one more bond descriptor.
    """
    if not outcome.is_admitted:
        raise NonAdmittedOutcomeError(
            msg=f"Outcome {outcome} cannot extend the growing chain."
        )
    if active.exhausted:
        raise AssemblyError(
            msg=f"Coding chain has no unit after position {active.alignment}."
        )
    _attachment = outcome.attachment
    _growing = active.growing.extend(_attachment.unit)
    _bond = BondDescriptor(
        kind=_attachment.bond_to_coding,
        coding=active.alignment + 1,
        growing=len(_growing),
    )
    return ActiveSystem(
        coding=active.coding,
        growing=_growing,
        alignment=active.alignment + 1,
        bonds=(_bond,) + active.bonds,
    )


@validate_call(config={"arbitrary_types_allowed": True})
def run_assembly(
    scenario: Scenario,
    option: OptionValue,
    initial: ActiveSystem,
    table: ScatteringTable,
    cache: Optional[ScatterCache] = None,
    volume: int = config.SIM_OPTION_VOLUME,
    mode: OptionMode = config.ASSEMBLY_OPTION_MODE,
    max_outcomes: Optional[int] = config.ASSEMBLY_MAX_OUTCOMES,
) -> AssemblyResult:
    """Run one assembly pass under a fixed option value.

    Parameters
    ----------
    scenario : Scenario
        Reservoir per step.
    option : OptionValue
        Option value k in 1..L.
    initial : ActiveSystem
        Active system before the first step.
    table : ScatteringTable
        Outcome lists per reaction context.
    cache : Optional[ScatterCache], optional
        Scattering-result database, by default a fresh one.
    volume : int, optional
        Option volume L, by default SIM_OPTION_VOLUME.
    mode : OptionMode, optional
        "residual" passes the unused part of the option to the next selection,
        "fixed" selects every step with k itself, by default ASSEMBLY_OPTION_MODE.
    max_outcomes : Optional[int], optional
        Outcome budget per scattering, by default ASSEMBLY_MAX_OUTCOMES.

    Returns
    -------
    AssemblyResult
        Final growing chain, or the step at which assembly became impossible.
    """
    _check_option(option, volume)
    if cache is None:
        cache = ScatterCache()

    _system = initial
    _position = float(option.k)
    for _step, _reservoir in enumerate(scenario.steps):
        if _system.exhausted:
            return AssemblyResult(
                option=option.k,
                impossible=Impossible(step=_step, reason="coding chain exhausted"),
            )

        _site_key = _site(table, _system)
        _distribution: OutcomeDistribution = cache.distribution(
            _site_key + (_reservoir, max_outcomes),
            lambda: scatter(table, _system, _reservoir, max_outcomes),
        )
        _outcome, _residual = cache.selection(
            _site_key + (_reservoir, max_outcomes, _position, volume),
            lambda: select_position(_distribution, _position, volume),
        )
        if not _outcome.is_admitted:
            return AssemblyResult(
                option=option.k,
                impossible=Impossible(step=_step, reason=str(_outcome)),
            )

        _system = assembly_step(_system, _outcome)
        if mode == "residual":
            _position = _residual

    return AssemblyResult(option=option.k, chain=_system.growing)


def _label(result: AssemblyResult, compare_coordinates: bool) -> str:
    if result.chain is None or not compare_coordinates:
        return result.label
    _coordinates = ";".join(
        ",".join(repr(_c) for _c in _unit.coordinates) for _unit in result.chain.units
    )
    return f"{result.chain.letters}@{_coordinates}"


def _is_lucky(result: AssemblyResult, sample: Chain, compare_coordinates: bool) -> bool:
    if result.chain is None:
        return False
    if compare_coordinates:
        return result.chain == sample
    return result.chain.letters == sample.letters


@validate_call(config={"arbitrary_types_allowed": True})
def evaluate_scenario(
    scenario: Scenario,
    sample: Chain,
    initial: ActiveSystem,
    table: ScatteringTable,
    volume: int = config.SIM_OPTION_VOLUME,
    cache: Optional[ScatterCache] = None,
    workers: int = config.SWEEP_WORKERS,
    mode: OptionMode = config.ASSEMBLY_OPTION_MODE,
    compare_coordinates: bool = config.ASSEMBLY_COMPARE_COORDINATES,
    max_outcomes: Optional[int] = config.ASSEMBLY_MAX_OUTCOMES,
) -> ScenarioReport:
    """Sweep every option value and score the scenario against a sample chain.

    Parameters
    ----------
    scenario : Scenario
        Scenario under evaluation.
    sample : Chain
        Chain the assembly should reproduce.
    initial : ActiveSystem
        Active system before the first step.
    table : ScatteringTable
        Outcome lists per reaction context.
    volume : int, optional
        Option volume L, by default SIM_OPTION_VOLUME.
    cache : Optional[ScatterCache], optional
        Scattering-result database shared by the sweep, by default a fresh one.
    workers : int, optional
        Worker threads, by default SWEEP_WORKERS.
    mode : OptionMode, optional
        Option mode, by default ASSEMBLY_OPTION_MODE.
    compare_coordinates : bool, optional
        Compare unit coordinates as well as letters, by default
        ASSEMBLY_COMPARE_COORDINATES.
    max_outcomes : Optional[int], optional
        Outcome budget per scattering, by default ASSEMBLY_MAX_OUTCOMES.

    Returns
    -------
    ScenarioReport
        Lucky fraction, impossible fraction, histogram and per-option results.
    """
    if cache is None:
        cache = ScatterCache()

    def _run(k: int) -> AssemblyResult:
        return run_assembly(
            scenario,
            OptionValue(k=k),
            initial,
            table,
            cache=cache,
            volume=volume,
            mode=mode,
            max_outcomes=max_outcomes,
        )

    _options = range(1, volume + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as _executor:
            _results = list(_executor.map(_run, _options))
    else:
        _results = [_run(_k) for _k in _options]

    _counts: dict[str, int] = {}
    _records: list[OptionRecord] = []
    _lucky = 0
    _impossible = 0
    for _result in _results:
        _result_label = _label(_result, compare_coordinates)
        _counts[_result_label] = _counts.get(_result_label, 0) + 1
        _is_hit = _is_lucky(_result, sample, compare_coordinates)
        _lucky += _is_hit
        _impossible += not _result.success
        _records.append(
            OptionRecord(
                option=_result.option,
                result=_result_label,
                lucky=_is_hit,
                step=_result.impossible.step if _result.impossible else None,
            )
        )

    logger.debug(
        f"Scenario {scenario.name!r}: {_lucky}/{volume} lucky, "
        f"{_impossible}/{volume} impossible, {cache.computations} scatterings"
    )
    return ScenarioReport(
        scenario=scenario.name,
        sample=sample.letters,
        volume=volume,
        lucky_fraction=_lucky / volume,
        impossible_fraction=_impossible / volume,
        histogram=tuple(
            HistogramEntry(label=_l, count=_c, fraction=_c / volume)
            for _l, _c in _counts.items()
        ),
        options=tuple(_records),
    )


@validate_call(config={"arbitrary_types_allowed": True})
def compare_scenarios(
    scenarios: Sequence[Scenario],
    sample: Chain,
    initial: ActiveSystem,
    table: ScatteringTable,
    volume: int = config.SIM_OPTION_VOLUME,
    threshold: float = 0.5,
    cache: Optional[ScatterCache] = None,
    workers: int = config.SWEEP_WORKERS,
    mode: OptionMode = config.ASSEMBLY_OPTION_MODE,
    compare_coordinates: bool = config.ASSEMBLY_COMPARE_COORDINATES,
    max_outcomes: Optional[int] = config.ASSEMBLY_MAX_OUTCOMES,
) -> tuple[RankedReport, ...]:
    """Evaluate scenarios and rank them by lucky fraction.

    Ties go to the lower impossible fraction, then to the earlier scenario.
    Scenarios whose lucky fraction exceeds the threshold are flagged successful.
    """
    if not scenarios:
        raise AssemblyError(msg="No scenarios to compare.")
    if cache is None:
        cache = ScatterCache()
    _reports = [
        evaluate_scenario(
            _scenario,
            sample,
            initial,
            table,
            volume=volume,
            cache=cache,
            workers=workers,
            mode=mode,
            compare_coordinates=compare_coordinates,
            max_outcomes=max_outcomes,
        )
        for _scenario in scenarios
    ]
    _order = sorted(
        range(len(_reports)),
        key=lambda _i: (
            -_reports[_i].lucky_fraction,
            _reports[_i].impossible_fraction,
            _i,
        ),
    )
    return tuple(
        RankedReport(
            rank=_rank,
            index=_i,
            successful=_reports[_i].lucky_fraction > threshold,
            report=_reports[_i],
        )
        for _rank, _i in enumerate(_order, start=1)
    )

