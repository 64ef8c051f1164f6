"""Photon-biased scenarios over a two-element alphabet.

A pulse favouring one element raises its reservoir weight to l / (l + 1), so a
pulse sequence makes the chain it spells l^n times more likely than the chain
with every letter swapped.
"""

from typing import Annotated

from pydantic import Field, validate_call

from ..exceptions.assembly import InvalidPulseError
from ..logger import get_logger
from ..schemas.assembly import ReservoirEntry, ReservoirSpec, ScatteringTable, Scenario

logger = get_logger("photon")


def pulse_pair(table: ScatteringTable) -> tuple[tuple[str, str], tuple[str, str]]:
    """The two incoming (element, state) pairs of a photon table, sorted by element.

    Each element contributes its first state in sorted order.
    """
    _states: dict[str, str] = {}
    for _element, _state in table.elements:
        _states.setdefault(_element, _state)
    if len(_states) != 2:
        raise InvalidPulseError(
            msg=(
                f"Photon scenarios need exactly two incoming elements, "
                f"the table has {len(_states)}."
            )
        )
    _first, _second = sorted(_states)
    return (_first, _states[_first]), (_second, _states[_second])


def complement(letters: str, pair: tuple[str, str]) -> str:
    """Swap the two letters of a pair throughout a chain."""
    _swap = {pair[0]: pair[1], pair[1]: pair[0]}
    for _letter in letters:
        if _letter not in _swap:
            raise InvalidPulseError(
                pulse=_letter, msg=f"Letter {_letter!r} is not in {pair}."
            )
    return "".join(_swap[_letter] for _letter in letters)


@validate_call
def photon_scenario(
    pulses: Annotated[str, Field(min_length=1)],
    bias: Annotated[float, Field(ge=1.0)],
    table: ScatteringTable,
    name: str = "photon",
) -> Scenario:
    """Scenario with one biased reservoir per pulse.

    Parameters
    ----------
    pulses : str
        Pulsed element per step, e.g. "AAB".
    bias : float
        Weight ratio l >= 1 between the pulsed and the other element.
    table : ScatteringTable
        Table whose incoming elements form the two-element alphabet.
    name : str, optional
        Scenario name, by default "photon".

    Returns
    -------
    Scenario
        Reservoir weights (l / (l + 1), 1 / (l + 1)) in favour of each pulse.
    """
    _pair = pulse_pair(table)
    _elements = tuple(_element for _element, _ in _pair)
    _favoured = bias / (bias + 1.0)
    _other = 1.0 / (bias + 1.0)

    _steps = []
    for _pulse in pulses:
        if _pulse not in _elements:
            raise InvalidPulseError(
                pulse=_pulse,
                msg=f"Pulse {_pulse!r} is neither {_elements[0]} nor {_elements[1]}.",
            )
        _steps.append(
            ReservoirSpec(
                entries=tuple(
                    ReservoirEntry(
                        element=_element,
                        state=_state,
                        weight=_favoured if _element == _pulse else _other,
                    )
                    for _element, _state in _pair
                )
            )
        )
    logger.debug(f"Photon scenario {pulses!r} with bias {bias!r}")
    return Scenario(name=name, steps=tuple(_steps))
