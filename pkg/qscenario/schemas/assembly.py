import hashlib
from enum import Enum
from typing import Any, Iterable, Literal, Optional, Sequence

import numpy as np
from pydantic import Field, PrivateAttr, field_validator, model_validator
from typing_extensions import Self

from ..config import get_settings
from ..exceptions.model import CapExceededError
from ..types import ComplexScalar, ComplexVector
from .common.base import ArrayModel, FrozenModel

config = get_settings()

IMPOSSIBLE = "impossible"


class BondKind(str, Enum):
    """Bond Kind"""

    COVALENT = "covalent"
    HYDROGEN = "hydrogen"


class OutcomeKind(str, Enum):
    """Scattering Outcome Kind"""

    ADMITTED = "admitted"
    NON_ADMITTED = "non_admitted"


class Letter(FrozenModel):
    """Alphabet Letter Model"""

    symbol: str = Field(title="Symbol", min_length=1)
    assembly: bool = Field(
        title="Assembly Element",
        description="Whether the letter may be delivered by the reservoir.",
        default=True,
    )
    description: Optional[str] = Field(title="Description", default=None)


class Alphabet(FrozenModel):
    """Alphabet Model

    Letters of the chains, the assembly subset being the letters flagged for
    delivery by the reservoir.
    """

    letters: tuple[Letter, ...] = Field(title="Letters", min_length=1)

    @model_validator(mode="before")
    @classmethod
    def _from_symbols(cls, value: Any) -> Any:
        if isinstance(value, str):
            return {"letters": [{"symbol": _s} for _s in value]}
        return value

    @model_validator(mode="after")
    def _check_letters(self) -> Self:
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("Alphabet letters must be unique.")
        if not self.assembly_symbols:
            raise ValueError("At least one letter must be an assembly element.")
        return self

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(_l.symbol for _l in self.letters)

    @property
    def assembly_symbols(self) -> tuple[str, ...]:
        return tuple(_l.symbol for _l in self.letters if _l.assembly)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.symbols


class Unit(FrozenModel):
    """Chain Unit Model"""

    element: str = Field(title="Element", min_length=1)
    coordinates: tuple[float, float, float] = Field(
        title="Coordinates",
        description="Relative position of the unit, carried as payload.",
        default=(0.0, 0.0, 0.0),
    )

    @model_validator(mode="before")
    @classmethod
    def _from_symbol(cls, value: Any) -> Any:
        if isinstance(value, str):
            return {"element": value}
        return value


class Chain(FrozenModel):
    """Chain Model

    Accepts a string of one-character element symbols in place of the unit list.
    Positions are 1-based.
    """

    units: tuple[Unit, ...] = Field(title="Units", default=())

    @model_validator(mode="before")
    @classmethod
    def _from_letters(cls, value: Any) -> Any:
        if isinstance(value, str):
            return {"units": [{"element": _s} for _s in value]}
        if isinstance(value, (list, tuple)):
            return {"units": value}
        return value

    def __len__(self) -> int:
        return len(self.units)

    @property
    def letters(self) -> str:
        return "".join(_u.element for _u in self.units)

    @property
    def elements(self) -> tuple[str, ...]:
        return tuple(_u.element for _u in self.units)

    def at(self, position: int) -> Unit:
        """Unit at a 1-based position."""
        if not 1 <= position <= len(self.units):
            raise IndexError(
                f"Chain position {position} outside 1..{len(self.units)}."
            )
        return self.units[position - 1]

    def extend(self, unit: Unit) -> "Chain":
        return Chain(units=self.units + (unit,))


class BondDescriptor(FrozenModel):
    """Bond Descriptor Model

    Bond between a coding chain unit and a growing chain unit.
    """

    kind: BondKind = Field(title="Kind")
    coding: int = Field(title="Coding Position", ge=1)
    growing: int = Field(title="Growing Position", ge=1)


class ReactionContext(FrozenModel):
    """Reaction Context Model

    Everything a scattering outcome list depends on, the terminal bond, the units
    it joins and the incoming element with its internal state.
    """

    bond: BondKind = Field(title="Terminal Bond", description="Kind of l_1.")
    coding: str = Field(title="Coding Element", description="Element at A_s.")
    growing: str = Field(title="Growing Element", description="Element at B_m.")
    element: str = Field(title="Incoming Element")
    state: str = Field(title="Incoming State")

    def __str__(self) -> str:
        return (
            f"{self.bond.value}|{self.coding}|{self.growing}|"
            f"{self.element}:{self.state}"
        )


class ActiveSystem(FrozenModel):
    """Active System Model

    Coding and growing chains, the alignment index s and the bond descriptors
    l_1..l_k, where l_j joins coding position s - j + 1 with growing position
    m - j + 1.
    """

    coding: Chain = Field(title="Coding Chain")
    growing: Chain = Field(title="Growing Chain")
    alignment: int = Field(title="Alignment Index", description="Index s.", ge=1)
    bonds: tuple[BondDescriptor, ...] = Field(
        title="Bond Descriptors",
        description="l_1 (terminal) first.",
        min_length=1,
    )

    @model_validator(mode="after")
    def _check_bonds(self) -> Self:
        if self.alignment > len(self.coding):
            raise ValueError(
                f"Alignment {self.alignment} exceeds the coding chain length "
                f"{len(self.coding)}."
            )
        _m = len(self.growing)
        for _j, _bond in enumerate(self.bonds, start=1):
            if (_bond.coding, _bond.growing) != (self.alignment - _j + 1, _m - _j + 1):
                raise ValueError(
                    f"Bond l_{_j} must join coding position {self.alignment - _j + 1} "
                    f"with growing position {_m - _j + 1}."
                )
        return self

    @classmethod
    def aligned(
        cls,
        coding: Any,
        growing: Any,
        alignment: int,
        kinds: Sequence[BondKind],
    ) -> Self:
        """Build the system from bond kinds, l_1 first, deriving the endpoints."""
        _growing = Chain.model_validate(growing)
        _m = len(_growing)
        return cls(
            coding=coding,
            growing=_growing,
            alignment=alignment,
            bonds=tuple(
                BondDescriptor(
                    kind=_kind, coding=alignment - _j + 1, growing=_m - _j + 1
                )
                for _j, _kind in enumerate(kinds, start=1)
            ),
        )

    @property
    def terminal(self) -> BondDescriptor:
        return self.bonds[0]

    @property
    def exhausted(self) -> bool:
        """Whether the coding chain has no unit left to pair with."""
        return self.alignment >= len(self.coding)

    def context(self, element: str, state: str) -> ReactionContext:
        return ReactionContext(
            bond=self.terminal.kind,
            coding=self.coding.at(self.alignment).element,
            growing=self.growing.at(len(self.growing)).element,
            element=element,
            state=state,
        )


class ReservoirEntry(FrozenModel):
    """Reservoir Entry Model"""

    element: str = Field(title="Element", min_length=1)
    state: str = Field(title="Internal State", default="ground")
    weight: float = Field(title="Weight", description="Probability p_rho.", ge=0.0)


class ReservoirSpec(FrozenModel):
    """Reservoir Model

    Weighted mixture of incoming elements for one assembly step.
    """

    entries: tuple[ReservoirEntry, ...] = Field(title="Entries", min_length=1)

    @model_validator(mode="after")
    def _check_weights(self) -> Self:
        _total = float(sum(_e.weight for _e in self.entries))
        if abs(_total - 1.0) > config.SIM_NORM_TOLERANCE:
            raise ValueError(f"Reservoir weights sum to {_total!r}, not 1.")
        return self


class Scenario(FrozenModel):
    """Scenario Model

    One reservoir per assembly step, at most ASSEMBLY_MAX_STEPS steps.
    """

    name: str = Field(title="Name", default="scenario")
    steps: tuple[ReservoirSpec, ...] = Field(title="Steps", min_length=1)

    @field_validator("steps", mode="after")
    @classmethod
    def _check_length(
        cls, value: tuple[ReservoirSpec, ...]
    ) -> tuple[ReservoirSpec, ...]:
        if len(value) > config.ASSEMBLY_MAX_STEPS:
            raise CapExceededError(
                value=len(value),
                cap=config.ASSEMBLY_MAX_STEPS,
                msg=(
                    f"Scenario of {len(value)} steps exceeds the limit "
                    f"{config.ASSEMBLY_MAX_STEPS}."
                ),
                detail="Raise QS_ASSEMBLY_MAX_STEPS to allow longer scenarios.",
            )
        return value


class Attachment(FrozenModel):
    """Attachment Model

    How an admitted incoming element joins the active system. The bond to the
    growing chain is always covalent.
    """

    element: str = Field(title="Element", min_length=1)
    bond_to_coding: BondKind = Field(title="Bond To Coding Chain")
    bond_to_growing: BondKind = Field(
        title="Bond To Growing Chain",
        default=BondKind.COVALENT,
    )
    coordinates: tuple[float, float, float] = Field(
        title="Coordinates",
        default=(0.0, 0.0, 0.0),
    )

    @field_validator("bond_to_growing", mode="after")
    @classmethod
    def _check_growing_bond(cls, value: BondKind) -> BondKind:
        if value != BondKind.COVALENT:
            raise ValueError("The bond to the growing chain must be covalent.")
        return value

    @property
    def unit(self) -> Unit:
        return Unit(element=self.element, coordinates=self.coordinates)


class Outcome(FrozenModel):
    """Scattering Outcome Model"""

    kind: OutcomeKind = Field(title="Kind")
    attachment: Optional[Attachment] = Field(title="Attachment", default=None)
    label: Optional[str] = Field(
        title="Label",
        description="Name of a non-admitted outcome, e.g. singular.",
        default=None,
    )

    @model_validator(mode="after")
    def _check_attachment(self) -> Self:
        if (self.kind == OutcomeKind.ADMITTED) != (self.attachment is not None):
            raise ValueError("Admitted outcomes, and only those, carry an attachment.")
        return self

    @classmethod
    def admitted(cls, attachment: Attachment) -> Self:
        return cls(kind=OutcomeKind.ADMITTED, attachment=attachment)

    @classmethod
    def non_admitted(cls, label: Optional[str] = None) -> Self:
        return cls(kind=OutcomeKind.NON_ADMITTED, label=label)

    @property
    def is_admitted(self) -> bool:
        return self.kind == OutcomeKind.ADMITTED

    def __str__(self) -> str:
        if self.attachment is not None:
            return f"+{self.attachment.element}({self.attachment.bond_to_coding.value})"
        return self.label or OutcomeKind.NON_ADMITTED.value


class WeightedOutcome(FrozenModel):
    """Weighted Outcome Model"""

    outcome: Outcome = Field(title="Outcome")
    weight: float = Field(title="Weight", ge=0.0)


class OutcomeDistribution(FrozenModel):
    """Outcome Distribution Model

    Finite list of weighted outcomes, weights summing to one.
    """

    outcomes: tuple[WeightedOutcome, ...] = Field(title="Outcomes", min_length=1)

    @model_validator(mode="after")
    def _check_weights(self) -> Self:
        _total = float(sum(_o.weight for _o in self.outcomes))
        if abs(_total - 1.0) > config.SIM_NORM_TOLERANCE:
            raise ValueError(f"Outcome weights sum to {_total!r}, not 1.")
        return self

    @classmethod
    def point(cls, outcome: Outcome) -> Self:
        return cls(outcomes=(WeightedOutcome(outcome=outcome, weight=1.0),))

    @classmethod
    def normalized(cls, pairs: Iterable[tuple[Outcome, float]]) -> Self:
        """Merge equal outcomes in first-appearance order, drop zero weights and
        renormalize.
        """
        _merged: dict[Outcome, float] = {}
        for _outcome, _weight in pairs:
            _merged[_outcome] = _merged.get(_outcome, 0.0) + float(_weight)
        _total = sum(_merged.values())
        if _total <= 0.0:
            raise ValueError("Outcome weights vanish.")
        return cls(
            outcomes=tuple(
                WeightedOutcome(outcome=_o, weight=_w / _total)
                for _o, _w in _merged.items()
                if _w > 0.0
            )
        )

    @property
    def weights(self) -> np.ndarray:
        return np.array([_o.weight for _o in self.outcomes], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.outcomes)

    def truncate(self, max_outcomes: Optional[int]) -> Self:
        """Keep the heaviest outcomes, ties resolved by list order, and renormalize."""
        if max_outcomes is None or len(self.outcomes) <= max_outcomes:
            return self
        _ranked = sorted(
            range(len(self.outcomes)), key=lambda _i: -self.outcomes[_i].weight
        )
        _kept = sorted(_ranked[:max_outcomes])
        return self.normalized(
            (self.outcomes[_i].outcome, self.outcomes[_i].weight) for _i in _kept
        )


class TableEntry(FrozenModel):
    """Scattering Table Entry Model"""

    context: ReactionContext = Field(title="Context")
    distribution: OutcomeDistribution = Field(title="Distribution")

    @model_validator(mode="after")
    def _check_elements(self) -> Self:
        for _weighted in self.distribution.outcomes:
            _attachment = _weighted.outcome.attachment
            if _attachment is not None and _attachment.element != self.context.element:
                raise ValueError(
                    f"Context {self.context} attaches {_attachment.element}, "
                    f"not the incoming {self.context.element}."
                )
        return self


class ScatteringTable(FrozenModel):
    """Scattering Table Model

    Exact-match map from reaction contexts to outcome distributions.
    """

    entries: tuple[TableEntry, ...] = Field(title="Entries", default=())

    _index: dict[ReactionContext, OutcomeDistribution] = PrivateAttr(
        default_factory=dict
    )
    _digest: Optional[str] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_duplicates(self) -> Self:
        _seen: set[ReactionContext] = set()
        for _entry in self.entries:
            if _entry.context in _seen:
                raise ValueError(f"Context {_entry.context} is listed twice.")
            _seen.add(_entry.context)
        return self

    def model_post_init(self, __context: Any) -> None:
        self._index = {_e.context: _e.distribution for _e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, context: ReactionContext) -> bool:
        return context in self._index

    def get(self, context: ReactionContext) -> Optional[OutcomeDistribution]:
        return self._index.get(context)

    @property
    def elements(self) -> tuple[tuple[str, str], ...]:
        """Distinct (incoming element, state) pairs, sorted."""
        return tuple(sorted({(_c.element, _c.state) for _c in self._index}))

    @property
    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(self.model_dump_json().encode()).hexdigest()
        return self._digest


class Impossible(FrozenModel):
    """Impossible Assembly Model"""

    step: int = Field(title="Step", description="0-based failing step.", ge=0)
    reason: str = Field(title="Reason")


class AssemblyResult(FrozenModel):
    """Assembly Result Model

    Either the final growing chain or the step at which assembly became impossible.
    """

    option: int = Field(title="Option", ge=1)
    chain: Optional[Chain] = Field(title="Growing Chain", default=None)
    impossible: Optional[Impossible] = Field(title="Impossible", default=None)

    @model_validator(mode="after")
    def _check_result(self) -> Self:
        if (self.chain is None) == (self.impossible is None):
            raise ValueError("A result is either a chain or impossible.")
        return self

    @property
    def success(self) -> bool:
        return self.chain is not None

    @property
    def label(self) -> str:
        """Letters of the chain, or "impossible"."""
        return self.chain.letters if self.chain is not None else IMPOSSIBLE


class HistogramEntry(FrozenModel):
    """Result Histogram Entry Model"""

    label: str = Field(title="Label", description="Chain letters or impossible.")
    count: int = Field(title="Count", ge=0)
    fraction: float = Field(title="Fraction", ge=0.0, le=1.0)


class OptionRecord(FrozenModel):
    """Per-option Result Model"""

    option: int = Field(title="Option", ge=1)
    result: str = Field(title="Result", description="Chain letters or impossible.")
    lucky: bool = Field(title="Lucky")
    step: Optional[int] = Field(
        title="Failing Step", description="Set for impossible results.", default=None
    )


class ScenarioReport(FrozenModel):
    """Scenario Report Model"""

    scenario: str = Field(title="Scenario")
    sample: str = Field(title="Sample Chain")
    volume: int = Field(title="Volume", ge=1)
    lucky_fraction: float = Field(title="Lucky Fraction", ge=0.0, le=1.0)
    impossible_fraction: float = Field(title="Impossible Fraction", ge=0.0, le=1.0)
    histogram: tuple[HistogramEntry, ...] = Field(title="Histogram")
    options: tuple[OptionRecord, ...] = Field(title="Per-option Results")

    def fraction(self, label: str) -> float:
        for _entry in self.histogram:
            if _entry.label == label:
                return _entry.fraction
        return 0.0


class RankedReport(FrozenModel):
    """Ranked Scenario Report Model"""

    rank: int = Field(title="Rank", ge=1)
    index: int = Field(title="Input Index", ge=0)
    successful: bool = Field(title="Successful")
    report: ScenarioReport = Field(title="Report")


class InitialSystem(FrozenModel):
    """Initial Active System File Model"""

    coding: Chain = Field(title="Coding Chain")
    growing: Chain = Field(title="Growing Chain")
    alignment: int = Field(title="Alignment Index", ge=1)
    bonds: tuple[BondKind, ...] = Field(
        title="Bond Kinds", description="Kinds of l_1..l_k.", min_length=1
    )

    def build(self) -> ActiveSystem:
        return ActiveSystem.aligned(
            self.coding, self.growing, self.alignment, self.bonds
        )


class ScenarioFile(FrozenModel):
    """Scenario File Model"""

    format: Literal["qscenario-scenario/1"] = Field(title="Format")
    alphabet: Alphabet = Field(title="Alphabet")
    initial: InitialSystem = Field(title="Initial Active System")
    sample: Chain = Field(title="Sample Chain")
    scenarios: tuple[Scenario, ...] = Field(title="Scenarios", min_length=1)
    volume: Optional[int] = Field(title="Option Volume", default=None, ge=1)
    threshold: Optional[float] = Field(
        title="Success Threshold", default=None, ge=0.0, le=1.0
    )

    @model_validator(mode="after")
    def _check_alphabet(self) -> Self:
        for _chain in (self.initial.coding, self.initial.growing, self.sample):
            for _element in _chain.elements:
                if _element not in self.alphabet:
                    raise ValueError(f"Element {_element!r} is not in the alphabet.")
        _assembly = set(self.alphabet.assembly_symbols)
        for _scenario in self.scenarios:
            for _reservoir in _scenario.steps:
                for _entry in _reservoir.entries:
                    if _entry.element not in _assembly:
                        raise ValueError(
                            f"Reservoir element {_entry.element!r} of "
                            f"{_scenario.name!r} is not an assembly element."
                        )
        return self


class TableFile(FrozenModel):
    """Scattering Table File Model"""

    format: Literal["qscenario-table/1"] = Field(title="Format")
    entries: tuple[TableEntry, ...] = Field(title="Entries", default=())

    def build(self) -> ScatteringTable:
        return ScatteringTable(entries=self.entries)


class Channel(FrozenModel):
    """Scattering Channel Model"""

    outcome: Outcome = Field(title="Outcome")
    matrix_element: ComplexScalar = Field(
        title="Matrix Element",
        description="<Phi_b|V|Psi_a>, as a number or a [re, im] pair.",
    )
    density: float = Field(title="Density Of States", description="rho(E_b).")


class ChannelFile(FrozenModel):
    """Channel File Model"""

    format: Literal["qscenario-channels/1"] = Field(title="Format")
    hbar: float = Field(title="Reduced Planck Constant", default=1.0, gt=0.0)
    context: Optional[ReactionContext] = Field(title="Context", default=None)
    channels: tuple[Channel, ...] = Field(title="Channels", min_length=1)


class ScatteringSolution(ArrayModel):
    """Scattering State Model

    Solution of Psi = Phi + G V Psi by sequential approximation.
    """

    state: ComplexVector = Field(title="Scattering State")
    iterations: int = Field(
        title="Iterations",
        description="Index n of the returned iterate Psi_n.",
        ge=0,
    )
    rounds: int = Field(
        title="Doubling Rounds",
        description="Doubling rounds performed, n = 2^rounds - 1.",
        ge=0,
    )
    increment: float = Field(
        title="Increment",
        description="Norm of the difference to the previous iterate reached.",
        ge=0.0,
    )
    spectral_radius: float = Field(
        title="Spectral Radius",
        description="Spectral radius of G V.",
        ge=0.0,
    )


class LippmannSchwingerFile(FrozenModel):
    """Lippmann-Schwinger Problem File Model"""

    format: Literal["qscenario-ls/1"] = Field(title="Format")
    hamiltonian: tuple[tuple[ComplexScalar, ...], ...] = Field(title="H_a")
    interaction: tuple[tuple[ComplexScalar, ...], ...] = Field(title="V_a")
    free_state: tuple[ComplexScalar, ...] = Field(title="Phi_a")
    energy: float = Field(title="Energy")
    eta: float = Field(title="Eta", gt=0.0)
    tolerance: Optional[float] = Field(title="Tolerance", default=None, gt=0.0)
    max_iter: Optional[int] = Field(title="Iteration Limit", default=None, ge=1)
