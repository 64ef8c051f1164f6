from qscenario.schemas.assembly import (
    Attachment,
    BondKind,
    Outcome,
    ReactionContext,
    ReservoirEntry,
    ReservoirSpec,
)

CODING = "A" * 20


def attach(element: str, bond: BondKind = BondKind.COVALENT) -> Outcome:
    return Outcome.admitted(Attachment(element=element, bond_to_coding=bond))


def context(
    growing: str, element: str, bond: BondKind = BondKind.COVALENT
) -> ReactionContext:
    return ReactionContext(
        bond=bond, coding="A", growing=growing, element=element, state="ground"
    )


def reservoir(**weights: float) -> ReservoirSpec:
    return ReservoirSpec(
        entries=tuple(
            ReservoirEntry(element=_element, weight=_weight)
            for _element, _weight in weights.items()
        )
    )


def reservoir_json(**weights: float) -> dict:
    return {
        "entries": [
            {"element": _element, "weight": _weight}
            for _element, _weight in weights.items()
        ]
    }
