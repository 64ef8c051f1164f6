"""Scattering helpers that fill outcome tables at desk scale.

Golden-rule weights turn matrix elements and densities of states into outcome
distributions, the Lippmann-Schwinger solver produces scattering states of small
model systems.
"""

import math
from typing import Annotated, Iterable, Optional

import numpy as np
from pydantic import Field, validate_call
from scipy import linalg

from ..config import get_settings
from ..decorators import enforce_cap
from ..exceptions.assembly import NegativeDensityError
from ..exceptions.model import DimensionMismatchError, DivergenceError, NumericalError
from ..logger import get_logger
from ..schemas.assembly import (
    Attachment,
    Channel,
    Outcome,
    OutcomeDistribution,
    ScatteringSolution,
)

config = get_settings()
logger = get_logger("scattering")

SINGULAR = "singular"


def golden_rule_prob(
    matrix_element: complex, density_of_states: float, hbar: float = 1.0
) -> float:
    """Transition weight (2 pi / hbar) |<b|V|a>|^2 rho(E_b).

    Parameters
    ----------
    matrix_element : complex
        Matrix element <Phi_b|V|Psi_a>.
    density_of_states : float
        Density of final states rho(E_b), non-negative.
    hbar : float, optional
        Reduced Planck constant, by default 1.0.

    Returns
    -------
    float
        Unnormalized probability weight.
    """
    if hbar <= 0.0:
        raise ValueError(f"hbar must be positive, got {hbar!r}.")
    if density_of_states < 0.0:
        raise NegativeDensityError(
            density=density_of_states,
            msg=f"Density of states {density_of_states!r} is negative.",
        )
    return 2.0 * math.pi / hbar * abs(matrix_element) ** 2 * density_of_states


def channel_distribution(
    channels: Iterable[Channel], hbar: float = 1.0
) -> OutcomeDistribution:
    """Golden-rule weights of the channels, renormalized into a distribution."""
    _pairs = [
        (_c.outcome, golden_rule_prob(_c.matrix_element, _c.density, hbar))
        for _c in channels
    ]
    if not any(_w > 0.0 for _, _w in _pairs):
        raise NumericalError(msg="Every channel has a vanishing golden-rule weight.")
    return OutcomeDistribution.normalized(_pairs)


@validate_call
def regular_singular(
    regular: Annotated[float, Field(ge=0.0, le=1.0)],
    attachment: Attachment,
    label: str = SINGULAR,
) -> OutcomeDistribution:
    """Two-outcome reduction, the regular outcome attaches, the singular one does not.

    Parameters
    ----------
    regular : float
        Probability of the regular outcome.
    attachment : Attachment
        Attachment of the regular outcome.
    label : str, optional
        Name of the singular outcome, by default "singular".

    Returns
    -------
    OutcomeDistribution
        Regular and singular outcomes, zero weights dropped.
    """
    return OutcomeDistribution.normalized(
        (
            (Outcome.admitted(attachment), regular),
            (Outcome.non_admitted(label), 1.0 - regular),
        )
    )


def _square(value: np.ndarray, name: str) -> np.ndarray:
    if value.ndim != 2 or value.shape[0] != value.shape[1]:
        raise DimensionMismatchError(
            received=int(value.shape[0]) if value.ndim else None,
            msg=f"{name} must be a square matrix, got shape {value.shape}.",
        )
    return value


@enforce_cap(argument="hamiltonian", setting="LS_MAX_DIM", measure=len)
def lippmann_schwinger_solve(
    hamiltonian: np.ndarray,
    interaction: np.ndarray,
    free_state: np.ndarray,
    energy: float,
    eta: float,
    tolerance: float = config.LS_TOLERANCE,
    max_iter: Optional[int] = None,
) -> ScatteringSolution:
    """Solve Psi = Phi + G V Psi with G = (E - H + i eta)^-1 by sequential
    approximation.

    The iterates Psi_n = sum_{j<=n} (G V)^j Phi are reached by doubling,
    Psi_{2n+1} = Psi_n + (G V)^(n+1) Psi_n, which yields Psi_1, Psi_3, Psi_7, ... at a
    logarithmic cost. Iteration stops once two reached iterates differ by less
    than the tolerance.

    Parameters
    ----------
    hamiltonian : np.ndarray
        Hermitian H_a, at most LS_MAX_DIM rows.
    interaction : np.ndarray
        Interaction V_a.
    free_state : np.ndarray
        Free state Phi_a.
    energy : float
        Energy E.
    eta : float
        Positive regularization eta.
    tolerance : float, optional
        Increment tolerance, by default LS_TOLERANCE.
    max_iter : Optional[int], optional
        Largest iterate index, by default LS_MAX_ITER.

    Returns
    -------
    ScatteringSolution
        Scattering state, iterate index, doubling rounds, last increment and
        spectral radius.
    """
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta!r}.")
    if max_iter is None:
        max_iter = get_settings().LS_MAX_ITER
    _h = _square(np.asarray(hamiltonian, dtype=np.complex128), "H_a")
    _v = _square(np.asarray(interaction, dtype=np.complex128), "V_a")
    _phi = np.asarray(free_state, dtype=np.complex128)
    if _v.shape != _h.shape or _phi.shape != (_h.shape[0],):
        raise DimensionMismatchError(
            expected=int(_h.shape[0]),
            msg=(
                f"H_a {_h.shape}, V_a {_v.shape} and Phi_a {_phi.shape} "
                "do not agree."
            ),
        )

    _dimension = _h.shape[0]
    _green = linalg.inv((energy + 1j * eta) * np.eye(_dimension) - _h)
    _kernel = _green @ _v
    _radius = float(np.max(np.abs(linalg.eigvals(_kernel))))
    logger.debug(f"Lippmann-Schwinger: dim={_dimension}, spectral radius {_radius!r}")
    if _radius >= 1.0:
        raise DivergenceError(
            iterations=0,
            spectral_radius=_radius,
            msg=f"G V has spectral radius {_radius!r} >= 1, the iteration diverges.",
        )

    _state = _phi.copy()
    _power = _kernel
    _index = 0
    _rounds = 0
    while True:
        _step = _power @ _state
        _state = _state + _step
        _index = 2 * _index + 1
        _rounds += 1
        _increment = float(np.linalg.norm(_step))
        if _increment < tolerance:
            break
        if 2 * _index + 1 > max_iter or not np.isfinite(_increment):
            raise DivergenceError(
                iterations=_index,
                spectral_radius=_radius,
                msg=(
                    f"No convergence within {max_iter} iterations, "
                    f"last increment {_increment!r}."
                ),
            )
        _power = _power @ _power

    return ScatteringSolution(
        state=_state,
        iterations=_index,
        rounds=_rounds,
        increment=_increment,
        spectral_radius=_radius,
    )
