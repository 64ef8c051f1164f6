"""Input and output file formats of the command line.

JSON documents carry a ``"format"`` version key. State vectors, wave functions
and potentials are line-oriented text under a one-line versioned header, one
amplitude or sample row per line at full precision.
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Optional, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..config import get_settings
from ..exceptions.cli import ParseError
from ..exceptions.model import DimensionMismatchError
from ..logger import get_logger
from ..schemas.grid import Grid, GridWaveFunction, PotentialField, Representation
from ..schemas.state import StateVector

config = get_settings()
logger = get_logger("cli")

WAVEFUNCTION_HEADER = "qscenario-wavefunction"
POTENTIAL_HEADER = "qscenario-potential"
STATE_HEADER = "qscenario-state"
VERSION = "v1"

Document = TypeVar("Document", bound=BaseModel)


def digest_file(path: Union[Path, str]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_text(path: Union[Path, str], text: str) -> None:
    """Write a file in one step, through a sibling ``.partial`` file."""
    _path = Path(path)
    _partial = _path.with_name(_path.name + ".partial")
    _partial.write_text(text, encoding="utf-8")
    os.replace(_partial, _path)
    logger.debug(f"Wrote {_path}")


def read_document(path: Union[Path, str], model: type[Document]) -> Document:
    """Load and validate a JSON input document.

    Parameters
    ----------
    path : Union[Path, str]
        Document path.
    model : type[Document]
        Model the document must validate against, including its format key.

    Returns
    -------
    Document
        Validated document.
    """
    _text = Path(path).read_text(encoding="utf-8")
    try:
        _data = json.loads(_text)
    except json.JSONDecodeError as _ex:
        raise ParseError(
            path=str(path),
            line=_ex.lineno,
            msg=f"{path}:{_ex.lineno}: invalid JSON, {_ex.msg}.",
        ) from _ex
    try:
        return model.model_validate(_data)
    except ValidationError as _ex:
        _first = _ex.errors()[0]
        _location = ".".join(str(_part) for _part in _first["loc"])
        raise ParseError(
            path=str(path),
            msg=(
                f"{path}: {_ex.error_count()} validation error(s), "
                f"first at {_location or '<root>'}: {_first['msg']}."
            ),
        ) from _ex


def dump_document(document: BaseModel) -> str:
    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _header(path: Union[Path, str], lines: list[str], kind: str) -> dict[str, str]:
    if not lines:
        raise ParseError(path=str(path), line=1, msg=f"{path}: empty file.")
    _tokens = lines[0].split()
    if _tokens[:3] != ["#", kind, VERSION]:
        raise ParseError(
            path=str(path),
            line=1,
            msg=f"{path}:1: expected header '# {kind} {VERSION}'.",
        )
    _fields: dict[str, str] = {}
    for _token in _tokens[3:]:
        _name, _sep, _value = _token.partition("=")
        if not _sep:
            raise ParseError(
                path=str(path), line=1, msg=f"{path}:1: malformed field {_token!r}."
            )
        _fields[_name] = _value
    return _fields


def _header_int(path: Union[Path, str], fields: dict[str, str], name: str) -> int:
    try:
        return int(fields[name])
    except KeyError as _ex:
        raise ParseError(
            path=str(path), line=1, msg=f"{path}:1: header lacks {name}=."
        ) from _ex
    except ValueError as _ex:
        raise ParseError(
            path=str(path), line=1, msg=f"{path}:1: {name}= is not an integer."
        ) from _ex


def _numeric_rows(
    path: Union[Path, str], lines: list[str]
) -> list[tuple[int, list[float]]]:
    _rows = []
    for _number, _line in enumerate(lines[1:], start=2):
        _stripped = _line.strip()
        if not _stripped or _stripped.startswith("#"):
            continue
        try:
            _rows.append((_number, [float(_v) for _v in _stripped.split()]))
        except ValueError as _ex:
            raise ParseError(
                path=str(path),
                line=_number,
                msg=f"{path}:{_number}: non-numeric value.",
            ) from _ex
    return _rows


def _amplitudes(path: Union[Path, str], lines: list[str], count: int) -> np.ndarray:
    _rows = _numeric_rows(path, lines)
    if len(_rows) != count:
        raise ParseError(
            path=str(path),
            msg=f"{path}: expected {count} amplitude lines, found {len(_rows)}.",
        )
    for _number, _values in _rows:
        if len(_values) != 2:
            raise ParseError(
                path=str(path),
                line=_number,
                msg=f"{path}:{_number}: expected 're im'.",
            )
    return np.array([complex(_re, _im) for _, (_re, _im) in _rows])


def _amplitude_lines(amplitudes: np.ndarray) -> list[str]:
    return [f"{float(_v.real)!r} {float(_v.imag)!r}" for _v in amplitudes]


def read_wavefunction(path: Union[Path, str]) -> tuple[GridWaveFunction, int, float]:
    """Read a wave-function dump.

    Returns
    -------
    tuple[GridWaveFunction, int, float]
        Wave function, step and time recorded in the header.
    """
    _lines = Path(path).read_text(encoding="utf-8").splitlines()
    _fields = _header(path, _lines, WAVEFUNCTION_HEADER)
    _qubits = _header_int(path, _fields, "l")
    _step = _header_int(path, _fields, "step") if "step" in _fields else 0
    try:
        _time = float(_fields.get("time", "0.0"))
    except ValueError as _ex:
        raise ParseError(
            path=str(path), line=1, msg=f"{path}:1: time= is not a number."
        ) from _ex
    _grid = Grid(qubits=_qubits)
    _wave = GridWaveFunction(
        grid=_grid, amplitudes=_amplitudes(path, _lines, _grid.points)
    )
    return _wave, _step, _time


def format_wavefunction(
    wave: GridWaveFunction, step: int = 0, time: float = 0.0
) -> str:
    """Coordinate-representation dump with l, the spacing convention, step and
    time in the header.
    """
    if wave.representation != Representation.POSITION:
        raise ValueError("Only coordinate-representation wave functions are dumped.")
    _header_line = (
        f"# {WAVEFUNCTION_HEADER} {VERSION} l={wave.grid.qubits} "
        f"dq=sqrt(2pi/N) step={step} time={float(time)!r}"
    )
    return "\n".join([_header_line, *_amplitude_lines(wave.amplitudes)]) + "\n"


def read_potential(
    path: Union[Path, str], mass: float = config.SIM_MASS
) -> PotentialField:
    """Read a potential file, one sample per line, or one row of N samples per
    time step.
    """
    _lines = Path(path).read_text(encoding="utf-8").splitlines()
    _header(path, _lines, POTENTIAL_HEADER)
    _rows = _numeric_rows(path, _lines)
    if not _rows:
        raise ParseError(path=str(path), msg=f"{path}: no samples.")
    _widths = {len(_values) for _, _values in _rows}
    if _widths == {1}:
        _samples = np.array([_values[0] for _, _values in _rows])
    elif len(_widths) == 1:
        _samples = np.array([_values for _, _values in _rows])
    else:
        raise ParseError(
            path=str(path), msg=f"{path}: rows have different sample counts."
        )
    return PotentialField(samples=_samples, mass=mass)


def format_potential(field: PotentialField) -> str:
    _rows = field.samples if field.is_time_dependent else field.samples[:, None]
    _lines = [" ".join(repr(float(_v)) for _v in _row) for _row in _rows]
    return "\n".join([f"# {POTENTIAL_HEADER} {VERSION}", *_lines]) + "\n"


def read_state(path: Union[Path, str]) -> tuple[StateVector, Optional[int]]:
    """Read a state-vector file.

    Returns
    -------
    tuple[StateVector, Optional[int]]
        State and the option volume L of the header, if any.
    """
    _lines = Path(path).read_text(encoding="utf-8").splitlines()
    _fields = _header(path, _lines, STATE_HEADER)
    _dimension = _header_int(path, _fields, "N")
    _volume = _header_int(path, _fields, "L") if "L" in _fields else None
    return StateVector(amplitudes=_amplitudes(path, _lines, _dimension)), _volume


def format_state(state: StateVector, volume: Optional[int] = None) -> str:
    _header_line = f"# {STATE_HEADER} {VERSION} N={state.dimension}"
    if volume is not None:
        _header_line += f" L={volume}"
    return "\n".join([_header_line, *_amplitude_lines(state.amplitudes)]) + "\n"


def load_potential(
    source: str, grid: Grid, mass: float = config.SIM_MASS
) -> PotentialField:
    """Resolve a potential file or tag on a grid."""
    if Path(source).is_file():
        _field = read_potential(source, mass=mass)
        _field.check_grid(grid)
        return _field
    return PotentialField.from_tag(grid, source, mass=mass)


def load_wavefunction(source: str, grid: Optional[Grid]) -> GridWaveFunction:
    """Resolve an initial wave-function file or tag, a file fixes its own grid."""
    if Path(source).is_file():
        _wave, _, _ = read_wavefunction(source)
        if grid is not None and _wave.grid != grid:
            raise DimensionMismatchError(
                expected=grid.points,
                received=_wave.grid.points,
                msg=(
                    f"{source} holds {_wave.grid.points} points, "
                    f"the grid has {grid.points}."
                ),
            )
        return _wave
    if grid is None:
        raise ParseError(msg=f"State tag {source!r} needs the grid size (--qubits).")
    return GridWaveFunction.from_tag(grid, source)
