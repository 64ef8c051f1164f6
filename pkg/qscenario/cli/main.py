"""Command line front door.

Every command writes its artifacts and its JSON report only after it completed;
a failing command leaves no partial output behind and exits with the code of
its error.
"""

import argparse
import sys
import time
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from .. import __version__
from ..exceptions.base import SimulationException
from ..logger import get_logger
from ..schemas.common.exit_code import ExitCode, ExitCodes
from ..schemas.reports import CommandOutput, RunConfig, RunReport
from .commands import COMMANDS
from .formats import write_text

logger = get_logger("cli")

INPUT_ROLES = ("scenario", "table", "state", "potential", "base", "channels", "problem")
_CONFIG_FIELDS = tuple(
    _name for _name in RunConfig.model_fields if _name not in ("command", "inputs")
)


def _assembly_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="Scenario JSON file.")
    parser.add_argument("--table", required=True, help="Scattering table JSON file.")
    parser.add_argument("--volume", type=int, help="Option volume L.")
    parser.add_argument("--mode", choices=("residual", "fixed"), help="Option mode.")
    parser.add_argument("--workers", type=int, help="Sweep worker threads.")
    parser.add_argument(
        "--max-outcomes", type=int, help="Outcomes kept after each scattering."
    )
    parser.add_argument("--max-steps", type=int, help="Scenario length limit T0.")
    parser.add_argument(
        "--coordinates",
        dest="compare_coordinates",
        action="store_true",
        help="Compare unit coordinates as well as letters.",
    )
    parser.add_argument("--name", help="Only the scenario of this name.")


def _grid_flags(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--qubits", type=int, help="Grid exponent l, N = 2^l.")
    parser.add_argument(
        "--potential",
        help='Potential file or tag ("free", "harmonic:w[:c]", "linear:g").',
    )
    parser.add_argument("--dt", type=float, required=required, help="Time step.")
    parser.add_argument(
        "--steps", type=int, required=required, help="Number of time steps."
    )
    parser.add_argument("--mass", type=float, help="Particle mass.")


def _exit_code_help() -> str:
    _lines = [
        f"  {_code.id}  {_code.name:<18}{_code.description}" for _code in ExitCodes
    ]
    return "exit codes:\n" + "\n".join(_lines)


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    _common = argparse.ArgumentParser(add_help=False)
    _common.add_argument("--report", help="Write the JSON report to this path.")
    _common.add_argument(
        "--quiet", action="store_true", help="Do not print the text summary."
    )

    parser = argparse.ArgumentParser(
        prog="qscenario",
        description="Deterministic quantum scenario simulator.",
        epilog=_exit_code_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    _commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    _sweep = _commands.add_parser(
        "sweep", parents=[_common], help="Sweep all option values of scenarios."
    )
    _assembly_flags(_sweep)

    _compare = _commands.add_parser(
        "compare", parents=[_common], help="Rank scenarios by lucky fraction."
    )
    _assembly_flags(_compare)
    _compare.add_argument("--threshold", type=float, help="Success threshold.")

    _evolve = _commands.add_parser(
        "evolve", parents=[_common], help="Split-operator evolution on a grid."
    )
    _evolve.add_argument(
        "--state",
        required=True,
        help='Wave-function file or tag ("gaussian:x0:p0:s", "delta:a", "plane:b").',
    )
    _grid_flags(_evolve)
    _evolve.add_argument(
        "--trace-every",
        type=int,
        default=1,
        help="Steps between trace points, 0 for no trace.",
    )
    _evolve.add_argument(
        "--classical",
        action="store_true",
        help="Trace the classical trajectory from the initial expectations.",
    )
    _evolve.add_argument("--output", help="Final wave-function dump.")

    _db_build = _commands.add_parser(
        "db-build", parents=[_common], help="Build and store a propagator."
    )
    _db_build.add_argument("--db", help="Database directory (QS_DB_PATH).")
    _grid_flags(_db_build)

    _db_apply = _commands.add_parser(
        "db-apply", parents=[_common], help="Evolve with a stored propagator."
    )
    _db_apply.add_argument("--db", help="Database directory (QS_DB_PATH).")
    _db_apply.add_argument("--state", required=True, help="Wave-function file or tag.")
    _grid_flags(_db_apply)
    _db_apply.add_argument(
        "--no-build",
        dest="build_missing",
        action="store_false",
        help="Fail instead of building a missing propagator.",
    )
    _db_apply.add_argument(
        "--verify", action="store_true", help="Compare against direct evolution."
    )
    _db_apply.add_argument("--output", help="Final wave-function dump.")

    _db_inspect = _commands.add_parser(
        "db-inspect", parents=[_common], help="Describe stored propagators."
    )
    _db_inspect.add_argument("--db", help="Database directory (QS_DB_PATH).")
    _grid_flags(_db_inspect, required=False)

    _photon = _commands.add_parser(
        "photon-gen", parents=[_common], help="Generate a photon-biased scenario."
    )
    _photon.add_argument("--table", required=True, help="Two-element table file.")
    _photon.add_argument(
        "--base", required=True, help="Scenario file providing the initial system."
    )
    _photon.add_argument("--pulses", required=True, help='Pulse letters, e.g. "AAB".')
    _photon.add_argument("--bias", type=float, required=True, help="Pulse bias l.")
    _photon.add_argument("--name", help="Scenario name.")
    _photon.add_argument("--output", help="Generated scenario file.")

    _ls = _commands.add_parser(
        "ls-solve", parents=[_common], help="Solve a Lippmann-Schwinger system."
    )
    _ls.add_argument("--problem", required=True, help="System JSON file.")

    _golden = _commands.add_parser(
        "golden-rule", parents=[_common], help="Golden-rule outcome weights."
    )
    _golden.add_argument("--channels", required=True, help="Channel JSON file.")
    _golden.add_argument("--output", help="Scattering table file to write.")

    _measure = _commands.add_parser(
        "measure", parents=[_common], help="Option assignment of a state vector."
    )
    _measure.add_argument("--state", required=True, help="State-vector file.")
    _measure.add_argument("--volume", type=int, help="Option volume L.")
    _measure.add_argument("--option", type=int, help="Option value k to measure.")

    return parser.parse_args(argv)


def _run_config(args: argparse.Namespace) -> RunConfig:
    _values = vars(args)
    return RunConfig(
        command=args.command,
        inputs={
            _role: str(_values[_role])
            for _role in INPUT_ROLES
            if _values.get(_role) is not None
        },
        **{
            _name: _values[_name]
            for _name in _CONFIG_FIELDS
            if _values.get(_name) is not None
        },
    )


def build_report(output: CommandOutput, seconds: float) -> RunReport:
    return RunReport(
        tool_version=__version__,
        command=output.config.command,
        config=output.config,
        input_digests=output.input_digests,
        results=output.results,
        timing={"seconds": seconds},
    )


def _scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def render(report: RunReport) -> str:
    """Text summary of a report."""
    _lines = [f"qscenario {report.command} ({report.tool_version})"]
    for _name, _value in sorted(report.results.items()):
        if _name == "reports":
            for _entry in _value:
                _lines.append(
                    f"  {_entry['scenario']}: lucky {_entry['lucky_fraction']!r}, "
                    f"impossible {_entry['impossible_fraction']!r}"
                )
        elif _name == "ranking":
            for _entry in _value:
                _lines.append(
                    f"  #{_entry['rank']} {_entry['report']['scenario']}: "
                    f"lucky {_entry['report']['lucky_fraction']!r}"
                    + (", successful" if _entry["successful"] else "")
                )
        elif _scalar(_value):
            _lines.append(f"  {_name}: {_value}")
        elif isinstance(_value, dict):
            _lines.append(f"  {_name}:")
            _lines.extend(
                f"    {_key}: {_item}"
                for _key, _item in sorted(_value.items())
                if _scalar(_item)
            )
        else:
            _lines.append(f"  {_name}: {len(_value)} entries")
    return "\n".join(_lines)


def _fail(command: str, error: BaseException, exit_code: ExitCode) -> int:
    logger.error(f"{command} failed with {exit_code}: {error}")
    print(f"qscenario {command}: error: {error}", file=sys.stderr)
    return exit_code.id


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        _args = _parse_args(argv)
    except SystemExit as _ex:
        return _ex.code if isinstance(_ex.code, int) else ExitCodes.SUCCESS.id

    logger.info(f"Running {_args.command}")
    _start = time.perf_counter()
    try:
        _output = COMMANDS[_args.command](_run_config(_args))
        _report = build_report(_output, time.perf_counter() - _start)
        for _path, _text in _output.artifacts.items():
            write_text(_path, _text)
        if _args.report:
            write_text(_args.report, _report.to_json())
    except SimulationException as _ex:
        return _fail(_args.command, _ex, _ex.exit_code)
    except ValidationError as _ex:
        return _fail(_args.command, _ex, ExitCodes.PARSE_ERROR)
    except OSError as _ex:
        return _fail(_args.command, _ex, ExitCodes.IO_ERROR)
    except ValueError as _ex:
        return _fail(_args.command, _ex, ExitCodes.SIMULATION_ERROR)

    if not _args.quiet:
        print(render(_report))
    logger.info(f"{_args.command} completed in {_report.timing['seconds']:.3f} s")
    return ExitCodes.SUCCESS.id


if __name__ == "__main__":
    raise SystemExit(main())
