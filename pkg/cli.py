"""
Main entry point for the application.

Command-line runner for the spin-qubit simulator: parameter sweeps of the
magnetic-field and Ising experiments, the spin-algebra self-check, the error
budget and QASM export.

All simulation functionality is insular to the spinqubits package; this file
only parses arguments and maps results to exit codes:
0 success, 1 validation or I/O error, 2 algebra invariant violation.
"""

import argparse
import sys

from rich.console import Console

from spinqubits.config import resolve_config
from spinqubits.errors import QasmError, SpinQubitsError
from spinqubits.experiments import algebra_check, report_budget, report_qasm, run_experiment
from spinqubits.qasm import parse_angle

# Initialize console for rich output
console = Console()

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with exit status 1; status 2 is kept for algebra violations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        console.print(f"[red]{self.prog}: error: {message}[/red]")
        sys.exit(EXIT_INVALID)


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except QasmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--steps", type=int, help="Number of grid points (default 41)")
    parser.add_argument("--max-param", type=_angle, dest="max_param",
                        help="Upper end of the grid, e.g. 2*pi (default 2*pi)")
    parser.add_argument("--shots", type=int, help="Shots per measurement setting (default 1024)")
    parser.add_argument("--exact", action="store_true", default=None,
                        help="Use exact probabilities instead of sampling")
    parser.add_argument("--seed", type=int, help="Root seed of the sweep (default 0)")
    parser.add_argument("--initial", help="Initial state: m=+1, m=0, m=-1 or x-polarized")
    parser.add_argument("--noise", help="Device parameter file enabling gate and readout noise")
    parser.add_argument("--csv", help="Write the sweep table to this CSV file")
    parser.add_argument("--svg", help="Write the sweep figure to this SVG file")
    parser.add_argument("--qasm", help="Write the circuit of the last grid point as QASM")
    parser.add_argument("--workers", type=int, help="Threads evaluating grid points (default: CPU count)")
    parser.add_argument("--config", help="Flat key=value file with the same keys as the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Spin-s particles simulated on 2s qubits")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    magfield_parser = subparsers.add_parser(
        "magfield", help="Sweep omega*t for a spin-1 in a magnetic field along x"
    )
    _add_sweep_arguments(magfield_parser)

    ising_parser = subparsers.add_parser(
        "ising", help="Sweep J*t for the spin-1 / spin-1/2 Ising model"
    )
    _add_sweep_arguments(ising_parser)

    algebra_parser = subparsers.add_parser(
        "algebra-check", help="Verify the spin algebra of the qubit encoding"
    )
    algebra_parser.add_argument("--max-twice-s", type=int, default=6, dest="max_twice_s",
                                help="Largest 2s to check, at most 12 (default 6)")

    qasm_parser = subparsers.add_parser(
        "export-qasm", help="Write an experiment circuit as OpenQASM 2.0"
    )
    qasm_parser.add_argument("--experiment", choices=["magfield", "ising"], default="ising")
    qasm_parser.add_argument("--param", type=_angle, default=0.0,
                             help="omega*t or J*t of the circuit, e.g. pi/2 (default 0)")
    qasm_parser.add_argument("--initial", help="Initial state: m=+1, m=0, m=-1 or x-polarized")
    qasm_parser.add_argument("--qasm", required=True, help="Output .qasm file")

    budget_parser = subparsers.add_parser(
        "error-budget", help="Print the error budget of the Ising experiment"
    )
    budget_parser.add_argument("--noise", help="Device parameter file (default: reference device)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Handle no arguments case - show help
    if not args.command:
        parser.print_help()
        return EXIT_OK

    try:
        if args.command in ("magfield", "ising"):
            flags = {key: value for key, value in vars(args).items()
                     if key not in ("command", "config")}
            cfg = resolve_config(args.command, args.config, **flags)
            return EXIT_OK if run_experiment(cfg) is not None else EXIT_INVALID
        if args.command == "algebra-check":
            result = algebra_check(args.max_twice_s)
            return EXIT_VIOLATION if result["violations"] else EXIT_OK
        if args.command == "export-qasm":
            cfg = resolve_config(args.experiment, initial=args.initial)
            return EXIT_OK if report_qasm(cfg, args.param, args.qasm) else EXIT_INVALID
        if args.command == "error-budget":
            return EXIT_OK if report_budget(args.noise) is not None else EXIT_INVALID
    except SpinQubitsError as exc:
        console.print(f"[red]Error: {exc}[/red]")
        return EXIT_INVALID
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
