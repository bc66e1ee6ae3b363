#!/usr/bin/env python3
"""
End-to-end smoke run of the spin-qubit simulator.
Runs both experiments through the CLI into a temporary directory and checks
the files they leave behind.
"""

import os
import sys
import tempfile

from rich.console import Console
from rich.table import Table

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cli import EXIT_OK, main  # noqa: E402
from spinqubits.qasm import read_qasm  # noqa: E402

console = Console()


def run_magfield(workdir):
    """Sampled magnetic-field sweep with CSV, SVG and QASM output."""
    console.print("\n===== MAGNETIC FIELD SWEEP =====")
    outputs = {kind: os.path.join(workdir, f"magfield.{kind}") for kind in ("csv", "svg", "qasm")}
    code = main([
        "magfield", "--initial", "m=+1", "--shots", "1024", "--seed", "7",
        "--csv", outputs["csv"], "--svg", outputs["svg"], "--qasm", outputs["qasm"],
    ])
    if code != EXIT_OK:
        console.print(f"\n❌ FAILURE: magfield exited with {code}")
        return False

    with open(outputs["csv"], encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if len(lines) != 42:
        console.print(f"\n❌ FAILURE: expected 42 CSV lines, found {len(lines)}")
        return False
    circuit = read_qasm(outputs["qasm"])
    console.print(f"QASM circuit has {len(circuit)} gates on {circuit.n_qubits} qubits")
    console.print("\n✅ SUCCESS: magnetic field sweep wrote all outputs")
    return True


def run_ising(workdir):
    """Ising sweep under the reference device noise."""
    console.print("\n===== NOISY ISING SWEEP =====")
    device = os.path.join(workdir, "device.txt")
    with open(device, "w", encoding="utf-8") as handle:
        handle.write(
            "single_qubit_gate_error=0.00047\ncx_gate_error=0.01168\n"
            "readout_error=0.0263\nshots=1024\n"
        )
    csv_path = os.path.join(workdir, "ising.csv")
    code = main(["ising", "--steps", "21", "--exact", "--noise", device, "--csv", csv_path])
    if code != EXIT_OK:
        console.print(f"\n❌ FAILURE: ising exited with {code}")
        return False
    console.print("\n✅ SUCCESS: noisy Ising sweep finished")
    return True


def run_checks():
    """Algebra self-check and error budget."""
    console.print("\n===== SELF-CHECKS =====")
    algebra = main(["algebra-check", "--max-twice-s", "6"])
    budget = main(["error-budget"])
    return algebra == EXIT_OK and budget == EXIT_OK


if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as workdir:
        results = {
            "magfield": run_magfield(workdir),
            "ising": run_ising(workdir),
            "checks": run_checks(),
        }

    table = Table(title="End-to-end summary")
    table.add_column("step")
    table.add_column("result")
    for step, ok in results.items():
        table.add_row(step, "[green]ok[/green]" if ok else "[red]failed[/red]")
    console.print(table)
    sys.exit(0 if all(results.values()) else 1)
