"""
Tests for OpenQASM emission and parsing.
"""

import math

import numpy as np
import pytest

from spinqubits.errors import QasmError
from spinqubits.models import IsingSpec, ising_circuit
from spinqubits.qasm import (
    emit_qasm,
    format_angle,
    parse_angle,
    parse_qasm,
    parse_qasm_document,
    read_qasm,
    write_qasm,
)
from spinqubits.statevec import Circuit, Gate, run_circuit
from tests.test_utils import assert_same_up_to_phase, random_circuit

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_emit_empty_circuit():
    assert emit_qasm(Circuit(1)) == HEADER + "qreg q[1];\ncreg c[1];\n"


def test_emit_single_x():
    text = emit_qasm(Circuit(2, (Gate.x(0),)))
    assert text.splitlines()[-1] == "x q[0];"
    assert text.endswith("\n")
    assert "\r" not in text


def test_emit_measure_all():
    text = emit_qasm(Circuit(2, (Gate.cx(0, 1),)), measure_all=True)
    assert text.splitlines()[-3:] == [
        "cx q[0],q[1];",
        "measure q[0] -> c[0];",
        "measure q[1] -> c[1];",
    ]


def test_emit_ising_circuit():
    lines = emit_qasm(ising_circuit(IsingSpec(0.4))).splitlines()
    assert sum(line.startswith("cx ") for line in lines) == 4
    assert "qreg q[3];" in lines


def test_angles_keep_full_precision():
    assert format_angle(math.pi / 2) == "1.5707963267948966"
    assert float(format_angle(0.1)) == 0.1


def test_parse_pi_expression():
    circuit = parse_qasm(HEADER + "qreg q[1];\nrz(pi/2) q[0];\n")
    assert circuit == Circuit(1, (Gate.rz(math.pi / 2, 0),))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("2*pi", 2 * math.pi),
        ("-pi/4 + 0.1", -math.pi / 4 + 0.1),
        ("(1 + 2) * 3", 9.0),
        ("1 + 2 * 3", 7.0),
        ("--1.5", 1.5),
        ("1e-3", 0.001),
        (".5", 0.5),
    ],
)
def test_parse_angle(text, expected):
    assert parse_angle(text) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("text", ["pi/", "2**pi", "tau", "(1"])
def test_parse_angle_rejects_malformed(text):
    with pytest.raises(QasmError):
        parse_angle(text)


def test_parse_document_with_comments_and_measurements():
    text = (
        HEADER
        + "// three qubits\n"
        + "qreg q[3];\n"
        + "creg c[3];\n"
        + "u3(pi/2, 0, 0) q[0];  // preparation\n"
        + "cx q[0], q[2];\n"
        + "measure q[0] -> c[0];\n"
        + "measure q[2] -> c[1];\n"
    )
    document = parse_qasm_document(text)
    assert document.version == "2.0"
    assert document.qreg == ("q", 3)
    assert document.creg == ("c", 3)
    assert document.gates == (Gate.u3(math.pi / 2, 0, 0, 0), Gate.cx(0, 2))
    assert document.measurements == ((0, 0), (2, 1))


def test_unsupported_gate_is_named():
    text = HEADER + "qreg q[2];\ncz q[0],q[1];\n"
    with pytest.raises(QasmError, match="'cz'") as info:
        parse_qasm(text)
    assert info.value.line == 4
    assert info.value.column is not None


def test_error_message_includes_location():
    with pytest.raises(QasmError) as info:
        parse_qasm(HEADER + "qreg q[2];\nx q[5];\n")
    assert str(info.value).startswith("line 4, column")
    assert "out of range" in str(info.value)


@pytest.mark.parametrize("angle", ["pi/", "(pi", "2*(pi/2", "(pi)*(1"])
def test_malformed_angle_is_reported(angle):
    with pytest.raises(QasmError, match="malformed angle expression") as info:
        parse_qasm(HEADER + f"qreg q[1];\nrz({angle}) q[0];\n")
    assert info.value.line == 4


def test_division_by_zero():
    with pytest.raises(QasmError, match="division by zero"):
        parse_qasm(HEADER + "qreg q[1];\nrz(pi/0) q[0];\n")


def test_missing_semicolon():
    with pytest.raises(QasmError, match="syntax error"):
        parse_qasm(HEADER + "qreg q[1];\nx q[0]\nx q[0];\n")


@pytest.mark.parametrize(
    "body,message",
    [
        ("qreg q[2];\nx r[0];\n", "unknown quantum register"),
        ("qreg q[2];\ncreg c[1];\nmeasure q[1] -> c[1];\n", "out of range"),
        ("qreg q[2];\ncx q[1],q[1];\n", "must differ"),
        ("qreg q[2];\nrz q[0];\n", "takes 1 angle"),
        ("qreg q[2];\nx q[0],q[1];\n", "acts on 1 qubit"),
        ("qreg q[2];\nqreg r[2];\n", "only one qreg"),
        ("x q[0];\n", "before any qreg"),
        ("", "declares no qreg"),
    ],
)
def test_semantic_errors(body, message):
    with pytest.raises(QasmError, match=message):
        parse_qasm(HEADER + body)


def test_header_is_required():
    with pytest.raises(QasmError, match="OPENQASM header"):
        parse_qasm("qreg q[1];\n")
    with pytest.raises(QasmError, match="version"):
        parse_qasm('OPENQASM 3.0;\ninclude "qelib1.inc";\nqreg q[1];\n')


def test_random_circuits_round_trip(rng):
    for _ in range(100):
        n_qubits = int(rng.integers(1, 5))
        circuit = random_circuit(rng, n_qubits, int(rng.integers(0, 25)))
        parsed = parse_qasm(emit_qasm(circuit, measure_all=True))
        assert parsed == circuit
        assert_same_up_to_phase(run_circuit(parsed), run_circuit(circuit))


def test_emission_is_deterministic(rng):
    circuit = random_circuit(rng, 3, 20)
    assert emit_qasm(circuit) == emit_qasm(Circuit(3, tuple(circuit.gates)))


def test_write_and_read(tmp_path, rng):
    circuit = random_circuit(rng, 3, 15)
    path = write_qasm(circuit, str(tmp_path / "circuit.qasm"))
    data = (tmp_path / "circuit.qasm").read_bytes()
    assert b"\r" not in data
    assert data.count(b"measure") == 3
    assert read_qasm(path) == circuit
    np.testing.assert_allclose(
        run_circuit(read_qasm(path)).amps, run_circuit(circuit).amps, atol=1e-12
    )
