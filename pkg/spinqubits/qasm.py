"""
OpenQASM 2.0 emission and parsing for the native gate subset.

Emitted documents look like:

    OPENQASM 2.0;
    include "qelib1.inc";
    qreg q[3];
    creg c[3];
    u3(1.5707963267948966,0,0) q[0];
    cx q[0],q[2];
    rz(0.78539816339744828) q[2];
    measure q[0] -> c[0];

Accepted grammar (one statement per `;`, `//` comments ignored):

    program    := "OPENQASM" VERSION ";" statement*
    statement  := "include" STRING ";"
                | ("qreg" | "creg") ID "[" INT "]" ";"
                | "measure" ID "[" INT "]" "->" ID "[" INT "]" ";"
                | GATE [ "(" expr ("," expr)* ")" ] qubit ("," qubit)* ";"
    GATE       := "id" | "x" | "sx" | "rz" | "u3" | "cx"
    expr       := decimal literals, "pi", unary "-", and + - * / with
                  parentheses and the usual precedence

A document declares exactly one qreg and at most one creg. Angles are emitted
with 17 significant digits so parse(emit(c)) reproduces every angle exactly.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import pyparsing as pp

from spinqubits.errors import QasmError
from spinqubits.statevec import GATE_SIGNATURES, Circuit, Gate, GateKind

QASM_VERSION = "2.0"
QELIB = "qelib1.inc"


def format_angle(angle: float) -> str:
    """Angle literal with 17 significant digits."""
    return f"{angle:.17g}"


def emit_qasm(circuit: Circuit, measure_all: bool = False) -> str:
    """
    Render a circuit as OpenQASM 2.0 text.

    Args:
        circuit: Circuit to emit
        measure_all: Append a measurement of every qubit

    Returns:
        Deterministic document text with LF line endings
    """
    n = circuit.n_qubits
    lines = [
        f"OPENQASM {QASM_VERSION};",
        f'include "{QELIB}";',
        f"qreg q[{n}];",
        f"creg c[{n}];",
    ]
    for gate in circuit:
        args = ",".join(f"q[{q}]" for q in gate.qubits)
        if gate.params:
            params = ",".join(format_angle(p) for p in gate.params)
            lines.append(f"{gate.kind.value}({params}) {args};")
        else:
            lines.append(f"{gate.kind.value} {args};")
    if measure_all:
        lines.extend(f"measure q[{q}] -> c[{q}];" for q in range(n))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class _Statement:
    kind: str
    loc: int
    name: str = ""
    params: Tuple[float, ...] = ()
    args: Tuple[Tuple[str, int], ...] = ()


@dataclass(frozen=True)
class QasmDocument:
    """
    A parsed OpenQASM document.

    Args:
        version: Version string from the header
        qreg: (name, size) of the quantum register
        creg: (name, size) of the classical register, if declared
        gates: Gate statements in order
        measurements: (qubit, bit) pairs of the measure statements
    """

    version: str
    qreg: Tuple[str, int]
    creg: Optional[Tuple[str, int]]
    gates: Tuple[Gate, ...]
    measurements: Tuple[Tuple[int, int], ...] = ()

    def to_circuit(self) -> Circuit:
        return Circuit(self.qreg[1], self.gates)


def _fold_binary(s: str, loc: int, toks: pp.ParseResults) -> float:
    items = toks[0]
    value = items[0]
    for op, operand in zip(items[1::2], items[2::2]):
        if op == "+":
            value += operand
        elif op == "-":
            value -= operand
        elif op == "*":
            value *= operand
        else:
            if operand == 0:
                raise pp.ParseFatalException(s, loc, "division by zero in angle expression")
            value /= operand
    return value


def _angle_expression() -> pp.ParserElement:
    number = pp.Regex(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?").set_parse_action(
        lambda toks: float(toks[0])
    )
    pi = pp.Keyword("pi").set_parse_action(lambda: math.pi)
    return pp.infix_notation(
        number | pi,
        [
            (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, lambda toks: -toks[0][1]),
            (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, _fold_binary),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _fold_binary),
        ],
    ).set_name("angle expression")


def _gate_statement(s: str, loc: int, toks: pp.ParseResults) -> _Statement:
    params = tuple(toks["params"]) if "params" in toks else ()
    args = tuple(tuple(arg) for arg in toks["args"])
    return _Statement("gate", loc, toks["name"], params, args)


def _build_grammar(expr: pp.ParserElement) -> pp.ParserElement:
    lpar, rpar, lbra, rbra, semi = map(pp.Suppress, "()[];")
    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    integer = pp.Word(pp.nums).set_parse_action(lambda toks: int(toks[0]))
    bit_ref = pp.Group(ident + lbra + integer + rbra)

    version = pp.Keyword("OPENQASM") + pp.Regex(r"\d+(\.\d+)?") + semi
    version.set_parse_action(lambda s, loc, toks: _Statement("version", loc, toks[1]))
    include = pp.Keyword("include") + pp.QuotedString('"') + semi
    include.set_parse_action(lambda s, loc, toks: _Statement("include", loc, toks[1]))
    register = (pp.Keyword("qreg") | pp.Keyword("creg")) + ident + lbra + integer + rbra + semi
    register.set_parse_action(
        lambda s, loc, toks: _Statement(toks[0], loc, toks[1], args=((toks[1], toks[2]),))
    )
    measure = pp.Keyword("measure") - bit_ref + pp.Suppress("->") + bit_ref + semi
    measure.set_parse_action(
        lambda s, loc, toks: _Statement(
            "measure", loc, "measure", args=(tuple(toks[1]), tuple(toks[2]))
        )
    )
    params = lpar - pp.Group(pp.DelimitedList(expr))("params") - rpar
    gate = ident("name") + pp.Optional(params) + pp.Group(pp.DelimitedList(bit_ref))("args") + semi
    gate.set_parse_action(_gate_statement)

    program = pp.ZeroOrMore(version | include | register | measure | gate) + pp.StringEnd()
    program.ignore(pp.cpp_style_comment)
    return program


_EXPR = _angle_expression()
_ANGLE = _EXPR + pp.StringEnd()
_GRAMMAR = _build_grammar(_EXPR)


def parse_angle(text: str) -> float:
    """Evaluate an angle expression such as `2*pi` or `-pi/4 + 0.1`."""
    try:
        return float(_ANGLE.parse_string(text.strip(), parse_all=True)[0])
    except pp.ParseBaseException as exc:
        raise QasmError(f"malformed angle expression {text!r}: {exc.msg}") from None


def _syntax_error(text: str, exc: pp.ParseBaseException) -> QasmError:
    head = pp.line(exc.loc, text)[: exc.col - 1]
    if head.count("(") > head.count(")"):
        what = "malformed angle expression"
    else:
        what = "syntax error"
    return QasmError(f"{what}: {exc.msg}", exc.lineno, exc.col)


class _Checker:
    """Semantic checks over parsed statements, raising located QasmErrors."""

    def __init__(self, text: str):
        self.text = text
        self.qreg: Optional[Tuple[str, int]] = None
        self.creg: Optional[Tuple[str, int]] = None

    def error(self, message: str, loc: int) -> QasmError:
        return QasmError(message, pp.lineno(loc, self.text), pp.col(loc, self.text))

    def qubit(self, ref: Tuple[str, int], loc: int) -> int:
        if self.qreg is None:
            raise self.error("qubit used before any qreg declaration", loc)
        name, index = ref
        if name != self.qreg[0]:
            raise self.error(f"unknown quantum register {name!r} (declared {self.qreg[0]!r})", loc)
        if index >= self.qreg[1]:
            raise self.error(f"qubit {name}[{index}] out of range for size {self.qreg[1]}", loc)
        return index

    def bit(self, ref: Tuple[str, int], loc: int) -> int:
        if self.creg is None:
            raise self.error("measure used before any creg declaration", loc)
        name, index = ref
        if name != self.creg[0]:
            raise self.error(f"unknown classical register {name!r} (declared {self.creg[0]!r})", loc)
        if index >= self.creg[1]:
            raise self.error(f"bit {name}[{index}] out of range for size {self.creg[1]}", loc)
        return index

    def gate(self, stmt: _Statement) -> Gate:
        try:
            kind = GateKind(stmt.name)
        except ValueError:
            raise self.error(f"unsupported gate {stmt.name!r}", stmt.loc) from None
        arity, n_params = GATE_SIGNATURES[kind]
        if len(stmt.params) != n_params:
            raise self.error(
                f"{kind.value} takes {n_params} angle(s), got {len(stmt.params)}", stmt.loc
            )
        if len(stmt.args) != arity:
            raise self.error(f"{kind.value} acts on {arity} qubit(s), got {len(stmt.args)}", stmt.loc)
        qubits = tuple(self.qubit(ref, stmt.loc) for ref in stmt.args)
        if kind is GateKind.CX and qubits[0] == qubits[1]:
            raise self.error("cx control and target must differ", stmt.loc)
        return Gate(kind, qubits, stmt.params)


def parse_qasm_document(text: str) -> QasmDocument:
    """
    Parse OpenQASM text into a QasmDocument.

    Args:
        text: Document text within the supported subset

    Returns:
        The parsed document

    Raises:
        QasmError: With line and column of the offending statement
    """
    try:
        statements: List[_Statement] = list(_GRAMMAR.parse_string(text, parse_all=True))
    except pp.ParseBaseException as exc:
        raise _syntax_error(text, exc) from None

    checker = _Checker(text)
    if not statements or statements[0].kind != "version":
        raise QasmError("document must start with an OPENQASM header", 1, 1)
    version = statements[0].name
    if version != QASM_VERSION:
        raise checker.error(f"unsupported OpenQASM version {version}", statements[0].loc)

    gates: List[Gate] = []
    measurements: List[Tuple[int, int]] = []
    for stmt in statements[1:]:
        if stmt.kind == "version":
            raise checker.error("duplicate OPENQASM header", stmt.loc)
        elif stmt.kind == "include":
            if stmt.name != QELIB:
                raise checker.error(f"unsupported include {stmt.name!r}", stmt.loc)
        elif stmt.kind == "qreg":
            if checker.qreg is not None:
                raise checker.error("only one qreg is supported", stmt.loc)
            checker.qreg = stmt.args[0]
        elif stmt.kind == "creg":
            if checker.creg is not None:
                raise checker.error("only one creg is supported", stmt.loc)
            checker.creg = stmt.args[0]
        elif stmt.kind == "measure":
            qubit = checker.qubit(stmt.args[0], stmt.loc)
            measurements.append((qubit, checker.bit(stmt.args[1], stmt.loc)))
        else:
            gates.append(checker.gate(stmt))

    if checker.qreg is None:
        raise QasmError("document declares no qreg", pp.lineno(len(text), text), 1)
    if checker.qreg[1] < 1:
        raise QasmError("qreg must hold at least one qubit")
    return QasmDocument(version, checker.qreg, checker.creg, tuple(gates), tuple(measurements))


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM text into a Circuit; measurements are dropped."""
    return parse_qasm_document(text).to_circuit()


def write_qasm(circuit: Circuit, path: str, measure_all: bool = True) -> str:
    """Write a circuit to a UTF-8 .qasm file with LF endings; returns the path."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(emit_qasm(circuit, measure_all))
    return path


def read_qasm(path: str) -> Circuit:
    """Read and parse a .qasm file."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_qasm(handle.read())
