"""
Exception types for the spinqubits package.

Library code raises these; the experiments layer catches them and reports
them on the console.
"""

from typing import Optional


class SpinQubitsError(Exception):
    """Base class for all errors raised by spinqubits."""


class DomainError(SpinQubitsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(SpinQubitsError):
    """A configuration or device parameter file is invalid."""


class ExportError(SpinQubitsError):
    """An output file (CSV, SVG, QASM) could not be written."""


class QasmError(SpinQubitsError):
    """
    An OpenQASM document could not be parsed.

    Args:
        message: Description of the problem
        line: 1-based line number of the offending statement
        column: 1-based column number inside that line
    """

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column}: {self.message}"
