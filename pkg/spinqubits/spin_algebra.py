"""
Spin-s encoding on registers of 2s qubits.

This module builds the pieces of the spin-s -> 2s-qubit encoding:
- Half-integer bookkeeping (SpinValue, MagneticQuantumNumber)
- Dicke basis states |s, m> as amplitude vectors
- Collective spin operators S = 1/2 sum_i sigma_i as dense matrices
- Algebra verification (commutators, Casimir, eigen-equations, closure)
- Singlet leakage: weight of a register outside its symmetric subspace

Qubit 0 is the leftmost label of a ket and the most significant bit of the
basis index. Dense operators are a verification tool and are limited to
MAX_DENSE_QUBITS qubits.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import comb

from spinqubits.errors import DomainError
from spinqubits.statevec import StateVector, basis_hamming_weights

ALGEBRA_TOL = 1e-12
NORM_TOL = 1e-10
MAX_DENSE_QUBITS = 12

DenseOperator = np.ndarray

# Pauli vector (sigma^x, sigma^y, sigma^z). The third component is sigma^z; a
# widely copied form of this definition misprints it as sigma^x.
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("x", "y", "z")


@dataclass(frozen=True, order=True)
class SpinValue:
    """
    A spin s stored as the integer 2s.

    Args:
        twice_s: Twice the spin quantum number (1 for spin-1/2, 2 for spin-1, ...)
    """

    twice_s: int

    def __post_init__(self):
        if int(self.twice_s) != self.twice_s or self.twice_s < 1:
            raise DomainError(f"twice_s must be a positive integer, got {self.twice_s}")

    @classmethod
    def from_float(cls, s: float) -> "SpinValue":
        """Build a SpinValue from s given as a float (0.5, 1, 1.5, ...)."""
        twice = 2 * s
        if abs(twice - round(twice)) > 1e-12:
            raise DomainError(f"spin {s} is not a half-integer")
        return cls(int(round(twice)))

    @property
    def s(self) -> float:
        return self.twice_s / 2

    def qubit_count(self) -> int:
        """Number of qubits N = 2s carrying the spin."""
        return self.twice_s

    def dimension(self) -> int:
        """Number of magnetic levels 2s + 1."""
        return self.twice_s + 1

    def magnetic_numbers(self) -> List["MagneticQuantumNumber"]:
        """All m from +s down to -s."""
        return [MagneticQuantumNumber(tm) for tm in range(self.twice_s, -self.twice_s - 1, -2)]

    def casimir_eigenvalue(self) -> float:
        """s(s+1)."""
        return self.s * (self.s + 1)

    def __str__(self) -> str:
        if self.twice_s % 2 == 0:
            return str(self.twice_s // 2)
        return f"{self.twice_s}/2"


@dataclass(frozen=True, order=True)
class MagneticQuantumNumber:
    """A magnetic quantum number m stored as the integer 2m."""

    twice_m: int

    @classmethod
    def from_float(cls, m: float) -> "MagneticQuantumNumber":
        twice = 2 * m
        if abs(twice - round(twice)) > 1e-12:
            raise DomainError(f"magnetic number {m} is not a half-integer")
        return cls(int(round(twice)))

    @property
    def m(self) -> float:
        return self.twice_m / 2

    def validate(self, spin: SpinValue) -> None:
        """Raise DomainError unless m is one of the levels of spin."""
        if abs(self.twice_m) > spin.twice_s or (spin.twice_s - self.twice_m) % 2:
            raise DomainError(f"m={self.m} is not a level of spin {spin}")

    def excitations(self, spin: SpinValue) -> int:
        """Hamming weight s - m of the bitstrings making up |s, m>."""
        self.validate(spin)
        return (spin.twice_s - self.twice_m) // 2


@dataclass(frozen=True)
class SpinRegister:
    """
    A spin held by a contiguous block of 2s qubits inside a circuit.

    Args:
        spin: The spin carried by the register
        start: Index of the first qubit of the block
        pauli: Report eigenvalues of sigma (+-1) instead of S (+-1/2); only
            meaningful for spin-1/2 registers
    """

    spin: SpinValue
    start: int = 0
    pauli: bool = False

    def __post_init__(self):
        if self.start < 0:
            raise DomainError(f"register start must be non-negative, got {self.start}")
        if self.pauli and self.spin.twice_s != 1:
            raise DomainError("the sigma convention applies to spin-1/2 registers only")

    @property
    def stop(self) -> int:
        return self.start + self.spin.qubit_count()

    @property
    def qubits(self) -> range:
        return range(self.start, self.stop)

    def overlaps(self, other: "SpinRegister") -> bool:
        return self.start < other.stop and other.start < self.stop

    def check_fits(self, n_qubits: int) -> None:
        """Raise DomainError if the register does not fit in n_qubits qubits."""
        if self.stop > n_qubits:
            raise DomainError(
                f"register on qubits {self.start}..{self.stop - 1} does not fit "
                f"in {n_qubits} qubits"
            )

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalue reported for each magnetic level, ordered m = s..-s."""
        values = np.array([mq.m for mq in self.spin.magnetic_numbers()])
        return 2 * values if self.pauli else values


@dataclass(frozen=True)
class SpinState:
    """
    A spin-s state given by its amplitudes C_m in the Dicke basis.

    Args:
        spin: The spin value
        amplitudes: Complex amplitudes ordered m = s, s-1, ..., -s
    """

    spin: SpinValue
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.spin.dimension(),):
            raise DomainError(
                f"spin {self.spin} needs {self.spin.dimension()} amplitudes, got {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1) > NORM_TOL:
            raise DomainError(f"spin state is not normalized (norm^2={norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def _guard_dense(spin: SpinValue) -> int:
    n = spin.qubit_count()
    if n > MAX_DENSE_QUBITS:
        raise DomainError(
            f"dense operators are limited to {MAX_DENSE_QUBITS} qubits, spin {spin} needs {n}"
        )
    return n


def _add_pauli_string(op: np.ndarray, axis: str, positions: Tuple[int, ...], n: int) -> None:
    """
    Add sigma^axis on every qubit in `positions` (identity elsewhere) to op.

    A Pauli string has one nonzero entry per column, so it is written through
    index arithmetic on the 2^n basis instead of Kronecker products.
    """
    single = PAULI[axis]
    flip = 0 if axis == "z" else 1
    cols = np.arange(2 ** n)
    rows = cols.copy()
    values = np.ones(2 ** n, dtype=complex)
    for position in positions:
        shift = n - 1 - position
        bits = (cols >> shift) & 1
        rows ^= flip << shift
        values *= single[bits ^ flip, bits]
    op[rows, cols] += values


def dicke_state(spin: SpinValue, m: MagneticQuantumNumber) -> StateVector:
    """
    Return |s, m>: the uniform superposition of all N-bit strings of Hamming
    weight s - m.

    Args:
        spin: The spin value s
        m: The magnetic quantum number

    Returns:
        Normalized StateVector on N = 2s qubits
    """
    k = m.excitations(spin)
    n = spin.qubit_count()
    amps = np.zeros(2 ** n, dtype=complex)
    amps[basis_hamming_weights(n) == k] = 1.0 / np.sqrt(comb(n, k, exact=True))
    return StateVector(n, amps)


def dicke_basis(spin: SpinValue) -> np.ndarray:
    """
    Return the 2^N x (2s+1) matrix whose columns are |s,s>, ..., |s,-s>.

    The columns are real and orthonormal.
    """
    n = spin.qubit_count()
    weights = basis_hamming_weights(n)
    basis = np.zeros((2 ** n, spin.dimension()))
    for column in range(spin.dimension()):
        mask = weights == column
        basis[mask, column] = 1.0 / np.sqrt(comb(n, column, exact=True))
    return basis


def collective_operator(spin: SpinValue, axis: str) -> DenseOperator:
    """
    Return S^axis = 1/2 sum_i sigma_i^axis as a dense 2^N x 2^N matrix.

    Args:
        spin: The spin value
        axis: One of "x", "y", "z"

    Returns:
        Hermitian complex matrix
    """
    if axis not in PAULI:
        raise DomainError(f"unknown axis {axis!r}")
    n = _guard_dense(spin)
    op = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for position in range(n):
        _add_pauli_string(op, axis, (position,), n)
    return op / 2


def ladder_operator(spin: SpinValue, sign: int) -> DenseOperator:
    """Return S^+ (sign=+1) or S^- (sign=-1) = S^x +- i S^y."""
    if sign not in (1, -1):
        raise DomainError(f"ladder sign must be +1 or -1, got {sign}")
    return collective_operator(spin, "x") + sign * 1j * collective_operator(spin, "y")


def casimir_operator(spin: SpinValue) -> DenseOperator:
    """Return S.S = (S^x)^2 + (S^y)^2 + (S^z)^2."""
    total = None
    for axis in AXES:
        op = collective_operator(spin, axis)
        total = op @ op if total is None else total + op @ op
    return total


def casimir_pair_form(spin: SpinValue) -> DenseOperator:
    """
    Return 1/4 (3N I + sum_{i != j} sigma_i . sigma_j), the two-body form of S.S.
    """
    n = _guard_dense(spin)
    pairs = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            for axis in AXES:
                _add_pauli_string(pairs, axis, (i, j), n)
    # sigma_i . sigma_j is symmetric in i, j
    return (3 * n * np.eye(2 ** n, dtype=complex) + 2 * pairs) / 4


def spin_state_to_statevector(state: SpinState) -> StateVector:
    """Return sum_m C_m |s, m> as a qubit state vector."""
    amps = dicke_basis(state.spin) @ state.amplitudes
    return StateVector(state.spin.qubit_count(), amps)


def _register_coefficients(state: StateVector, reg: SpinRegister) -> np.ndarray:
    """Overlaps <s,m|psi> of the register, one row per m, other qubits kept."""
    reg.check_fits(state.n_qubits)
    n = reg.spin.qubit_count()
    before = 2 ** reg.start
    after = 2 ** (state.n_qubits - reg.stop)
    amps = state.amps.reshape(before, 2 ** n, after)
    return np.einsum("akb,km->mab", amps, dicke_basis(reg.spin))


def singlet_leakage(state: StateVector, reg: SpinRegister) -> float:
    """
    Return the probability weight of the register outside its symmetric subspace.

    Args:
        state: Full state of the circuit
        reg: The spin register to inspect

    Returns:
        A probability in [0, 1]; 0 for any state built from Dicke states
    """
    inside = float(np.sum(np.abs(_register_coefficients(state, reg)) ** 2))
    return float(min(1.0, max(0.0, 1.0 - inside)))


def project_to_spin_state(state: StateVector, spin: Optional[SpinValue] = None,
                          tol: float = NORM_TOL) -> SpinState:
    """
    Recover the amplitudes C_m of a state that lives in one register's
    symmetric subspace.

    Args:
        state: A state on exactly 2s qubits
        spin: The spin value (defaults to n_qubits / 2)
        tol: Largest tolerated leakage

    Returns:
        The SpinState with sum_m C_m |s,m> equal to state
    """
    spin = spin or SpinValue(state.n_qubits)
    reg = SpinRegister(spin)
    if spin.qubit_count() != state.n_qubits:
        raise DomainError(f"state has {state.n_qubits} qubits, spin {spin} needs {spin.qubit_count()}")
    leakage = singlet_leakage(state, reg)
    if leakage > tol:
        raise DomainError(f"state leaks {leakage:.3g} out of the symmetric subspace")
    coefficients = _register_coefficients(state, reg)[:, 0, 0]
    return SpinState(spin, coefficients / np.linalg.norm(coefficients))


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def verify_algebra(spin: SpinValue) -> Dict[str, float]:
    """
    Evaluate the defining identities of the encoding for one spin value.

    Args:
        spin: The spin value to check

    Returns:
        Dictionary mapping identity name to its largest residual
    """
    ops = {axis: collective_operator(spin, axis) for axis in AXES}
    basis = dicke_basis(spin)
    casimir = casimir_operator(spin)
    residuals: Dict[str, float] = {}

    residuals["hermiticity"] = max(_max_abs(op - op.conj().T) for op in ops.values())

    # [S^a, S^b] = i eps_abc S^c over cyclic triples
    cyclic: List[Tuple[str, str, str]] = [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]
    residuals["commutators"] = max(
        _max_abs(ops[a] @ ops[b] - ops[b] @ ops[a] - 1j * ops[c]) for a, b, c in cyclic
    )

    residuals["casimir_pair_form"] = _max_abs(casimir - casimir_pair_form(spin))

    eigen = spin.casimir_eigenvalue()
    casimir_res = 0.0
    sz_res = 0.0
    closure_res = 0.0
    for column, mq in enumerate(spin.magnetic_numbers()):
        ket = basis[:, column]
        casimir_res = max(casimir_res, float(np.linalg.norm(casimir @ ket - eigen * ket)))
        sz_res = max(sz_res, float(np.linalg.norm(ops["z"] @ ket - mq.m * ket)))
        for op in ops.values():
            image = op @ ket
            closure_res = max(closure_res, float(np.linalg.norm(image - basis @ (basis.T @ image))))
    residuals["casimir"] = casimir_res
    residuals["sz_eigen"] = sz_res
    residuals["closure"] = closure_res
    residuals["orthonormality"] = _max_abs(basis.T @ basis - np.eye(basis.shape[1]))
    return residuals


def embedded_operator(reg: SpinRegister, axis: str, n_qubits: int) -> DenseOperator:
    """
    Return the register's S^axis (sigma^axis for a pauli register) acting on
    the full n-qubit space.

    Args:
        reg: The spin register
        axis: One of "x", "y", "z"
        n_qubits: Total number of qubits of the circuit

    Returns:
        Dense 2^n x 2^n matrix
    """
    reg.check_fits(n_qubits)
    if n_qubits > MAX_DENSE_QUBITS:
        raise DomainError(f"dense operators are limited to {MAX_DENSE_QUBITS} qubits")
    op = collective_operator(reg.spin, axis)
    if reg.pauli:
        op = 2 * op
    left = np.eye(2 ** reg.start, dtype=complex)
    right = np.eye(2 ** (n_qubits - reg.stop), dtype=complex)
    return np.kron(left, np.kron(op, right))
