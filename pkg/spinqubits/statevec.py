"""
Statevector execution engine.

This module holds the circuit model and everything needed to execute it:
- StateVector, Gate, Circuit and ShotCounts value types
- The U3 gate matrix and its five-gate native decomposition
- Gate kernels over 2^n amplitudes (strided pair updates, bit-masked CX)
- Circuit evaluation, exact probabilities and seeded shot sampling

Public operations are pure: kernels work in place on a private copy of the
amplitudes. Qubit 0 is the most significant bit of the basis index.

Sampling uses numpy's PCG64 bit generator seeded through SeedSequence, so
counts are reproducible across platforms; per-task streams are derived with
SeedSequence spawn keys.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from spinqubits.errors import DomainError

MAX_QUBITS = 24
NORM_TOL = 1e-10

SeedLike = Union[int, np.random.SeedSequence]


@lru_cache(maxsize=None)
def _hamming_weights(n: int) -> np.ndarray:
    index = np.arange(2 ** n)
    weights = np.zeros(2 ** n, dtype=np.int64)
    for bit in range(n):
        weights += (index >> bit) & 1
    weights.setflags(write=False)
    return weights


def basis_hamming_weights(n: int) -> np.ndarray:
    """Number of 1 bits of every basis index 0 .. 2^n - 1 (read-only array)."""
    return _hamming_weights(n)


def bitstring(index: int, n_qubits: int) -> str:
    """Ket label of a basis index, qubit 0 first."""
    return format(index, f"0{n_qubits}b")


@dataclass(frozen=True)
class StateVector:
    """
    A normalized vector of 2^n complex amplitudes.

    Args:
        n_qubits: Number of qubits
        amps: Amplitudes indexed by basis state (qubit 0 most significant)
    """

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DomainError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (2 ** self.n_qubits,):
            raise DomainError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm^2={norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The all-zeros basis state |0...0>."""
        return cls.from_label("0" * n_qubits)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """A computational basis state from its ket label, e.g. "010"."""
        if not label or set(label) - {"0", "1"}:
            raise DomainError(f"invalid basis label {label!r}")
        amps = np.zeros(2 ** len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(len(label), amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        """Product state self (x) other; self's qubits come first."""
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amps, other.amps))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amps, other.amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


class GateKind(str, Enum):
    """Gate names, spelled as in OpenQASM."""

    ID = "id"
    X = "x"
    SX = "sx"
    RZ = "rz"
    CX = "cx"
    U3 = "u3"


# Number of qubits and angle parameters per gate kind
GATE_SIGNATURES: Dict[GateKind, Tuple[int, int]] = {
    GateKind.ID: (1, 0),
    GateKind.X: (1, 0),
    GateKind.SX: (1, 0),
    GateKind.RZ: (1, 1),
    GateKind.CX: (2, 0),
    GateKind.U3: (1, 3),
}

_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """
    Return the 2x2 matrix of U(theta, phi, lambda).

    [[cos(t/2), -e^{i lam} sin(t/2)], [e^{i phi} sin(t/2), e^{i(lam+phi)} cos(t/2)]]
    """
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (lam + phi)) * c],
        ],
        dtype=complex,
    )


def rz_matrix(phi: float) -> np.ndarray:
    """RZ(phi) = diag(e^{-i phi/2}, e^{i phi/2})."""
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


@dataclass(frozen=True)
class Gate:
    """
    One gate of a circuit.

    Args:
        kind: Gate name
        qubits: Qubit indices (control first for CX)
        params: Angles in radians (phi for RZ; theta, phi, lambda for U3)
    """

    kind: GateKind
    qubits: Tuple[int, ...]
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity, n_params = GATE_SIGNATURES[kind]
        if len(self.qubits) != arity:
            raise DomainError(f"{kind.value} acts on {arity} qubit(s), got {self.qubits}")
        if len(self.params) != n_params:
            raise DomainError(f"{kind.value} takes {n_params} angle(s), got {self.params}")
        if any(q < 0 for q in self.qubits):
            raise DomainError(f"negative qubit index in {self.qubits}")
        if kind is GateKind.CX and self.qubits[0] == self.qubits[1]:
            raise DomainError("cx control and target must differ")
        if not all(np.isfinite(self.params)):
            raise DomainError(f"non-finite angle in {self.params}")

    @classmethod
    def id(cls, qubit: int) -> "Gate":
        return cls(GateKind.ID, (qubit,))

    @classmethod
    def x(cls, qubit: int) -> "Gate":
        return cls(GateKind.X, (qubit,))

    @classmethod
    def sx(cls, qubit: int) -> "Gate":
        return cls(GateKind.SX, (qubit,))

    @classmethod
    def rz(cls, phi: float, qubit: int) -> "Gate":
        return cls(GateKind.RZ, (qubit,), (phi,))

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CX, (control, target))

    @classmethod
    def u3(cls, theta: float, phi: float, lam: float, qubit: int) -> "Gate":
        return cls(GateKind.U3, (qubit,), (theta, phi, lam))

    def matrix(self) -> np.ndarray:
        """Unitary of the gate; 4x4 in (control, target) order for CX."""
        if self.kind is GateKind.ID:
            return np.eye(2, dtype=complex)
        if self.kind is GateKind.X:
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind is GateKind.SX:
            return _SX.copy()
        if self.kind is GateKind.RZ:
            return rz_matrix(self.params[0])
        if self.kind is GateKind.U3:
            return u3_matrix(*self.params)
        return _CX.copy()

    def is_single_qubit(self) -> bool:
        return self.kind is not GateKind.CX


@dataclass(frozen=True)
class Circuit:
    """
    An ordered list of gates over n qubits.

    Args:
        n_qubits: Number of qubits
        gates: Gates in application order
    """

    n_qubits: int
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DomainError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        gates = tuple(self.gates)
        for gate in gates:
            if max(gate.qubits) >= self.n_qubits:
                raise DomainError(
                    f"{gate.kind.value} on {gate.qubits} is out of range for "
                    f"{self.n_qubits} qubits"
                )
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DomainError(
                f"cannot join circuits on {self.n_qubits} and {other.n_qubits} qubits"
            )
        return Circuit(self.n_qubits, self.gates + other.gates)

    def extended(self, gates: Iterable[Gate]) -> "Circuit":
        """A new circuit with gates appended."""
        return Circuit(self.n_qubits, self.gates + tuple(gates))


@dataclass(frozen=True)
class ShotCounts:
    """
    Measured bitstrings of a finite-shot run.

    Args:
        n_qubits: Number of measured qubits
        shots: Total number of shots
        counts: Map from bitstring (qubit 0 first) to number of occurrences
    """

    n_qubits: int
    shots: int
    counts: Dict[str, int]

    def __post_init__(self):
        if self.shots < 1:
            raise DomainError(f"shots must be >= 1, got {self.shots}")
        for key, value in self.counts.items():
            if len(key) != self.n_qubits or set(key) - {"0", "1"}:
                raise DomainError(f"invalid bitstring {key!r} for {self.n_qubits} qubits")
            if value < 0:
                raise DomainError(f"negative count for {key!r}")
        if sum(self.counts.values()) != self.shots:
            raise DomainError(
                f"counts sum to {sum(self.counts.values())}, expected {self.shots}"
            )

    def frequencies(self) -> np.ndarray:
        """Empirical probability of every basis index."""
        freqs = np.zeros(2 ** self.n_qubits)
        for key, value in self.counts.items():
            freqs[int(key, 2)] = value
        return freqs / self.shots


def u3_decompose(theta: float, phi: float, lam: float, qubit: int = 0) -> Tuple[Gate, ...]:
    """
    Compile U(theta, phi, lambda) into native gates.

    The operator product RZ(phi+pi) SX RZ(theta-pi) SX RZ(lambda) is returned
    in application order, so RZ(lambda) comes first. The product equals
    u3_matrix up to a global phase.
    """
    return (
        Gate.rz(lam, qubit),
        Gate.sx(qubit),
        Gate.rz(theta - np.pi, qubit),
        Gate.sx(qubit),
        Gate.rz(phi + np.pi, qubit),
    )


def u3_angles_from_matrix(unitary: np.ndarray) -> Tuple[float, float, float]:
    """
    Return (theta, phi, lambda) with U3(theta, phi, lambda) equal to a 2x2
    unitary up to a global phase.
    """
    unitary = np.asarray(unitary, dtype=complex)
    a, b = unitary[0]
    c, d = unitary[1]
    theta = 2 * np.arctan2(abs(c), abs(a))
    if abs(c) < 1e-12:
        # Diagonal: only phi + lambda is fixed
        return float(theta), 0.0, float(np.angle(d) - np.angle(a))
    if abs(a) < 1e-12:
        return float(theta), float(np.angle(c)), float(np.angle(-b))
    phi = np.angle(c) - np.angle(a)
    lam = np.angle(-b) - np.angle(a)
    return float(theta), float(phi), float(lam)


@lru_cache(maxsize=None)
def _cx_pairs(n: int, control: int, target: int) -> np.ndarray:
    index = np.arange(2 ** n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    pairs = index[((index & cbit) != 0) & ((index & tbit) == 0)]
    pairs.setflags(write=False)
    return pairs


def _apply_in_place(amps: np.ndarray, n: int, gate: Gate) -> None:
    if gate.kind is GateKind.ID:
        return
    if gate.kind is GateKind.CX:
        control, target = gate.qubits
        low = _cx_pairs(n, control, target)
        high = low | (1 << (n - 1 - target))
        amps[low], amps[high] = amps[high], amps[low].copy()
        return
    qubit = gate.qubits[0]
    view = amps.reshape(2 ** qubit, 2, 2 ** (n - qubit - 1))
    m = gate.matrix()
    if gate.kind is GateKind.RZ:
        view[:, 0, :] *= m[0, 0]
        view[:, 1, :] *= m[1, 1]
        return
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    view[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def _check_gate(gate: Gate, n_qubits: int) -> None:
    if max(gate.qubits) >= n_qubits:
        raise DomainError(
            f"{gate.kind.value} on {gate.qubits} is out of range for {n_qubits} qubits"
        )


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """
    Apply one gate and return the new state; the input is left unchanged.

    Args:
        state: Input state
        gate: Gate to apply

    Returns:
        The evolved StateVector
    """
    _check_gate(gate, state.n_qubits)
    amps = state.amps.copy()
    _apply_in_place(amps, state.n_qubits, gate)
    return StateVector(state.n_qubits, amps)


def run_circuit(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    """
    Evaluate a circuit on an initial state (|0...0> by default).

    Args:
        circuit: Circuit to run
        initial: Input state on the same number of qubits

    Returns:
        The final StateVector
    """
    initial = initial or StateVector.zero(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise DomainError(
            f"circuit has {circuit.n_qubits} qubits, initial state has {initial.n_qubits}"
        )
    amps = initial.amps.copy()
    for gate in circuit:
        _apply_in_place(amps, circuit.n_qubits, gate)
    return StateVector(circuit.n_qubits, amps)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a small circuit, built column by column with the kernels."""
    if circuit.n_qubits > 12:
        raise DomainError("circuit_unitary is limited to 12 qubits")
    dim = 2 ** circuit.n_qubits
    unitary = np.eye(dim, dtype=complex)
    for column in range(dim):
        column_amps = unitary[:, column].copy()
        for gate in circuit:
            _apply_in_place(column_amps, circuit.n_qubits, gate)
        unitary[:, column] = column_amps
    return unitary


def exact_probabilities(state: StateVector) -> np.ndarray:
    """|amplitude|^2 of every basis index."""
    return np.abs(state.amps) ** 2


def derive_seed(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    """
    Derive an independent seed stream for a sub-task (sweep point, estimator).

    Identical (seed, keys) always give the same stream, regardless of the
    order in which tasks run.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(keys)
        )
    return np.random.SeedSequence(int(seed), spawn_key=tuple(keys))


def make_rng(seed: SeedLike) -> np.random.Generator:
    """PCG64 generator for a seed or SeedSequence."""
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(sequence))


def sample_probabilities(probs: Sequence[float], n_qubits: int, shots: int,
                         seed: SeedLike) -> ShotCounts:
    """
    Draw shots from a probability vector over 2^n_qubits outcomes.

    Args:
        probs: Outcome probabilities (renormalized before sampling)
        n_qubits: Number of measured qubits
        shots: Number of shots, at least 1
        seed: Integer seed or SeedSequence

    Returns:
        ShotCounts with bitstrings sorted in basis order
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    if p.shape != (2 ** n_qubits,):
        raise DomainError(f"expected {2 ** n_qubits} probabilities, got {p.shape}")
    p = p / p.sum()
    drawn = make_rng(seed).multinomial(shots, p)
    counts = {
        bitstring(index, n_qubits): int(value)
        for index, value in enumerate(drawn)
        if value
    }
    return ShotCounts(n_qubits, shots, counts)


def sample_counts(state: StateVector, shots: int, seed: SeedLike) -> ShotCounts:
    """
    Measure every qubit of a state `shots` times.

    Args:
        state: State to measure
        shots: Number of shots, at least 1
        seed: Integer seed or SeedSequence; identical inputs give identical counts

    Returns:
        ShotCounts drawn from exact_probabilities(state)
    """
    return sample_probabilities(exact_probabilities(state), state.n_qubits, shots, seed)


def compile_native(circuit: Circuit) -> Circuit:
    """Rewrite every U3 gate into the native {rz, sx} sequence."""
    gates = []
    for gate in circuit:
        if gate.kind is GateKind.U3:
            gates.extend(u3_decompose(*gate.params, qubit=gate.qubits[0]))
        else:
            gates.append(gate)
    return Circuit(circuit.n_qubits, tuple(gates))


def gate_census(circuit: Circuit, native: bool = False) -> Tuple[int, int]:
    """
    Count the gates of a circuit.

    Args:
        circuit: Circuit to inspect
        native: Count after compiling U3 gates into native gates

    Returns:
        (number of single-qubit gates, number of CX gates)
    """
    if native:
        circuit = compile_native(circuit)
    n_cx = sum(1 for gate in circuit if gate.kind is GateKind.CX)
    return len(circuit) - n_cx, n_cx
