"""
Noise channels and the error-budget calculator.

Noise is modelled on pure-state trajectories and outcome distributions:
- Readout confusion: a per-qubit row-stochastic 2x2 matrix applied to the
  outcome distribution as a tensor product.
- Gate depolarization: each gate fails with its rate and then fully
  depolarizes the qubits it touched. The channel is unfolded into pure-state
  trajectories (every Pauli string on the touched qubits, equally weighted)
  for all single-fault histories. Multi-fault histories fully mix the qubits
  that noisy gates touch; every other qubit keeps its fault-free marginal.

The error budget adds gate errors, readout errors and the 1/sqrt(shots)
counting-statistics term, all in percent.
"""

from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from spinqubits.errors import DomainError
from spinqubits.spin_algebra import SpinRegister, dicke_basis, singlet_leakage
from spinqubits.statevec import (
    Circuit,
    Gate,
    GateKind,
    StateVector,
    apply_gate,
    exact_probabilities,
    run_circuit,
)

# Pauli operators as gates, up to global phase
_PAULI_GATES = {
    "i": (),
    "x": (Gate.x,),
    "y": (lambda q: Gate.u3(np.pi, np.pi / 2, np.pi / 2, q),),
    "z": (lambda q: Gate.rz(np.pi, q),),
}


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class DeviceParams:
    """
    Average error figures of a device.

    Args:
        single_qubit_gate_error: Error per single-qubit gate (fraction)
        cx_gate_error: Error per CX gate (fraction)
        readout_error_per_qubit: Readout flip probability per qubit (fraction)
        shots: Shots per measured circuit; float("inf") drops the statistics term
    """

    single_qubit_gate_error: float
    cx_gate_error: float
    readout_error_per_qubit: float
    shots: float = 1024

    def __post_init__(self):
        _check_fraction("single_qubit_gate_error", self.single_qubit_gate_error)
        _check_fraction("cx_gate_error", self.cx_gate_error)
        _check_fraction("readout_error_per_qubit", self.readout_error_per_qubit)
        if not self.shots >= 1:
            raise DomainError(f"shots must be >= 1, got {self.shots}")


# Averages reported for the five-qubit device used for the Ising experiment
REFERENCE_DEVICE = DeviceParams(
    single_qubit_gate_error=0.00047,
    cx_gate_error=0.01168,
    readout_error_per_qubit=0.0263,
    shots=1024,
)


@dataclass(frozen=True)
class ReadoutMatrix:
    """
    Per-qubit readout confusion matrices.

    Entry [b, b'] of a qubit's matrix is the probability of reporting b' when
    the true bit is b.
    """

    matrices: Tuple[np.ndarray, ...]

    def __post_init__(self):
        checked = []
        for qubit, matrix in enumerate(self.matrices):
            matrix = np.array(matrix, dtype=float)
            if matrix.shape != (2, 2):
                raise DomainError(f"confusion matrix of qubit {qubit} must be 2x2")
            if np.any(matrix < 0) or np.any(matrix > 1):
                raise DomainError(f"confusion matrix of qubit {qubit} has entries outside [0, 1]")
            if not np.allclose(matrix.sum(axis=1), 1.0, atol=1e-12):
                raise DomainError(f"confusion matrix of qubit {qubit} is not row-stochastic")
            matrix.setflags(write=False)
            checked.append(matrix)
        if not checked:
            raise DomainError("readout model needs at least one qubit")
        object.__setattr__(self, "matrices", tuple(checked))

    @property
    def n_qubits(self) -> int:
        return len(self.matrices)

    @classmethod
    def symmetric(cls, n_qubits: int, flip: float) -> "ReadoutMatrix":
        """Every qubit flips with probability `flip` in either direction."""
        _check_fraction("readout flip probability", flip)
        matrix = np.array([[1 - flip, flip], [flip, 1 - flip]])
        return cls(tuple(matrix for _ in range(n_qubits)))

    @classmethod
    def identity(cls, n_qubits: int) -> "ReadoutMatrix":
        return cls.symmetric(n_qubits, 0.0)

    @classmethod
    def from_device(cls, params: DeviceParams, n_qubits: int) -> "ReadoutMatrix":
        return cls.symmetric(n_qubits, params.readout_error_per_qubit)

    def is_identity(self) -> bool:
        return all(np.array_equal(m, np.eye(2)) for m in self.matrices)


def apply_readout_noise(probs: Sequence[float], readout: ReadoutMatrix) -> np.ndarray:
    """
    Apply the tensor-product confusion to an outcome distribution.

    Args:
        probs: Probabilities of all 2^n outcomes
        readout: Confusion matrices for the n measured qubits

    Returns:
        The distribution of reported outcomes
    """
    probs = np.asarray(probs, dtype=float)
    n = readout.n_qubits
    if probs.shape != (2 ** n,):
        raise DomainError(f"expected {2 ** n} probabilities, got {probs.shape}")
    if readout.is_identity():
        return probs.copy()
    tensor = probs.reshape((2,) * n)
    for qubit, matrix in enumerate(readout.matrices):
        # Contract the true bit of this qubit, then move the reported bit back
        tensor = np.moveaxis(np.tensordot(tensor, matrix, axes=([qubit], [0])), -1, qubit)
    noisy = tensor.reshape(-1)
    return noisy / noisy.sum()


def _gate_rate(gate: Gate, single_rate: float, cx_rate: float) -> float:
    return cx_rate if gate.kind is GateKind.CX else single_rate


def unfold_depolarizing(circuit: Circuit, initial: StateVector, single_rate: float,
                        cx_rate: Optional[float] = None
                        ) -> Tuple[List[Tuple[float, StateVector]], float]:
    """
    Unfold gate depolarization into weighted pure-state trajectories.

    Args:
        circuit: Circuit to run
        initial: Input state
        single_rate: Failure probability of single-qubit gates
        cx_rate: Failure probability of CX gates (defaults to single_rate)

    Returns:
        (list of (weight, final state), weight of multi-fault histories)
    """
    cx_rate = single_rate if cx_rate is None else cx_rate
    _check_fraction("single-qubit depolarizing rate", single_rate)
    _check_fraction("cx depolarizing rate", cx_rate)
    rates = [_gate_rate(gate, single_rate, cx_rate) for gate in circuit]
    survive = [1.0 - rate for rate in rates]

    # State after every prefix of the circuit
    prefixes = []
    state = initial
    for gate in circuit:
        state = apply_gate(state, gate)
        prefixes.append(state)

    trajectories = [(float(np.prod(survive)), state)]
    for index, gate in enumerate(circuit.gates):
        if rates[index] == 0:
            continue
        others = float(np.prod(survive[:index]) * np.prod(survive[index + 1:]))
        strings = list(product(_PAULI_GATES, repeat=len(gate.qubits)))
        weight = rates[index] * others / len(strings)
        tail = Circuit(circuit.n_qubits, circuit.gates[index + 1:])
        for paulis in strings:
            faulty = prefixes[index]
            for label, qubit in zip(paulis, gate.qubits):
                for make in _PAULI_GATES[label]:
                    faulty = apply_gate(faulty, make(qubit))
            trajectories.append((weight, run_circuit(tail, faulty)))

    residual = max(0.0, 1.0 - sum(weight for weight, _ in trajectories))
    return trajectories, residual


def _noisy_qubits(circuit: Circuit, single_rate: float, cx_rate: float) -> Tuple[int, ...]:
    """Qubits acted on by at least one gate with a nonzero failure rate."""
    touched = {
        qubit
        for gate in circuit
        if _gate_rate(gate, single_rate, cx_rate) > 0
        for qubit in gate.qubits
    }
    return tuple(sorted(touched))


def _depolarized_probabilities(state: StateVector, touched: Tuple[int, ...]) -> np.ndarray:
    """Outcome distribution of `state` with the touched qubits fully mixed."""
    probs = exact_probabilities(state).reshape((2,) * state.n_qubits)
    marginal = probs.sum(axis=touched, keepdims=True) / 2 ** len(touched)
    return np.broadcast_to(marginal, probs.shape).reshape(-1)


def _depolarized_leakage(state: StateVector, reg: SpinRegister,
                         touched: Tuple[int, ...]) -> float:
    """
    Singlet leakage of a register whose touched qubits are replaced by the
    maximally mixed state; the rest of the register keeps its reduced state.
    """
    size = reg.spin.qubit_count()
    register = range(reg.start, reg.stop)
    kept = [qubit for qubit in register if qubit not in touched]
    mixed = [qubit - reg.start for qubit in register if qubit in touched]

    tensor = state.amps.reshape((2,) * state.n_qubits)
    traced = [qubit for qubit in range(state.n_qubits) if qubit not in kept]
    rho = np.tensordot(tensor, tensor.conj(), axes=(traced, traced))
    rho = rho.reshape(2 ** len(kept), 2 ** len(kept))

    # Dicke columns with the mixed qubits moved to the back
    basis = dicke_basis(reg.spin).reshape((2,) * size + (-1,))
    basis = np.moveaxis(basis, mixed, list(range(size - len(mixed), size)))
    basis = basis.reshape(2 ** len(kept), 2 ** len(mixed), -1)
    inside = np.einsum("ktm,kl,ltm->", basis, rho, basis).real / 2 ** len(mixed)
    return float(min(1.0, max(0.0, 1.0 - inside)))



def apply_depolarizing(circuit: Circuit, initial: StateVector, single_rate: float,
                       cx_rate: Optional[float] = None) -> np.ndarray:
    """
    Outcome distribution of a circuit whose gates depolarize the qubits they touch.

    Args:
        circuit: Circuit to run
        initial: Input state
        single_rate: Failure probability of single-qubit gates
        cx_rate: Failure probability of CX gates (defaults to single_rate)

    Returns:
        Normalized probability vector over 2^n outcomes
    """
    cx_rate = single_rate if cx_rate is None else cx_rate
    if single_rate == 0 and cx_rate == 0:
        return exact_probabilities(run_circuit(circuit, initial))
    trajectories, residual = unfold_depolarizing(circuit, initial, single_rate, cx_rate)
    probs = np.zeros(2 ** circuit.n_qubits)
    for weight, state in trajectories:
        probs += weight * exact_probabilities(state)
    # trajectories[0] is the fault-free history
    touched = _noisy_qubits(circuit, single_rate, cx_rate)
    probs += residual * _depolarized_probabilities(trajectories[0][1], touched)
    return probs / probs.sum()


def ensemble_leakage(circuit: Circuit, initial: StateVector, reg: SpinRegister,
                     single_rate: float, cx_rate: Optional[float] = None) -> float:
    """
    Singlet leakage of a register averaged over the depolarized ensemble.

    Multi-fault histories count as the fault-free final state with every
    qubit touched by a failing gate fully mixed.
    """
    cx_rate = single_rate if cx_rate is None else cx_rate
    trajectories, residual = unfold_depolarizing(circuit, initial, single_rate, cx_rate)
    leakage = sum(weight * singlet_leakage(state, reg) for weight, state in trajectories)
    if residual > 0:
        touched = _noisy_qubits(circuit, single_rate, cx_rate)
        leakage += residual * _depolarized_leakage(trajectories[0][1], reg, touched)
    return float(leakage)


@dataclass(frozen=True)
class NoiseModel:
    """
    Gate and readout noise applied by the noisy pipeline.

    Args:
        single_qubit_rate: Depolarizing rate of single-qubit gates
        cx_rate: Depolarizing rate of CX gates
        readout_flip: Symmetric readout flip probability per qubit
    """

    single_qubit_rate: float = 0.0
    cx_rate: float = 0.0
    readout_flip: float = 0.0

    def __post_init__(self):
        _check_fraction("single_qubit_rate", self.single_qubit_rate)
        _check_fraction("cx_rate", self.cx_rate)
        _check_fraction("readout_flip", self.readout_flip)

    @classmethod
    def from_device(cls, params: DeviceParams) -> "NoiseModel":
        return cls(
            params.single_qubit_gate_error,
            params.cx_gate_error,
            params.readout_error_per_qubit,
        )

    def is_noiseless(self) -> bool:
        return self.single_qubit_rate == 0 and self.cx_rate == 0 and self.readout_flip == 0


def noisy_probabilities(circuit: Circuit, initial: StateVector,
                        model: NoiseModel) -> np.ndarray:
    """Gate depolarization followed by readout confusion on every qubit."""
    probs = apply_depolarizing(circuit, initial, model.single_qubit_rate, model.cx_rate)
    readout = ReadoutMatrix.symmetric(circuit.n_qubits, model.readout_flip)
    return apply_readout_noise(probs, readout)


def error_budget(n_single_gates: int, n_cx: int, n_measured_qubits: int,
                 params: DeviceParams, include_statistics: bool = True) -> float:
    """
    Additive relative-error estimate of a measured quantity, in percent.

    Args:
        n_single_gates: Number of single-qubit gates in the circuit
        n_cx: Number of CX gates
        n_measured_qubits: Number of qubits read out for the quantity
        params: Device averages
        include_statistics: Add the 1/sqrt(shots) counting-statistics term

    Returns:
        n_single*e_1 + n_cx*e_cx + n_measured*e_readout (+ 1/sqrt(shots)), in percent
    """
    for name, count in (("n_single_gates", n_single_gates), ("n_cx", n_cx),
                        ("n_measured_qubits", n_measured_qubits)):
        if count < 0:
            raise DomainError(f"{name} must be non-negative, got {count}")
    budget = (
        n_single_gates * params.single_qubit_gate_error
        + n_cx * params.cx_gate_error
        + n_measured_qubits * params.readout_error_per_qubit
    )
    if include_statistics:
        budget += 1.0 / np.sqrt(params.shots)
    return float(100.0 * budget)
