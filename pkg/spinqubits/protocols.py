"""
Measurement protocols for spins encoded in qubit registers.

Hardware measures every qubit along z. To read a spin component along x or y
the register is first rotated so that the wanted component lands on z:

    S^x = e^{-i pi/2 S^y} S^z e^{i pi/2 S^y}
    S^y = e^{i pi/2 S^x} S^z e^{-i pi/2 S^x}

The rotation factorizes into one single-qubit gate per qubit of the register.
After the measurement, bitstrings are grouped by the Hamming weight of their
restriction to the register, which gives |C_m|^2 for m = s - weight.

Estimators work from exact probabilities (mode "exact", stderr 0) or from shot
counts (mode "sampled", stderr from multinomial propagation).
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from spinqubits.errors import DomainError
from spinqubits.spin_algebra import SpinRegister, SpinValue
from spinqubits.statevec import (
    Circuit,
    Gate,
    SeedLike,
    ShotCounts,
    StateVector,
    derive_seed,
    exact_probabilities,
    run_circuit,
    sample_counts,
)

__all__ = [
    "SpinRegister",
    "SpinValue",
    "Estimate",
    "axis_rotation_fragment",
    "measurement_circuit",
    "magnetic_numbers_from_counts",
    "estimate_from_counts",
    "mean_component",
    "mean_vector",
    "vector_magnitude",
    "correlation",
]

# Single-qubit factors of the pre-measurement rotations, as U3 angles.
# x: e^{i pi/4 sigma^y}; y: e^{-i pi/4 sigma^x}
_ROTATION_ANGLES = {
    "x": (-np.pi / 2, 0.0, 0.0),
    "y": (np.pi / 2, -np.pi / 2, np.pi / 2),
}

ProbabilityData = Union[ShotCounts, np.ndarray, Sequence[float]]


@dataclass(frozen=True)
class Estimate:
    """
    A measured expectation value.

    Args:
        value: Estimated value
        stderr: Standard error (0 in exact mode)
        mode: "exact" or "sampled"
        shots: Number of shots behind a sampled estimate
    """

    value: float
    stderr: float = 0.0
    mode: str = "exact"
    shots: Optional[int] = None

    def __post_init__(self):
        if self.stderr < 0:
            raise DomainError(f"stderr must be non-negative, got {self.stderr}")
        if self.mode not in ("exact", "sampled"):
            raise DomainError(f"unknown estimate mode {self.mode!r}")
        if self.mode == "sampled" and not self.shots:
            raise DomainError("sampled estimates must record their shot count")


def axis_rotation_fragment(reg: SpinRegister, axis: str,
                           n_qubits: Optional[int] = None) -> Circuit:
    """
    Return the gates that rotate the register's `axis` component onto z.

    Args:
        reg: The spin register
        axis: One of "x", "y", "z"
        n_qubits: Width of the returned fragment (defaults to the register end)

    Returns:
        A Circuit with 2s single-qubit gates for x and y, empty for z
    """
    n_qubits = n_qubits or reg.stop
    reg.check_fits(n_qubits)
    if axis == "z":
        return Circuit(n_qubits)
    if axis not in _ROTATION_ANGLES:
        raise DomainError(f"unknown axis {axis!r}")
    theta, phi, lam = _ROTATION_ANGLES[axis]
    return Circuit(n_qubits, tuple(Gate.u3(theta, phi, lam, q) for q in reg.qubits))


def _check_disjoint(registers: Sequence[SpinRegister]) -> None:
    for i, first in enumerate(registers):
        for second in registers[i + 1:]:
            if first.overlaps(second):
                raise DomainError(
                    f"registers on qubits {list(first.qubits)} and "
                    f"{list(second.qubits)} overlap"
                )


def measurement_circuit(settings: Sequence[Tuple[SpinRegister, str]],
                        n_qubits: int) -> Circuit:
    """Concatenate the rotation fragments of several disjoint registers."""
    _check_disjoint([reg for reg, _ in settings])
    circuit = Circuit(n_qubits)
    for reg, axis in settings:
        circuit = circuit + axis_rotation_fragment(reg, axis, n_qubits)
    return circuit


def _as_probabilities(data: ProbabilityData) -> Tuple[np.ndarray, int, Optional[int]]:
    """Probability vector, qubit count and (for counts) shot number."""
    if isinstance(data, ShotCounts):
        return data.frequencies(), data.n_qubits, data.shots
    probs = np.asarray(data, dtype=float)
    n_qubits = int(round(np.log2(probs.size))) if probs.size else 0
    if probs.ndim != 1 or probs.size < 2 or 2 ** n_qubits != probs.size:
        raise DomainError(f"probability vector length {probs.size} is not a power of two")
    return probs, n_qubits, None


def _weight_classes(reg: SpinRegister, n_qubits: int) -> np.ndarray:
    """Hamming weight of every basis index restricted to the register (= s - m)."""
    reg.check_fits(n_qubits)
    index = np.arange(2 ** n_qubits)
    classes = np.zeros(2 ** n_qubits, dtype=np.int64)
    for qubit in reg.qubits:
        classes += (index >> (n_qubits - 1 - qubit)) & 1
    return classes


def _outcome_values(registers: Sequence[SpinRegister], n_qubits: int) -> np.ndarray:
    """Product of the registers' eigenvalues for every measured bitstring."""
    values = np.ones(2 ** n_qubits)
    for reg in registers:
        values = values * reg.eigenvalues()[_weight_classes(reg, n_qubits)]
    return values


def magnetic_numbers_from_counts(data: ProbabilityData, reg: SpinRegister) -> np.ndarray:
    """
    Aggregate measured probabilities into |C_m|^2 for one register.

    Args:
        data: ShotCounts or a probability vector over all measured qubits
        reg: The spin register

    Returns:
        Array of |C_m|^2 ordered m = s, s-1, ..., -s
    """
    probs, n_qubits, _ = _as_probabilities(data)
    classes = _weight_classes(reg, n_qubits)
    return np.bincount(classes, weights=probs, minlength=reg.spin.dimension())


def _estimate(data: ProbabilityData, registers: Sequence[SpinRegister]) -> Estimate:
    probs, n_qubits, shots = _as_probabilities(data)
    values = _outcome_values(registers, n_qubits)
    mean = float(np.dot(values, probs))
    if shots is None:
        return Estimate(mean)
    variance = max(0.0, float(np.dot(values ** 2, probs)) - mean ** 2)
    return Estimate(mean, float(np.sqrt(variance / shots)), "sampled", shots)


def estimate_from_counts(data: ProbabilityData, *registers: SpinRegister) -> Estimate:
    """
    Evaluate sum m m' ... P(m, m', ...) over already-rotated measurement data.

    With one register this is the mean of its z component, with two the zz
    correlation. ShotCounts give a sampled estimate with stderr.
    """
    _check_disjoint(registers)
    return _estimate(data, registers)


def _measure(state: StateVector, settings: Sequence[Tuple[SpinRegister, str]],
             shots: Optional[int], seed: SeedLike) -> Estimate:
    rotated = run_circuit(measurement_circuit(settings, state.n_qubits), state)
    registers = [reg for reg, _ in settings]
    if shots is None:
        return _estimate(exact_probabilities(rotated), registers)
    return _estimate(sample_counts(rotated, shots, seed), registers)


def mean_component(state: StateVector, reg: SpinRegister, axis: str,
                   shots: Optional[int] = None, seed: SeedLike = 0) -> Estimate:
    """
    Measure <S^axis> of one register.

    Args:
        state: Pre-measurement state of the circuit
        reg: The spin register
        axis: One of "x", "y", "z"
        shots: Number of shots; None for exact probabilities
        seed: Seed for sampling

    Returns:
        Estimate of sum_m m |C_m|^2 after the axis rotation
    """
    return _measure(state, [(reg, axis)], shots, seed)


def vector_magnitude(components: Sequence[Estimate]) -> Estimate:
    """Euclidean norm of three component estimates with propagated stderr."""
    values = np.array([est.value for est in components])
    errors = np.array([est.stderr for est in components])
    magnitude = float(np.linalg.norm(values))
    sampled = [est for est in components if est.mode == "sampled"]
    if not sampled:
        return Estimate(magnitude)
    if magnitude > 0:
        stderr = float(np.sqrt(np.sum((values / magnitude) ** 2 * errors ** 2)))
    else:
        stderr = float(np.sqrt(np.sum(errors ** 2)))
    return Estimate(magnitude, stderr, "sampled", sampled[0].shots)


def mean_vector(state: StateVector, reg: SpinRegister, shots: Optional[int] = None,
                seed: SeedLike = 0) -> Tuple[np.ndarray, Estimate]:
    """
    Measure all three components of a register's spin.

    Each component is measured on its own copy of the pre-measurement state,
    with its own seed stream in sampled mode.

    Returns:
        (vector of <S^x>, <S^y>, <S^z>, magnitude estimate)
    """
    components: List[Estimate] = [
        mean_component(state, reg, axis, shots, derive_seed(seed, index))
        for index, axis in enumerate(("x", "y", "z"))
    ]
    return np.array([est.value for est in components]), vector_magnitude(components)


def correlation(state: StateVector, reg_i: SpinRegister, reg_j: SpinRegister,
                axis_i: str, axis_j: str, shots: Optional[int] = None,
                seed: SeedLike = 0) -> Estimate:
    """
    Measure the correlation <S_i^axis_i S_j^axis_j> between two registers.

    A spin-1/2 register built with pauli=True contributes sigma (+-1) instead
    of S (+-1/2).

    Args:
        state: Pre-measurement state of the circuit
        reg_i: First register
        reg_j: Second register, disjoint from the first
        axis_i: Component measured on reg_i
        axis_j: Component measured on reg_j
        shots: Number of shots; None for exact probabilities
        seed: Seed for sampling

    Returns:
        Estimate of sum_{m, m'} m m' P(m on reg_i, m' on reg_j)
    """
    return _measure(state, [(reg_i, axis_i), (reg_j, axis_j)], shots, seed)
