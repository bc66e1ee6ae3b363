"""
Random states and circuits for property tests, plus phase-insensitive
state comparison.
"""

import numpy as np

from spinqubits.statevec import Circuit, Gate, StateVector


def random_state(rng: np.random.Generator, n_qubits: int) -> StateVector:
    """Haar-like random state from normalized complex Gaussian amplitudes."""
    amps = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def random_circuit(rng: np.random.Generator, n_qubits: int, depth: int) -> Circuit:
    """A circuit of `depth` gates drawn uniformly from every supported kind."""
    gates = []
    for _ in range(depth):
        choice = rng.integers(6) if n_qubits > 1 else rng.integers(5)
        qubit = int(rng.integers(n_qubits))
        if choice == 0:
            gates.append(Gate.id(qubit))
        elif choice == 1:
            gates.append(Gate.x(qubit))
        elif choice == 2:
            gates.append(Gate.sx(qubit))
        elif choice == 3:
            gates.append(Gate.rz(rng.uniform(-2 * np.pi, 2 * np.pi), qubit))
        elif choice == 4:
            theta, phi, lam = rng.uniform(-2 * np.pi, 2 * np.pi, size=3)
            gates.append(Gate.u3(theta, phi, lam, qubit))
        else:
            control, target = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate.cx(int(control), int(target)))
    return Circuit(n_qubits, tuple(gates))


def assert_same_up_to_phase(first, second, atol: float = 1e-12) -> None:
    """Assert two state vectors (or amplitude arrays) differ by a global phase only."""
    a = np.asarray(getattr(first, "amps", first))
    b = np.asarray(getattr(second, "amps", second))
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    np.testing.assert_allclose(a * phase, b, atol=atol)
