"""
Experiment circuits and their closed-form predictions.

Two experiments are modelled:
- A spin-1 in a magnetic field, H = omega S.n, evolved by one U3 gate per qubit
- A spin-1 coupled to a spin-1/2 by the Ising interaction H = J S_1^z sigma_2^z,
  on three qubits (qubits 0-1 carry the spin-1, qubit 2 the spin-1/2)

Time only enters through the dimensionless products omega*t and J*t.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from spinqubits.errors import DomainError
from spinqubits.spin_algebra import (
    PAULI,
    MagneticQuantumNumber,
    SpinRegister,
    SpinValue,
    dicke_state,
)
from spinqubits.statevec import Circuit, Gate, StateVector, u3_angles_from_matrix

SPIN_ONE = SpinValue(2)
SPIN_HALF = SpinValue(1)

# Register layout of the Ising experiment
ISING_QUBITS = 3
SPIN_ONE_REGISTER = SpinRegister(SPIN_ONE, 0)
SPIN_HALF_REGISTER = SpinRegister(SPIN_HALF, 2, pauli=True)

FIELD_INITIAL_LEVELS = (1, 0, -1)


@dataclass(frozen=True)
class FieldSpec:
    """
    A magnetic field acting for a time t.

    Args:
        omega_t: The product omega*t in radians
        n: Unit vector along the field
    """

    omega_t: float
    n: Tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        n = tuple(float(c) for c in self.n)
        if len(n) != 3:
            raise DomainError(f"field direction needs 3 components, got {self.n}")
        if abs(np.linalg.norm(n) - 1) > 1e-12:
            raise DomainError(f"field direction {n} is not a unit vector")
        if not np.isfinite(self.omega_t):
            raise DomainError("omega_t must be finite")
        object.__setattr__(self, "n", n)

    @property
    def transverse(self) -> bool:
        """True when the field lies in the xy-plane."""
        return abs(self.n[2]) <= 1e-12


@dataclass(frozen=True)
class IsingSpec:
    """
    Ising coupling acting for a time t.

    Args:
        jt: The product J*t in radians
    """

    jt: float

    def __post_init__(self):
        if not np.isfinite(self.jt):
            raise DomainError("jt must be finite")


def field_evolution_matrix(spec: FieldSpec) -> np.ndarray:
    """Single-qubit factor cos(wt/2) I - i sin(wt/2) sigma.n of the evolution."""
    sigma_n = sum(component * PAULI[axis] for component, axis in zip(spec.n, "xyz"))
    half = spec.omega_t / 2
    return np.cos(half) * np.eye(2) - 1j * np.sin(half) * sigma_n


def field_gate_angles(spec: FieldSpec, strict: bool = True) -> Tuple[float, float, float]:
    """
    U3 angles of the single-qubit evolution.

    For a transverse field: theta = omega*t, phi = atan(n_y/n_x) - pi/2,
    lambda = -atan(n_y/n_x) + pi/2. Other directions are only accepted with
    strict=False and go through the closed-form evolution matrix.
    """
    if spec.transverse:
        azimuth = np.arctan2(spec.n[1], spec.n[0])
        return spec.omega_t, azimuth - np.pi / 2, -azimuth + np.pi / 2
    if strict:
        raise DomainError(
            f"field direction {spec.n} has a z component; pass strict=False "
            "to compile it from the evolution matrix"
        )
    return u3_angles_from_matrix(field_evolution_matrix(spec))


def magnetic_field_circuit(spec: FieldSpec, reg: SpinRegister = SpinRegister(SPIN_ONE),
                           n_qubits: Optional[int] = None, strict: bool = True) -> Circuit:
    """
    Build the evolution e^{-i omega t S.n} of one spin register.

    Args:
        spec: Field strength-time product and direction
        reg: Register holding the spin
        n_qubits: Circuit width (defaults to the register end)
        strict: Reject fields with a z component

    Returns:
        Circuit with one U3 gate per qubit of the register
    """
    n_qubits = n_qubits or reg.stop
    reg.check_fits(n_qubits)
    theta, phi, lam = field_gate_angles(spec, strict)
    return Circuit(n_qubits, tuple(Gate.u3(theta, phi, lam, q) for q in reg.qubits))


def field_initial_state(initial_m: int) -> StateVector:
    """The Dicke state |1, m> used as the start of the field experiment."""
    _check_level(initial_m)
    return dicke_state(SPIN_ONE, MagneticQuantumNumber(2 * initial_m))


def field_preparation(initial_m: int) -> Circuit:
    """
    Prepare |1, m> from |00>.

    m=+1 needs no gates, m=-1 flips both qubits, and m=0 builds the Bell pair
    (|00> + |11>)/sqrt(2) and flips qubit 1.
    """
    _check_level(initial_m)
    if initial_m == 1:
        return Circuit(2)
    if initial_m == -1:
        return Circuit(2, (Gate.x(0), Gate.x(1)))
    return Circuit(2, (Gate.u3(np.pi / 2, 0.0, 0.0, 0), Gate.cx(0, 1), Gate.x(1)))


def ising_preparation() -> Circuit:
    """Rotate all three qubits from |0> to the +x direction."""
    gates = tuple(Gate.u3(np.pi / 2, 0.0, 0.0, q) for q in range(ISING_QUBITS))
    return Circuit(ISING_QUBITS, gates)


def zz_segment(jt: float, control: int, target: int) -> Tuple[Gate, ...]:
    """e^{-i (jt/2) sigma_c^z sigma_t^z} compiled as CX - RZ(jt) - CX."""
    return (Gate.cx(control, target), Gate.rz(jt, target), Gate.cx(control, target))


def ising_evolution(spec: IsingSpec) -> Circuit:
    """e^{-i Jt S_1^z sigma_2^z} as two ZZ segments (qubit 0 with 2, qubit 1 with 2)."""
    target = SPIN_HALF_REGISTER.start
    gates = []
    for control in SPIN_ONE_REGISTER.qubits:
        gates.extend(zz_segment(spec.jt, control, target))
    return Circuit(ISING_QUBITS, tuple(gates))


def ising_circuit(spec: IsingSpec) -> Circuit:
    """State preparation followed by the Ising evolution."""
    return ising_preparation() + ising_evolution(spec)


def _check_level(initial_m: int) -> None:
    if initial_m not in FIELD_INITIAL_LEVELS:
        raise DomainError(f"initial m must be one of {FIELD_INITIAL_LEVELS}, got {initial_m}")


def analytic_field_probabilities(initial_m: int, omega_t: float) -> Tuple[float, float, float]:
    """
    (|C_1|^2, |C_0|^2, |C_-1|^2) for a spin-1 in a transverse field.

    From |1,1>: (cos^4(wt/2), sin^2(wt)/2, sin^4(wt/2)); from |1,0>:
    (sin^2(wt)/2, cos^2(wt), sin^2(wt)/2); |1,-1> mirrors |1,1>.
    """
    _check_level(initial_m)
    half_sin2 = 0.5 * np.sin(omega_t) ** 2
    if initial_m == 0:
        return half_sin2, np.cos(omega_t) ** 2, half_sin2
    up = np.cos(omega_t / 2) ** 4
    down = np.sin(omega_t / 2) ** 4
    if initial_m == 1:
        return up, half_sin2, down
    return down, half_sin2, up


def analytic_field_means(initial_m: int, omega_t: float) -> Tuple[float, float, float]:
    """(<S^x>, <S^y>, <S^z>) for a spin-1 in a field along x."""
    _check_level(initial_m)
    return 0.0, -initial_m * np.sin(omega_t), initial_m * np.cos(omega_t)


def analytic_ising(jt: float) -> Tuple[float, float]:
    """(|<S_1>|, <S_1^x sigma_2^x>) = (|cos Jt|, cos Jt)."""
    return abs(np.cos(jt)), np.cos(jt)


def analytic_ising_means(jt: float) -> Tuple[float, float, float]:
    """Spin-1 components (<S^x>, <S^y>, <S^z>) = (cos Jt, 0, 0)."""
    return np.cos(jt), 0.0, 0.0


def analytic_ising_probabilities(jt: float) -> Tuple[float, float, float]:
    """Spin-1 z-level probabilities; S_1^z is conserved, so (1/4, 1/2, 1/4)."""
    return 0.25, 0.5, 0.25
