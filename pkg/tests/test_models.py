"""
Tests for the experiment circuits and their analytic predictions.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from spinqubits.errors import DomainError
from spinqubits.models import (
    ISING_QUBITS,
    SPIN_HALF_REGISTER,
    SPIN_ONE,
    SPIN_ONE_REGISTER,
    FieldSpec,
    IsingSpec,
    analytic_field_means,
    analytic_field_probabilities,
    analytic_ising,
    analytic_ising_means,
    analytic_ising_probabilities,
    field_evolution_matrix,
    field_gate_angles,
    field_initial_state,
    field_preparation,
    ising_circuit,
    ising_evolution,
    magnetic_field_circuit,
)
from spinqubits.protocols import correlation, magnetic_numbers_from_counts, mean_vector
from spinqubits.spin_algebra import (
    PAULI,
    SpinRegister,
    SpinValue,
    collective_operator,
    embedded_operator,
)
from spinqubits.statevec import (
    GateKind,
    StateVector,
    circuit_unitary,
    exact_probabilities,
    gate_census,
    run_circuit,
)
from tests.test_utils import assert_same_up_to_phase

GRID = np.linspace(0, 2 * np.pi, 41)


def test_field_spec_validation():
    with pytest.raises(DomainError):
        FieldSpec(1.0, (1.0, 1.0, 0.0))
    with pytest.raises(DomainError):
        FieldSpec(float("inf"))
    assert FieldSpec(1.0, (0.0, 1.0, 0.0)).transverse
    assert not FieldSpec(1.0, (0.0, 0.0, 1.0)).transverse


def test_x_field_maps_to_rx():
    assert field_gate_angles(FieldSpec(0.8)) == pytest.approx((0.8, -np.pi / 2, np.pi / 2))


def test_field_circuit_has_one_u3_per_qubit():
    circuit = magnetic_field_circuit(FieldSpec(0.8))
    assert [gate.kind for gate in circuit] == [GateKind.U3, GateKind.U3]
    assert [gate.qubits for gate in circuit] == [(0,), (1,)]


def test_zero_field_time_is_identity():
    unitary = circuit_unitary(magnetic_field_circuit(FieldSpec(0.0)))
    np.testing.assert_allclose(unitary, np.eye(4), atol=1e-15)


def test_y_field_pi_flips_qubit():
    circuit = magnetic_field_circuit(FieldSpec(np.pi, (0.0, 1.0, 0.0)), SpinRegister(SpinValue(1)))
    final = run_circuit(circuit)
    assert exact_probabilities(final)[1] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "n", [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (np.sqrt(0.5), np.sqrt(0.5), 0.0), (0.6, 0.0, 0.8)]
)
def test_field_circuit_matches_matrix_exponential(n):
    spec = FieldSpec(1.3, n)
    hamiltonian = sum(c * collective_operator(SPIN_ONE, axis) for c, axis in zip(spec.n, "xyz"))
    expected = expm(-1j * spec.omega_t * hamiltonian)
    circuit = magnetic_field_circuit(spec, strict=False)
    unitary = circuit_unitary(circuit)
    index = np.unravel_index(np.argmax(np.abs(unitary)), unitary.shape)
    np.testing.assert_allclose(unitary * expected[index] / unitary[index], expected, atol=1e-12)


def test_evolution_matrix_is_single_qubit_exponential():
    spec = FieldSpec(0.9, (0.0, 0.6, 0.8))
    sigma_n = 0.6 * PAULI["y"] + 0.8 * PAULI["z"]
    np.testing.assert_allclose(
        field_evolution_matrix(spec), expm(-0.5j * spec.omega_t * sigma_n), atol=1e-14
    )


def test_longitudinal_field_rejected_in_strict_mode():
    with pytest.raises(DomainError):
        magnetic_field_circuit(FieldSpec(1.0, (0.0, 0.0, 1.0)))


@pytest.mark.parametrize("m", [1, 0, -1])
def test_field_preparation_builds_dicke_state(m):
    assert_same_up_to_phase(run_circuit(field_preparation(m)), field_initial_state(m))


def test_invalid_initial_level():
    with pytest.raises(DomainError):
        field_initial_state(2)
    with pytest.raises(DomainError):
        analytic_field_probabilities(3, 0.0)


@pytest.mark.parametrize("m", [1, 0, -1])
def test_field_probabilities_match_analytic(m):
    for omega_t in GRID:
        final = run_circuit(magnetic_field_circuit(FieldSpec(omega_t)), field_initial_state(m))
        levels = magnetic_numbers_from_counts(exact_probabilities(final), SPIN_ONE_REGISTER)
        np.testing.assert_allclose(levels, analytic_field_probabilities(m, omega_t), atol=1e-10)


@pytest.mark.parametrize("m", [1, 0, -1])
def test_field_means_match_analytic(m):
    for omega_t in GRID:
        final = run_circuit(magnetic_field_circuit(FieldSpec(omega_t)), field_initial_state(m))
        vector, _ = mean_vector(final, SPIN_ONE_REGISTER)
        np.testing.assert_allclose(vector, analytic_field_means(m, omega_t), atol=1e-10)


def test_analytic_field_examples():
    assert analytic_field_probabilities(1, 0.0) == pytest.approx((1, 0, 0))
    assert analytic_field_probabilities(1, np.pi) == pytest.approx((0, 0, 1), abs=1e-15)
    assert analytic_field_probabilities(1, np.pi / 2) == pytest.approx((0.25, 0.5, 0.25))
    assert analytic_field_probabilities(0, np.pi / 2) == pytest.approx((0.5, 0, 0.5), abs=1e-15)
    assert analytic_field_means(1, np.pi / 2) == pytest.approx((0, -1, 0), abs=1e-15)


def test_ising_circuit_census():
    circuit = ising_circuit(IsingSpec(np.pi / 2))
    assert circuit.n_qubits == ISING_QUBITS
    single, cx = gate_census(circuit)
    assert cx == 4
    assert single == 5
    assert len(ising_evolution(IsingSpec(0.3))) == 6


def test_ising_evolution_matches_hamiltonian():
    jt = 0.77
    sz = embedded_operator(SPIN_ONE_REGISTER, "z", 3)
    sigma_z = embedded_operator(SPIN_HALF_REGISTER, "z", 3)
    expected = expm(-1j * jt * sz @ sigma_z)
    unitary = circuit_unitary(ising_evolution(IsingSpec(jt)))
    index = np.unravel_index(np.argmax(np.abs(unitary)), unitary.shape)
    np.testing.assert_allclose(unitary * expected[index] / unitary[index], expected, atol=1e-12)


def test_ising_preparation_is_x_polarized():
    state = run_circuit(ising_circuit(IsingSpec(0.0)))
    np.testing.assert_allclose(state.amps, np.full(8, 1 / np.sqrt(8)), atol=1e-12)


def test_ising_results_match_analytic():
    for jt in GRID:
        final = run_circuit(ising_circuit(IsingSpec(jt)))
        vector, magnitude = mean_vector(final, SPIN_ONE_REGISTER)
        corr = correlation(final, SPIN_ONE_REGISTER, SPIN_HALF_REGISTER, "x", "x")
        norm, expected_corr = analytic_ising(jt)
        np.testing.assert_allclose(vector, analytic_ising_means(jt), atol=1e-10)
        assert magnitude.value == pytest.approx(norm, abs=1e-10)
        assert corr.value == pytest.approx(expected_corr, abs=1e-10)
        levels = magnetic_numbers_from_counts(exact_probabilities(final), SPIN_ONE_REGISTER)
        np.testing.assert_allclose(levels, analytic_ising_probabilities(jt), atol=1e-10)


def test_analytic_ising_examples():
    assert analytic_ising(0.0) == pytest.approx((1.0, 1.0))
    assert analytic_ising(np.pi) == pytest.approx((1.0, -1.0))
    norm, corr = analytic_ising(np.pi / 2)
    assert norm == pytest.approx(0.0, abs=1e-15)
    assert corr == pytest.approx(0.0, abs=1e-15)


def test_ising_spin_half_register_uses_sigma():
    assert SPIN_HALF_REGISTER.pauli
    state = StateVector.zero(3)
    corr = correlation(state, SPIN_ONE_REGISTER, SPIN_HALF_REGISTER, "z", "z")
    assert corr.value == pytest.approx(1.0)
