"""
Tests for the measurement protocols.

Protocol estimates are compared with expectation values of the dense
collective operators (the oracle).
"""

import numpy as np
import pytest

from spinqubits.errors import DomainError
from spinqubits.protocols import (
    Estimate,
    axis_rotation_fragment,
    correlation,
    estimate_from_counts,
    magnetic_numbers_from_counts,
    mean_component,
    mean_vector,
    measurement_circuit,
    vector_magnitude,
)
from spinqubits.spin_algebra import (
    MagneticQuantumNumber,
    SpinRegister,
    SpinValue,
    collective_operator,
    dicke_state,
    embedded_operator,
)
from spinqubits.statevec import (
    ShotCounts,
    StateVector,
    circuit_unitary,
    exact_probabilities,
    run_circuit,
)
from tests.test_utils import random_state

SPIN_HALF = SpinValue(1)
SPIN_ONE = SpinValue(2)


def _expectation(operator, state):
    return float(np.real(np.vdot(state.amps, operator @ state.amps)))


def test_z_fragment_is_empty():
    assert len(axis_rotation_fragment(SpinRegister(SPIN_ONE), "z")) == 0


def test_x_fragment_rotates_plus_state_to_zero():
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    rotated = run_circuit(axis_rotation_fragment(SpinRegister(SPIN_HALF), "x"), plus)
    assert exact_probabilities(rotated)[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("axis", ["x", "y"])
@pytest.mark.parametrize("twice_s", [1, 2, 3])
def test_fragment_conjugation_identity(axis, twice_s):
    spin = SpinValue(twice_s)
    rotation = circuit_unitary(axis_rotation_fragment(SpinRegister(spin), axis))
    sz = collective_operator(spin, "z")
    target = collective_operator(spin, axis)
    residual = rotation.conj().T @ sz @ rotation - target
    assert np.max(np.abs(residual)) < 1e-12


def test_fragment_width_and_fit():
    reg = SpinRegister(SPIN_ONE, 1)
    assert axis_rotation_fragment(reg, "x").n_qubits == 3
    assert axis_rotation_fragment(reg, "x", 4).n_qubits == 4
    with pytest.raises(DomainError):
        axis_rotation_fragment(reg, "x", 2)
    with pytest.raises(DomainError):
        axis_rotation_fragment(reg, "w")


def test_measurement_circuit_rejects_overlap():
    with pytest.raises(DomainError):
        measurement_circuit([(SpinRegister(SPIN_ONE, 0), "x"), (SpinRegister(SPIN_ONE, 1), "x")], 3)


def test_magnetic_numbers_from_dicke_state():
    state = dicke_state(SPIN_ONE, MagneticQuantumNumber(0))
    levels = magnetic_numbers_from_counts(exact_probabilities(state), SpinRegister(SPIN_ONE))
    np.testing.assert_allclose(levels, [0, 1, 0], atol=1e-15)


def test_magnetic_numbers_from_counts_example():
    counts = ShotCounts(2, 1024, {"00": 512, "01": 256, "10": 256})
    levels = magnetic_numbers_from_counts(counts, SpinRegister(SPIN_ONE))
    np.testing.assert_allclose(levels, [0.5, 0.5, 0.0])


def test_estimate_from_counts_example():
    counts = ShotCounts(2, 1024, {"00": 512, "01": 256, "10": 256})
    estimate = estimate_from_counts(counts, SpinRegister(SPIN_ONE))
    assert estimate.value == pytest.approx(0.5)
    assert estimate.mode == "sampled"
    assert estimate.shots == 1024
    assert estimate.stderr == pytest.approx(np.sqrt(0.25 / 1024))


def test_estimate_validation():
    with pytest.raises(DomainError):
        Estimate(0.0, -1.0)
    with pytest.raises(DomainError):
        Estimate(0.0, 0.1, "sampled")
    with pytest.raises(DomainError):
        Estimate(0.0, 0.0, "guess")


def test_probability_vector_length_must_be_power_of_two():
    with pytest.raises(DomainError):
        estimate_from_counts([0.5, 0.25, 0.25], SpinRegister(SPIN_HALF))


def test_mean_z_of_up_state():
    state = dicke_state(SPIN_ONE, MagneticQuantumNumber(2))
    estimate = mean_component(state, SpinRegister(SPIN_ONE), "z")
    assert estimate == Estimate(1.0)


@pytest.mark.parametrize("n_qubits,twice_s", [(1, 1), (2, 2), (3, 2), (3, 3), (4, 4), (4, 2)])
def test_means_match_dense_oracle(rng, n_qubits, twice_s):
    # 200 random states across the parametrization
    reg = SpinRegister(SpinValue(twice_s), n_qubits - twice_s)
    for _ in range(34):
        state = random_state(rng, n_qubits)
        for axis in ("x", "y", "z"):
            expected = _expectation(embedded_operator(reg, axis, n_qubits), state)
            assert mean_component(state, reg, axis).value == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("axes", [("x", "x"), ("z", "z"), ("x", "y"), ("y", "z")])
def test_correlations_match_dense_oracle(rng, axes):
    reg_i = SpinRegister(SPIN_ONE, 0)
    reg_j = SpinRegister(SPIN_HALF, 2, pauli=True)
    for _ in range(50):
        state = random_state(rng, 3)
        operator = embedded_operator(reg_i, axes[0], 3) @ embedded_operator(reg_j, axes[1], 3)
        expected = _expectation(operator, state)
        estimate = correlation(state, reg_i, reg_j, *axes)
        assert estimate.value == pytest.approx(expected, abs=1e-10)


def test_correlation_of_two_spin_halves_on_four_qubits(rng):
    reg_i = SpinRegister(SPIN_HALF, 0)
    reg_j = SpinRegister(SPIN_ONE, 2)
    for _ in range(20):
        state = random_state(rng, 4)
        operator = embedded_operator(reg_i, "z", 4) @ embedded_operator(reg_j, "x", 4)
        estimate = correlation(state, reg_i, reg_j, "z", "x")
        assert estimate.value == pytest.approx(_expectation(operator, state), abs=1e-10)


def test_correlation_rejects_overlapping_registers(rng):
    state = random_state(rng, 3)
    with pytest.raises(DomainError):
        correlation(state, SpinRegister(SPIN_ONE, 0), SpinRegister(SPIN_ONE, 1), "x", "x")


def test_pauli_register_doubles_eigenvalues():
    state = StateVector.zero(1)
    plain = mean_component(state, SpinRegister(SPIN_HALF), "z")
    pauli = mean_component(state, SpinRegister(SPIN_HALF, pauli=True), "z")
    assert plain.value == pytest.approx(0.5)
    assert pauli.value == pytest.approx(1.0)
    with pytest.raises(DomainError):
        SpinRegister(SPIN_ONE, pauli=True)


def test_sampled_mean_is_deterministic_and_close(rng):
    state = random_state(rng, 2)
    reg = SpinRegister(SPIN_ONE)
    first = mean_component(state, reg, "x", shots=1024, seed=3)
    second = mean_component(state, reg, "x", shots=1024, seed=3)
    assert first == second
    assert first.mode == "sampled" and first.stderr > 0
    exact = mean_component(state, reg, "x").value
    assert abs(first.value - exact) <= 5 * first.stderr + 1e-9


def test_mean_vector_exact():
    state = dicke_state(SPIN_ONE, MagneticQuantumNumber(2))
    vector, magnitude = mean_vector(state, SpinRegister(SPIN_ONE))
    np.testing.assert_allclose(vector, [0, 0, 1], atol=1e-12)
    assert magnitude.value == pytest.approx(1.0)
    assert magnitude.stderr == 0


def test_mean_vector_sampled_has_propagated_stderr(rng):
    state = random_state(rng, 2)
    _, magnitude = mean_vector(state, SpinRegister(SPIN_ONE), shots=2048, seed=1)
    assert magnitude.mode == "sampled"
    assert magnitude.stderr > 0


def test_vector_magnitude_propagation():
    components = [
        Estimate(0.6, 0.01, "sampled", 100),
        Estimate(0.8, 0.02, "sampled", 100),
        Estimate(0.0, 0.0, "sampled", 100),
    ]
    magnitude = vector_magnitude(components)
    assert magnitude.value == pytest.approx(1.0)
    assert magnitude.stderr == pytest.approx(np.sqrt((0.6 * 0.01) ** 2 + (0.8 * 0.02) ** 2))
