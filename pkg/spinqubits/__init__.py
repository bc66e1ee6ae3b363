"""
Spin-s particles encoded on registers of 2s qubits.
"""

from .errors import ConfigError, DomainError, ExportError, QasmError, SpinQubitsError
from .spin_algebra import (
    MagneticQuantumNumber,
    SpinRegister,
    SpinState,
    SpinValue,
    casimir_operator,
    collective_operator,
    dicke_state,
    singlet_leakage,
    spin_state_to_statevector,
    verify_algebra,
)
from .statevec import (
    Circuit,
    Gate,
    GateKind,
    ShotCounts,
    StateVector,
    run_circuit,
    sample_counts,
    u3_decompose,
)
from .protocols import (
    Estimate,
    axis_rotation_fragment,
    correlation,
    estimate_from_counts,
    magnetic_numbers_from_counts,
    mean_component,
    mean_vector,
)
from .models import (
    SPIN_HALF_REGISTER,
    SPIN_ONE_REGISTER,
    FieldSpec,
    IsingSpec,
    field_initial_state,
    ising_circuit,
    magnetic_field_circuit,
)
from .noise import (
    REFERENCE_DEVICE,
    DeviceParams,
    NoiseModel,
    ReadoutMatrix,
    apply_depolarizing,
    apply_readout_noise,
    error_budget,
)
from .qasm import emit_qasm, parse_qasm
from .config import SweepConfig
from .experiments import (
    SweepRow,
    algebra_check,
    export_csv,
    render_plot,
    run_sweep,
)

__all__ = [
    'ConfigError',
    'DomainError',
    'ExportError',
    'QasmError',
    'SpinQubitsError',
    'MagneticQuantumNumber',
    'SpinRegister',
    'SpinState',
    'SpinValue',
    'casimir_operator',
    'collective_operator',
    'dicke_state',
    'singlet_leakage',
    'spin_state_to_statevector',
    'verify_algebra',
    'Circuit',
    'Gate',
    'GateKind',
    'ShotCounts',
    'StateVector',
    'run_circuit',
    'sample_counts',
    'u3_decompose',
    'Estimate',
    'axis_rotation_fragment',
    'correlation',
    'estimate_from_counts',
    'magnetic_numbers_from_counts',
    'mean_component',
    'mean_vector',
    'SPIN_HALF_REGISTER',
    'SPIN_ONE_REGISTER',
    'FieldSpec',
    'IsingSpec',
    'field_initial_state',
    'ising_circuit',
    'magnetic_field_circuit',
    'REFERENCE_DEVICE',
    'DeviceParams',
    'NoiseModel',
    'ReadoutMatrix',
    'apply_depolarizing',
    'apply_readout_noise',
    'error_budget',
    'emit_qasm',
    'parse_qasm',
    'SweepConfig',
    'SweepRow',
    'algebra_check',
    'export_csv',
    'render_plot',
    'run_sweep',
]
