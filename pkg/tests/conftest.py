"""
Shared fixtures for the spinqubits test suite.
"""

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("spinqubits", max_examples=50, deadline=None)
settings.load_profile("spinqubits")


@pytest.fixture
def rng():
    """Seeded generator so random-object tests are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def device_file(tmp_path):
    """Device parameter file with the reference device averages."""
    path = tmp_path / "device.txt"
    path.write_text(
        "# reference device\n"
        "single_qubit_gate_error=0.00047\n"
        "cx_gate_error=0.01168\n"
        "readout_error=0.0263\n"
        "shots=1024\n",
        encoding="utf-8",
    )
    return str(path)


@pytest.fixture
def noiseless_device_file(tmp_path):
    path = tmp_path / "ideal.txt"
    path.write_text(
        "single_qubit_gate_error=0\ncx_gate_error=0\nreadout_error=0\n",
        encoding="utf-8",
    )
    return str(path)
