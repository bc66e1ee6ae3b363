"""
Shared helpers for the spinqubits test suite.
"""

from .random_objects import (
    assert_same_up_to_phase,
    random_circuit,
    random_state,
)

__all__ = [
    'assert_same_up_to_phase',
    'random_circuit',
    'random_state',
]
