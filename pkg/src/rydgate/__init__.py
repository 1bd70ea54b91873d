"""Minimal pulse-sequence CZ gates on dipole-blockaded, non-independent qubits."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    PropagatorSet,
    Pulse,
    PulseSequence,
    StructuralVector,
    Subsystem,
    compose,
    gpa,
    propagator_single,
    structural_from_ratio,
)
from .fidelity import (  # noqa: E402
    classify_mechanism,
    fidelity,
    fidelity_single,
    two_pulse_closed_form,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "PropagatorSet",
    "Pulse",
    "PulseSequence",
    "StructuralVector",
    "Subsystem",
    "classify_mechanism",
    "compose",
    "fidelity",
    "fidelity_single",
    "gpa",
    "propagator_single",
    "structural_from_ratio",
    "two_pulse_closed_form",
]
