"""CZ gate fidelity, two-pulse closed forms and loop-mechanism labels."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Pulse,
    PropagatorSet,
    PulseSequence,
    StructuralVector,
    Subsystem,
    compose,
    propagator_single,
    structural_from_ratio,
)
from .kernels import sequence_u11

MECHANISM_THRESHOLD = 0.05


def fidelity_from_u11(uv, ua, ub):
    """F = |1 - U^A_11 - U^B_11 - U^V_11|^2 / 16.

    Works elementwise on arrays. For real diagonal entries this is the
    familiar squared form; complex entries (relative phases between pulses)
    are handled through the modulus so that F stays in [0, 1].
    """
    return np.abs(1.0 - ua - ub - uv) ** 2 / 16.0


def fidelity(u: PropagatorSet) -> float:
    """Gate fidelity of a set of block propagators."""
    return float(fidelity_from_u11(u.V[0, 0], u.A[0, 0], u.B[0, 0]))


def fidelity_batch(areas, a, b, phi=None) -> np.ndarray:
    """Fidelity of ``n`` sequences given as ``(n, p)`` parameter arrays."""
    areas = np.atleast_2d(np.asarray(areas, dtype=float))
    if phi is None:
        phi = np.zeros_like(areas)
    uv, ua, ub = sequence_u11(areas, np.atleast_2d(a), np.atleast_2d(b), np.atleast_2d(phi))
    return fidelity_from_u11(uv, ua, ub)


def fidelity_single(A, x):
    """Fidelity of one pulse of area ``A`` with structural ratio ``x``.

    Scalars go through the explicit propagators; arrays broadcast and use
    the batch kernel.
    """
    if np.ndim(A) == 0 and np.ndim(x) == 0:
        return fidelity(propagator_single(Pulse(float(A), structural_from_ratio(x))))
    A, x = np.broadcast_arrays(np.asarray(A, dtype=float), np.asarray(x, dtype=float))
    a = 1.0 / np.sqrt(1.0 + x * x)
    flat = fidelity_batch(A.reshape(-1, 1), a.reshape(-1, 1), (x * a).reshape(-1, 1))
    return flat.reshape(A.shape)


def sequence_fidelity(seq: PulseSequence) -> float:
    return fidelity(compose(seq))


def two_pulse_closed_form(A1: float, A2: float, e1: StructuralVector, e2: StructuralVector) -> tuple[float, float, float]:
    """(U^V_11, U^A_11, U^B_11) for two in-phase pulses, without matrix products."""
    h1, h2 = 0.5 * A1, 0.5 * A2
    uv = math.cos(h2) * math.cos(h1) - e1.dot(e2) * math.sin(h2) * math.sin(h1)
    ua = math.cos(e2.a * h2) * math.cos(e1.a * h1) - math.sin(e2.a * h2) * math.sin(e1.a * h1)
    ub = math.cos(e2.b * h2) * math.cos(e1.b * h1) - math.sin(e2.b * h2) * math.sin(e1.b * h1)
    return uv, ua, ub


class Mechanism(enum.Enum):
    ZERO_LOOP = "0-loop"
    ONE_LOOP = "1-loop"
    MIXED = "mixed"


@dataclass(frozen=True)
class MechanismLabel:
    mechanism: Mechanism
    w0: float
    w1: float


def _label(w0: float, w1: float) -> Mechanism:
    if w1 < MECHANISM_THRESHOLD * w0:
        return Mechanism.ZERO_LOOP
    if w0 < MECHANISM_THRESHOLD * w1:
        return Mechanism.ONE_LOOP
    return Mechanism.MIXED


def classify_mechanism(seq: PulseSequence) -> dict[Subsystem, MechanismLabel]:
    """Split each block's return amplitude into loop pathways.

    ``w0`` is the weight of the path that never leaves the computational
    state between pulses (product of the per-pulse diagonal entries); ``w1``
    collects every path that visits a Rydberg state. For two pulses these
    are |cos t2 cos t1|^2 and |sin t2 sin t1|^2 (times (e1.e2)^2 for V).
    A single pulse cannot close a loop, so w1 is always zero there.
    """
    pulses = list(seq)
    if not pulses:
        raise ValueError("cannot classify an empty sequence")
    singles = [propagator_single(p) for p in pulses]
    total = compose(pulses)
    out = {}
    for s in Subsystem:
        direct = complex(np.prod([u[s][0, 0] for u in singles]))
        w0 = abs(direct) ** 2
        w1 = abs(total.u11(s) - direct) ** 2
        if w1 < 1e-28:
            w1 = 0.0
        out[s] = MechanismLabel(_label(w0, w1), min(w0, 1.0), min(w1, 1.0))
    return out
