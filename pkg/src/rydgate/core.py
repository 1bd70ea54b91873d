"""Domain types and exact block propagators.

Under a perfect blockade the two-qubit Hamiltonian splits into a three-level
V block on {|00>, |r0>, |0r>}, two two-level blocks A on {|01>, |r1>} and
B on {|10>, |1r>}, and the field-free |11> state. For resonant,
temporally non-overlapping pulses each block propagator depends only on
the pulse area, the structural vector (a, b) and the optical phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10


class Subsystem(enum.Enum):
    V = "V"
    A = "A"
    B = "B"


@dataclass(frozen=True)
class StructuralVector:
    """Normalized field amplitudes ``(a, b)`` at the two qubit sites.

    Signs are meaningful: a negative component is a pi phase shift of the
    field at that site.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"structural vector components must be finite, got ({self.a}, {self.b})")
        norm2 = self.a * self.a + self.b * self.b
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"structural vector must have unit norm, |e|^2 = {norm2!r}")

    @classmethod
    def normalized(cls, a: float, b: float) -> StructuralVector:
        r = math.hypot(a, b)
        if r == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / r, b / r)

    @property
    def ratio(self) -> float:
        """x = b / a; infinite when the field vanishes at qubit A."""
        if self.a == 0.0:
            return math.copysign(math.inf, self.b)
        return self.b / self.a

    def dot(self, other: StructuralVector) -> float:
        return self.a * other.a + self.b * other.b

    def __neg__(self) -> StructuralVector:
        return StructuralVector(-self.a, -self.b)


def structural_from_ratio(x: float) -> StructuralVector:
    """Structural vector with ``b/a = x`` and ``a > 0``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"ratio must be finite, got {x!r}")
    a = 1.0 / math.sqrt(1.0 + x * x)
    return StructuralVector(a, x * a)


@dataclass(frozen=True)
class Pulse:
    """A resonant pulse: signed area (rad), structural vector, optical phase (rad)."""

    area: float
    structural: StructuralVector
    phase: float = 0.0

    @classmethod
    def from_ratio(cls, area: float, x: float, phase: float = 0.0) -> Pulse:
        return cls(float(area), structural_from_ratio(x), float(phase))

    def mixing_angle(self, s: Subsystem) -> float:
        return 0.5 * gpa(self, s)


@dataclass(frozen=True)
class PulseSequence:
    """Pulses in order of application."""

    pulses: tuple[Pulse, ...]

    def __init__(self, pulses: Iterable[Pulse]):
        object.__setattr__(self, "pulses", tuple(pulses))

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self) -> Iterator[Pulse]:
        return iter(self.pulses)

    def __getitem__(self, i):
        return self.pulses[i]

    @property
    def total_area(self) -> float:
        """Accumulated area, the sum of |A_k|."""
        return sum(abs(p.area) for p in self.pulses)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(areas, a, b, phases) as float arrays of shape ``(1, n_pulses)``."""
        cols = np.array([[p.area, p.structural.a, p.structural.b, p.phase] for p in self.pulses], dtype=float)
        return tuple(cols[:, i][None, :] for i in range(4))  # type: ignore[return-value]


@dataclass(frozen=True)
class PropagatorSet:
    """Block propagators: ``V`` (3x3), ``A`` (2x2) and ``B`` (2x2)."""

    V: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __getitem__(self, s: Subsystem) -> np.ndarray:
        return getattr(self, Subsystem(s).value)

    def u11(self, s: Subsystem) -> complex:
        return complex(self[s][0, 0])

    def max_deviation(self, other: PropagatorSet) -> float:
        return max(float(np.max(np.abs(self[s] - other[s]))) for s in Subsystem)

    def unitarity_error(self) -> float:
        return max(float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))) for m in (self.V, self.A, self.B))


def gpa(p: Pulse, s: Subsystem) -> float:
    """Generalized pulse area seen by block ``s``: A, aA or bA."""
    s = Subsystem(s)
    if s is Subsystem.V:
        return p.area
    if s is Subsystem.A:
        return p.structural.a * p.area
    return p.structural.b * p.area


def _v_block(area: float, a: float, b: float, phase: float) -> np.ndarray:
    th = 0.5 * area
    c, s = math.cos(th), math.sin(th)
    ep = complex(math.cos(phase), math.sin(phase))
    em = ep.conjugate()
    return np.array(
        [
            [c, 1j * a * s * ep, 1j * b * s * ep],
            [1j * a * s * em, a * a * c + b * b, a * b * (c - 1.0)],
            [1j * b * s * em, a * b * (c - 1.0), b * b * c + a * a],
        ],
        dtype=np.complex128,
    )


def _two_level(theta: float, phase: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    ep = complex(math.cos(phase), math.sin(phase))
    return np.array([[c, 1j * s * ep], [1j * s * ep.conjugate(), c]], dtype=np.complex128)


def propagator_single(p: Pulse) -> PropagatorSet:
    """Closed-form block propagators for one pulse.

    The phase multiplies the upper couplings by e^{i phi} and the lower ones
    by e^{-i phi}; diagonal entries do not depend on it.
    """
    e = p.structural
    return PropagatorSet(
        V=_v_block(p.area, e.a, e.b, p.phase),
        A=_two_level(0.5 * e.a * p.area, p.phase),
        B=_two_level(0.5 * e.b * p.area, p.phase),
    )


def compose(seq: PulseSequence | Sequence[Pulse]) -> PropagatorSet:
    """Time-ordered product U_N ... U_1 for each block."""
    pulses = list(seq)
    if not pulses:
        raise ValueError("cannot compose an empty pulse sequence")
    total = propagator_single(pulses[0])
    for p in pulses[1:]:
        u = propagator_single(p)
        total = PropagatorSet(V=u.V @ total.V, A=u.A @ total.A, B=u.B @ total.B)
    return total
