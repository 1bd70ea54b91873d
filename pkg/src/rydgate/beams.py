"""Beam amplitudes that realize a structural vector with overlapping Gaussian beams.

One beam is focused on each qubit. With overlap matrix S (S_ab = amplitude
of beam b at qubit a), the peak field amplitudes E satisfy S E = Omega_0 e
for a target structural vector e.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularGeometryError

MAX_CONDITION = 1e12


def overlap_theta(alpha: float, R: float) -> float:
    """Amplitude of a Gaussian beam at distance ``R`` from its focus: exp(-alpha R^2)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if R < 0:
        raise ValueError("R must be non-negative")
    return math.exp(-alpha * R * R)


@dataclass(frozen=True)
class BeamGeometry:
    """Qubit positions (length units) and beam-waist parameter ``alpha`` (1/length^2).

    ``overlaps`` optionally replaces the Gaussian form with a user-supplied
    table: ``{(i, j): theta_ij}`` for i < j. Useful for non-Gaussian profiles.
    """

    alpha: float
    positions: tuple[tuple[float, ...], ...]
    overlaps: dict | None = field(default=None, compare=False)

    def __init__(self, alpha: float, positions: Sequence, overlaps: dict | None = None):
        pos = tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in positions)
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "overlaps", dict(overlaps) if overlaps else None)
        if len(pos) < 2:
            raise ValueError("need at least two qubits")
        if len({len(p) for p in pos}) != 1:
            raise ValueError("all positions must have the same dimension")
        if self.overlaps is None and not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @classmethod
    def from_theta(cls, theta: float) -> BeamGeometry:
        """Two qubits a unit distance apart with pairwise overlap ``theta``."""
        if not 0 <= theta < 1:
            raise ValueError("theta must lie in [0, 1)")
        if theta == 0:
            return cls(1.0, [0.0, 1.0], overlaps={(0, 1): 0.0})
        return cls(-math.log(theta), [0.0, 1.0])

    @property
    def n_qubits(self) -> int:
        return len(self.positions)

    def distance(self, i: int, j: int) -> float:
        return math.dist(self.positions[i], self.positions[j])

    def theta(self, i: int, j: int) -> float:
        if i == j:
            return 1.0
        if self.overlaps is not None:
            key = (min(i, j), max(i, j))
            if key not in self.overlaps:
                raise ValueError(f"overlap table has no entry for qubit pair {key}")
            return float(self.overlaps[key])
        return overlap_theta(self.alpha, self.distance(i, j))


@dataclass(frozen=True)
class OverlapMatrix:
    S: np.ndarray
    condition: float


def build_overlap_matrix(geometry: BeamGeometry) -> OverlapMatrix:
    """Symmetric matrix of pairwise overlaps with unit diagonal.

    Raises :class:`SingularGeometryError` for coincident qubits (theta = 1)
    or a condition number above 1e12, naming the most overlapping pair.
    """
    n = geometry.n_qubits
    S = np.eye(n)
    for i, j in itertools.combinations(range(n), 2):
        S[i, j] = S[j, i] = geometry.theta(i, j)
    pairs = list(itertools.combinations(range(n), 2))
    worst = max(pairs, key=lambda p: S[p])
    if S[worst] >= 1.0:
        raise SingularGeometryError(f"qubits {worst[0]} and {worst[1]} coincide (theta = 1)", pair=worst)
    cond = float(np.linalg.cond(S))
    if not cond <= MAX_CONDITION:
        raise SingularGeometryError(
            f"overlap matrix is near-singular (condition number {cond:.3e} > {MAX_CONDITION:.0e}); "
            f"most overlapping pair: qubits {worst[0]} and {worst[1]} (theta = {S[worst]:.12g})",
            pair=worst,
            condition=cond,
        )
    return OverlapMatrix(S, cond)


@dataclass(frozen=True)
class BeamAmplitudeSolution:
    fields: np.ndarray
    target: np.ndarray
    omega0: float
    condition: float
    residual: float

    @property
    def ratios(self) -> np.ndarray:
        """Peak amplitude of each beam relative to the first one."""
        return self.fields / self.fields[0]


def explicit_two_qubit(theta: float, e: Sequence[float], omega0: float = 1.0) -> np.ndarray:
    """Closed-form inverse for two qubits."""
    a, b = e
    return omega0 / (1.0 - theta * theta) * np.array([a - theta * b, b - theta * a])


def solve_amplitudes(geometry: BeamGeometry, e: Sequence[float], omega0: float = 1.0) -> BeamAmplitudeSolution:
    """Peak beam amplitudes E with S E = omega0 * e, via a dense linear solve."""
    e = np.asarray(e, dtype=float)
    if e.shape != (geometry.n_qubits,):
        raise ValueError(f"target vector needs {geometry.n_qubits} components")
    if abs(float(e @ e) - 1.0) > 1e-10:
        raise ValueError("target structural vector must have unit norm")
    ov = build_overlap_matrix(geometry)
    fields = omega0 * np.linalg.solve(ov.S, e)
    residual = float(np.linalg.norm(ov.S @ fields - omega0 * e))
    return BeamAmplitudeSolution(fields, e, float(omega0), ov.condition, residual)


def amplitude_ratio(x: float, theta: float) -> float:
    """Beam amplitude ratio E_b / E_a needed for a two-qubit ratio ``x = b/a``."""
    den = 1.0 - theta * x
    if abs(den) < 1e-15:
        raise ValueError(f"pole at theta * x = 1 (x = {x}, theta = {theta})")
    return (x - theta) / den
