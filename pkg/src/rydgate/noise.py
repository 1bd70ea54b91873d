"""Shot-to-shot fluctuation model and Monte Carlo fidelity statistics.

Each shot perturbs every pulse independently:

* area   A -> A (1 + g_I dI / 2)
* ratio  x -> x (1 + g_I dI + g_R c(x) theta dR),  c(x)^2 = 2 + 1/(x^2 (x^2 + 1))
* phase  phi -> phi + g_phi dphi

with standard normal draws (g_I, g_R, g_phi). The same intensity draw g_I
moves both the area and the ratio of a pulse, so the marginal relative
spread of x is ``delta_ratio``. The perturbed ratio is mapped back to a
unit structural vector keeping the sign of ``a``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .core import Pulse, PulseSequence, StructuralVector
from .diophantine import candidate_params
from .errors import NumericalError
from .fidelity import fidelity_batch, fidelity_single

PI = math.pi
T_REF = 25.0  # uK
DELTA_R_REF = 0.01
# beam overlap at the qubit sites; with larger overlaps the ultra regime
# stops being insensitive to 3 uK -> 30 uK heating
DEFAULT_THETA = 0.25
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class NoiseSpec:
    """Fluctuation magnitudes.

    ``delta_I`` relative intensity std, ``delta_R`` relative interatomic
    distance std, ``delta_phi`` absolute phase std (rad). ``delta_R`` may be
    left ``None`` and derived from ``temperature`` (uK) or from a diffusion
    estimate (``diffusion_D``, ``t_gate``, ``distance``; consistent units).
    """

    delta_I: float = 0.0
    delta_R: float | None = None
    delta_phi: float = 0.01 * PI
    temperature: float | None = None
    t_gate: float | None = None
    diffusion_D: float | None = None
    distance: float | None = None
    theta: float = DEFAULT_THETA
    samples: int = 1000
    seed: int = 0
    delta_R_ref: float = DELTA_R_REF
    T_ref: float = T_REF

    def __post_init__(self):
        for name in ("delta_I", "delta_R", "delta_phi", "temperature", "t_gate", "diffusion_D"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.theta < 1:
            raise ValueError("theta must lie in [0, 1)")

    def with_(self, **kw) -> NoiseSpec:
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


PRESETS = {
    "none": NoiseSpec(delta_I=0.0, delta_R=0.0, delta_phi=0.0),
    "standard": NoiseSpec(delta_I=0.03, temperature=25.0, delta_phi=0.1 * PI),
    "ultra": NoiseSpec(delta_I=0.007, temperature=3.0, delta_phi=0.01 * PI),
}


def preset(name: str, **overrides) -> NoiseSpec:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    return base.with_(**overrides) if overrides else base


def delta_area(delta_I: float) -> float:
    """Relative spread of the pulse area for relative intensity spread ``delta_I``."""
    if delta_I < 0:
        raise ValueError("delta_I must be non-negative")
    return 0.5 * delta_I


def _position_factor(x: float) -> float:
    return math.sqrt(2.0 + 1.0 / (x * x * (x * x + 1.0)))


def delta_ratio(x: float, theta: float, delta_I: float, delta_R: float) -> float:
    """Relative spread of the structural ratio ``x``."""
    if x == 0 or not math.isfinite(x):
        raise ValueError("delta_ratio is singular at x = 0")
    return math.hypot(delta_I, _position_factor(x) * theta * delta_R)


def delta_R_effective(spec: NoiseSpec) -> float:
    """Relative distance spread: explicit value, else temperature, else diffusion.

    Temperature scaling assumes the mean square displacement grows linearly
    with T, anchored at ``delta_R_ref`` for ``T_ref``.
    """
    if spec.delta_R is not None:
        return spec.delta_R
    if spec.temperature is not None:
        return spec.delta_R_ref * math.sqrt(spec.temperature / spec.T_ref)
    if spec.diffusion_D is not None and spec.t_gate is not None:
        if not spec.distance:
            raise ValueError("diffusion estimate needs the interatomic distance")
        return math.sqrt(2.0 * spec.diffusion_D * spec.t_gate) / spec.distance
    raise ValueError("no position noise anchor: give delta_R, temperature, or (diffusion_D, t_gate, distance)")


def _rng(seed: int, sample_index: int) -> np.random.Generator:
    # counter-based: each sample owns the Philox counter block [0, index, 0, 0]
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, sample_index, 0, 0]))


def _sample_arrays(pulses: Sequence[Pulse], spec: NoiseSpec, dR: float, sample_index: int):
    rng = _rng(spec.seed, sample_index)
    n = len(pulses)
    areas = np.empty(n)
    a = np.empty(n)
    b = np.empty(n)
    phi = np.empty(n)
    redraws = 0
    dA = delta_area(spec.delta_I)
    for k, p in enumerate(pulses):
        ea, eb = p.structural.a, p.structural.b
        degenerate = ea == 0.0 or eb == 0.0
        pos = 0.0 if degenerate else _position_factor(eb / ea) * spec.theta * dR
        for _ in range(MAX_REDRAWS):
            gI, gR, gP = rng.standard_normal(3)
            fx = 1.0 if degenerate else 1.0 + gI * spec.delta_I + gR * pos
            if fx > 0.0:
                break
            redraws += 1
        else:
            raise NumericalError(f"could not draw a positive ratio factor for pulse {k}")
        areas[k] = p.area * (1.0 + gI * dA)
        phi[k] = p.phase + gP * spec.delta_phi
        if degenerate:
            a[k], b[k] = ea, eb
        else:
            x = (eb / ea) * fx
            na = math.copysign(1.0 / math.sqrt(1.0 + x * x), ea)
            a[k], b[k] = na, x * na
    return areas, a, b, phi, redraws


def sample_protocol(seq: PulseSequence, spec: NoiseSpec, sample_index: int) -> PulseSequence:
    """One perturbed copy of ``seq``; identical for identical ``(spec.seed, sample_index)``."""
    areas, a, b, phi, _ = _sample_arrays(list(seq), spec, delta_R_effective(spec), sample_index)
    return PulseSequence(
        Pulse(float(areas[k]), StructuralVector(float(a[k]), float(b[k])), float(phi[k])) for k in range(len(areas))
    )


@dataclass(frozen=True)
class NoiseSummary:
    mean_f: float
    std_f: float
    ideal_f: float
    samples: int
    truncations: int
    delta_R: float
    fidelities: np.ndarray | None = None

    def to_record(self) -> dict:
        return {
            "ideal_f": self.ideal_f,
            "mean_f": self.mean_f,
            "std_f": self.std_f,
            "samples": self.samples,
            "truncations": self.truncations,
            "delta_R": self.delta_R,
        }


def _chunk_fidelities(pulses, spec, dR, indices):
    n, p = len(indices), len(pulses)
    areas = np.empty((n, p))
    a = np.empty((n, p))
    b = np.empty((n, p))
    phi = np.empty((n, p))
    redraws = 0
    for row, i in enumerate(indices):
        areas[row], a[row], b[row], phi[row], r = _sample_arrays(pulses, spec, dR, i)
        redraws += r
    return fidelity_batch(areas, a, b, phi), redraws


def monte_carlo(seq: PulseSequence, spec: NoiseSpec, threads: int = 1, keep_samples: bool = False) -> NoiseSummary:
    """Mean and standard deviation of the fidelity over ``spec.samples`` shots.

    Samples are split into contiguous chunks across ``threads`` workers and
    joined in index order, so the result does not depend on ``threads``.
    """
    pulses = list(seq)
    if not pulses:
        raise ValueError("empty pulse sequence")
    dR = delta_R_effective(spec)
    ideal = fidelity_batch(*[arr for arr in PulseSequence(pulses).as_arrays()])[0]
    chunks = [c for c in np.array_split(np.arange(spec.samples), max(1, threads)) if c.size]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: _chunk_fidelities(pulses, spec, dR, c), chunks))
    f = np.concatenate([p[0] for p in parts])
    truncations = sum(p[1] for p in parts)
    # shifted moments: identical samples give exactly mean = f[0], std = 0
    d = f - f[0]
    return NoiseSummary(
        mean_f=float(f[0] + np.mean(d)),
        std_f=float(np.std(d)),
        ideal_f=float(ideal),
        samples=spec.samples,
        truncations=int(truncations),
        delta_R=dR,
        fidelities=f if keep_samples else None,
    )


def candidate_sequence(l: int, l_prime: int, l_dprime: int) -> PulseSequence:
    """Single-pulse protocol at the analytic optimum of an integer triple."""
    x, A = candidate_params(l, l_prime, l_dprime)
    return PulseSequence([Pulse.from_ratio(A, x)])


@dataclass(frozen=True)
class SeriesRow:
    l_prime: int
    x: float
    area: float
    ideal_f: float
    mean_f: float
    std_f: float
    truncations: int


def noise_series(l_values: Sequence[int], spec: NoiseSpec, threads: int = 1) -> list[SeriesRow]:
    """Monte Carlo statistics for the single-pulse protocols (l', l', 0)."""
    rows = []
    for lp in l_values:
        x, A = candidate_params(lp, lp, 0)
        s = monte_carlo(candidate_sequence(lp, lp, 0), spec, threads=threads)
        rows.append(SeriesRow(lp, x, A, float(fidelity_single(A, x)), s.mean_f, s.std_f, s.truncations))
    return rows
