"""Optimal single- and two-pulse parameters from approximate Diophantine solutions.

A single pulse realizes the gate only if A, aA and bA are all odd multiples
of 2pi simultaneously, i.e. m^2 + n^2 = p^2 with every integer of the form
4l + 2. That has no solutions, so protocols come from near-misses: integer
triples (l, l', l'') give a seed (x_op, A_op), which is then polished by a
local maximization of the fidelity.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import Pulse, PulseSequence, StructuralVector, structural_from_ratio
from .fidelity import fidelity_from_u11, fidelity_single, two_pulse_closed_form

PI = math.pi
REFINE_XTOL = 1e-8
REFINE_MAXITER = 500
DEDUP_TOL = 1e-6
DEFAULT_RADIUS = (0.2, 0.5 * PI)
MAX_SEARCH_BOUND = 10**6


# -- local refinement ------------------------------------------------------


@dataclass(frozen=True)
class RefineResult:
    params: tuple[float, ...]
    fidelity: float
    converged: bool
    iterations: int


def maximize_local(
    fun: Callable[[np.ndarray], float],
    p0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    xtol: float = REFINE_XTOL,
    maxiter: int = REFINE_MAXITER,
) -> RefineResult:
    """Bounded Nelder-Mead maximization of ``fun`` starting from ``p0``.

    Never returns a point worse than the start. Iteration exhaustion is
    reported through a warning and ``converged=False`` with the best point
    found so far.
    """
    p0 = np.asarray(p0, dtype=float)
    f0 = float(fun(p0))
    res = minimize(
        lambda p: -fun(p),
        p0,
        method="Nelder-Mead",
        bounds=list(zip(lower, upper)),
        options={"xatol": xtol, "fatol": 1e-15, "maxiter": maxiter, "maxfev": 4 * maxiter},
    )
    converged = bool(res.success)
    if not converged:
        warnings.warn(f"local refinement stopped after {res.nit} iterations: {res.message}", RuntimeWarning, stacklevel=2)
    if -res.fun < f0:
        return RefineResult(tuple(float(v) for v in p0), f0, converged, int(res.nit))
    return RefineResult(tuple(float(v) for v in res.x), float(-res.fun), converged, int(res.nit))


def refine_local(x0: float, A0: float, radius: tuple[float, float] = DEFAULT_RADIUS) -> tuple[float, float, float]:
    """Maximize the single-pulse fidelity in a box around ``(x0, A0)``.

    ``radius`` is (half-width in x, half-width in A [rad]). Returns
    ``(x*, A*, F*)`` with ``F* >= F(x0, A0)``.
    """
    r = _refine_single(x0, A0, radius)
    x, a_pi = r.params
    return x, a_pi * PI, r.fidelity


def _refine_single(x0: float, A0: float, radius=DEFAULT_RADIUS) -> RefineResult:
    rx, ra = radius
    lo_x = max(x0 - rx, 0.0) if x0 >= 0 else x0 - rx

    # A is optimized in units of pi so both coordinates share one tolerance
    def f(p):
        return fidelity_single(p[1] * PI, p[0])

    return maximize_local(f, [x0, A0 / PI], [lo_x, (A0 - ra) / PI], [x0 + rx, (A0 + ra) / PI])


# -- single-pulse candidates ----------------------------------------------


@dataclass(frozen=True)
class ProtocolCandidate:
    l: int
    l_prime: int
    l_dprime: int
    x_op: float
    A_op: float
    f_ideal: float
    x_refined: float
    A_refined: float
    f_refined: float
    converged: bool = True

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.l, self.l_prime, self.l_dprime)

    def to_record(self) -> dict:
        return {
            "l": self.l,
            "l_prime": self.l_prime,
            "l_dprime": self.l_dprime,
            "x_op": self.x_op,
            "A_op": self.A_op,
            "A_op_pi": self.A_op / PI,
            "f_ideal": self.f_ideal,
            "x_refined": self.x_refined,
            "A_refined": self.A_refined,
            "A_refined_pi": self.A_refined / PI,
            "f_refined": self.f_refined,
            "converged": self.converged,
        }


def candidate_params(l: int, l_prime: int, l_dprime: int) -> tuple[float, float]:
    """Seed ``(x_op, A_op)`` for the integer triple ``l >= l' >= l'' >= 0``."""
    if not (l >= l_prime >= l_dprime >= 0):
        raise ValueError(f"need l >= l' >= l'' >= 0, got ({l}, {l_prime}, {l_dprime})")
    x_op = (4 * l_dprime + 2) / (4 * l_prime + 2)
    A_op = (2 * l + 1 + math.hypot(2 * l_prime + 1, 2 * l_dprime + 1)) * PI
    return x_op, A_op


def candidate_triples(max_area: float) -> list[tuple[int, int, int]]:
    out = []
    l = 0
    while candidate_params(l, 0, 0)[1] <= max_area:
        for lp in range(l + 1):
            for ldp in range(lp + 1):
                if candidate_params(l, lp, ldp)[1] <= max_area:
                    out.append((l, lp, ldp))
        l += 1
    return out


def make_candidate(l: int, l_prime: int, l_dprime: int) -> ProtocolCandidate:
    x_op, A_op = candidate_params(l, l_prime, l_dprime)
    f_ideal = float(fidelity_single(A_op, x_op))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r = _refine_single(x_op, A_op)
    return ProtocolCandidate(
        l, l_prime, l_dprime, x_op, A_op, f_ideal, r.params[0], r.params[1] * PI, r.fidelity, r.converged
    )


def enumerate_candidates(max_area: float, threads: int = 1) -> list[ProtocolCandidate]:
    """Every triple with ``A_op <= max_area``, refined, deduplicated, best first.

    Triples that refine into the same optimum (within 1e-6 in x and A) are
    collapsed onto the one with the smallest indices.
    """
    if not max_area > 2 * PI:
        raise ValueError("max_area must exceed 2*pi")
    triples = candidate_triples(max_area)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        cands = list(pool.map(lambda t: make_candidate(*t), triples))
    kept: list[ProtocolCandidate] = []
    for c in cands:
        if any(abs(c.x_refined - k.x_refined) < DEDUP_TOL and abs(c.A_refined - k.A_refined) < DEDUP_TOL for k in kept):
            continue
        kept.append(c)
    kept.sort(key=lambda c: (-c.f_refined, c.triple))
    return kept


# -- Diophantine near-solutions --------------------------------------------


@dataclass(frozen=True, order=True)
class DiophantineTuple:
    """Integers ``(m, n, p)`` or ``(m, n, p, q)``, all 2 mod 4.

    The last entry approximates the hypotenuse; ``relative_error`` is
    |last^2 - sum(others^2)| / last^2.
    """

    relative_error: float
    values: tuple[int, ...]


def _admissible(bound: int) -> np.ndarray:
    return np.arange(2, bound + 1, 4, dtype=np.int64)


def _near_hypotenuse(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The admissible integers just below and just above sqrt(s)."""
    r = np.floor(np.sqrt(s.astype(np.float64))).astype(np.int64)
    r -= (r * r > s).astype(np.int64)
    r += ((r + 1) * (r + 1) <= s).astype(np.int64)
    lo = r - ((r - 2) % 4)
    return lo, lo + 4


def _pair_sums(terms: int, adm: np.ndarray):
    """Yield (leading tuple columns, sum of squares) in chunks, m <= n (<= p)."""
    if terms == 2:
        for i, m in enumerate(adm):
            n = adm[i:]
            yield [np.full_like(n, m), n], m * m + n * n
    else:
        for i, m in enumerate(adm):
            for j in range(i, adm.size):
                n = adm[j]
                p = adm[j:]
                yield [np.full_like(p, m), np.full_like(p, n), p], m * m + n * n + p * p


def diophantine_search(terms: int, bound: int, limit: int | None = 20) -> list[DiophantineTuple]:
    """Best approximate solutions of a sum-of-squares equation in 4l+2 integers.

    Scans every nondecreasing tuple of admissible integers up to ``bound``
    and pairs it with the nearest admissible hypotenuse candidates (also
    ``<= bound``). Results are sorted by relative error; at most ``limit``
    are kept (``None`` keeps all).
    """
    if terms not in (2, 3):
        raise ValueError("terms must be 2 or 3")
    if bound > MAX_SEARCH_BOUND:
        raise ValueError(f"bound must be <= {MAX_SEARCH_BOUND}")
    adm = _admissible(bound)
    pool_err: list[np.ndarray] = []
    pool_rows: list[np.ndarray] = []
    keep = limit

    for cols, s in _pair_sums(terms, adm):
        for hyp in _near_hypotenuse(s):
            ok = (hyp >= 2) & (hyp <= bound)
            if not ok.any():
                continue
            h = hyp[ok]
            err = np.abs(h * h - s[ok]) / (h * h).astype(np.float64)
            rows = np.column_stack([c[ok] for c in cols] + [h])
            pool_err.append(err)
            pool_rows.append(rows)
        if keep is not None and sum(e.size for e in pool_err) > 8 * keep + 4096:
            pool_err, pool_rows = _prune(pool_err, pool_rows, keep)

    if not pool_err:
        return []
    err = np.concatenate(pool_err)
    rows = np.concatenate(pool_rows)
    order = np.lexsort(tuple(rows[:, k] for k in range(rows.shape[1] - 1, -1, -1)) + (err,))
    if keep is not None:
        order = order[:keep]
    return [DiophantineTuple(float(err[i]), tuple(int(v) for v in rows[i])) for i in order]


def _prune(pool_err, pool_rows, keep):
    err = np.concatenate(pool_err)
    rows = np.concatenate(pool_rows)
    idx = np.argpartition(err, min(keep, err.size - 1))[: keep + 1]
    cut = err[idx].max()
    mask = err <= cut  # keep ties so the final ordering stays exact
    return [err[mask]], [rows[mask]]


def count_exact(terms: int, bound: int) -> int:
    """Number of exact solutions with every entry admissible and ``<= bound``."""
    if terms not in (2, 3):
        raise ValueError("terms must be 2 or 3")
    if bound > MAX_SEARCH_BOUND:
        raise ValueError(f"bound must be <= {MAX_SEARCH_BOUND}")
    adm = _admissible(bound)
    total = 0
    for _, s in _pair_sums(terms, adm):
        for hyp in _near_hypotenuse(s):
            total += int(np.count_nonzero((hyp * hyp == s) & (hyp <= bound)))
    return total


def mod16_certificate(terms: int) -> bool:
    """True when ``terms`` squares of 4l+2 integers can never sum to such a square.

    Every (4l+2)^2 is 4 mod 16, so a sum of k of them is 4k mod 16, which
    equals 4 only for k = 1 mod 4.
    """
    residues = {((4 * l + 2) ** 2) % 16 for l in range(16)}
    sums = {0}
    for _ in range(terms):
        sums = {(s + r) % 16 for s in sums for r in residues}
    return not (sums & residues)


# -- two-pulse families -----------------------------------------------------

FAMILIES = ("checkered", "aligned", "anti-aligned", "orthogonal")


@dataclass(frozen=True)
class FamilyMember:
    family: str
    A1: float
    A2: float
    x1: float
    x2: float
    f_seed: float
    A1_refined: float
    A2_refined: float
    x1_refined: float
    x2_refined: float
    f_refined: float

    def to_record(self) -> dict:
        rec = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in ("A1", "A2", "A1_refined", "A2_refined"):
            rec[k + "_pi"] = rec[k] / PI
        return rec


def second_vector(family: str, e1: StructuralVector, x2: float | None = None, convention: str = "vector") -> StructuralVector:
    """Structural vector of the second pulse implied by the family constraint."""
    if family == "aligned":
        return e1
    if family == "anti-aligned":
        if convention == "ratio":
            return structural_from_ratio(-e1.ratio)
        return -e1
    if family == "orthogonal":
        return StructuralVector(-e1.b, e1.a) if e1.a >= 0 else StructuralVector(e1.b, -e1.a)
    if family == "checkered":
        if x2 is None:
            raise ValueError("checkered family needs an explicit x2")
        return structural_from_ratio(x2)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def two_pulse_fidelity(A1: float, A2: float, e1: StructuralVector, e2: StructuralVector) -> float:
    uv, ua, ub = two_pulse_closed_form(A1, A2, e1, e2)
    return float(fidelity_from_u11(uv, ua, ub))


def _x_lattice(budget: float) -> list[float]:
    xs = set()
    lp = 0
    while (4 * lp + 2) * PI <= budget + 1e-9:
        for ldp in range(lp + 1):
            xs.add((4 * ldp + 2) / (4 * lp + 2))
        lp += 1
    return sorted(xs, reverse=True)


def _checkered_pairs(budget: float, A1: float | None) -> list[tuple[float, float]]:
    n = int(budget / PI) + 1
    odd = [(4 * l + 2) * PI for l in range(n) if (4 * l + 2) * PI <= budget + 1e-9]
    even = [4 * m * PI for m in range(n) if 4 * m * PI <= budget + 1e-9]
    pairs = {(o, e) for o in odd for e in even if o + e <= budget + 1e-9}
    pairs |= {(e, o) for o, e in pairs}
    if A1 is not None:
        pairs = {(A1, a2) for a1, a2 in pairs if abs(a1 - A1) < 1e-9}
    return sorted(pairs)


def _sum_pairs(budget: float, A1: float | None, sign: int) -> list[tuple[float, float]]:
    """(A1, A2) on a pi/2 lattice with A1 + sign*A2 = (4n+2)pi and |A1|+|A2| <= budget."""
    half = 0.5 * PI
    out = []
    n = 0
    while (4 * n + 2) * PI <= budget + 1e-9:
        target = (4 * n + 2) * PI
        if A1 is not None:
            a2 = sign * (target - A1)
            if abs(A1) + abs(a2) <= budget + 1e-9:
                out.append((A1, a2))
        else:
            k_max = int(round((budget - target) / 2 / half)) if sign < 0 else int(round(target / half))
            for k in range(k_max + 1):
                if sign > 0:
                    a1 = k * half
                    a2 = target - a1
                else:
                    a2 = k * half
                    a1 = target + a2
                if abs(a1) + abs(a2) <= budget + 1e-9:
                    out.append((a1, a2))
        n += 1
    return out


def _refine_member(family, A1, A2, x1, x2, pin_x1, pin_A1, convention) -> FamilyMember:
    rx, ra = DEFAULT_RADIUS
    e1 = structural_from_ratio(x1)
    e2 = second_vector(family, e1, x2, convention)
    f_seed = two_pulse_fidelity(A1, A2, e1, e2)

    # free parameters per family; everything else is held by the constraint
    if family == "checkered":
        names = ["x2"] if pin_x1 else ["x1", "x2"]
    elif family in ("aligned", "anti-aligned"):
        names = [] if pin_x1 else ["x1"]
    else:
        names = ([] if pin_x1 else ["x1"]) + ([] if pin_A1 else ["A1"]) + ["A2"]
    vals = {"A1": A1, "A2": A2, "x1": x1, "x2": x2}

    def unpack(p):
        v = dict(vals)
        for name, val in zip(names, p):
            v[name] = val * PI if name.startswith("A") else val
        return v

    def f(p):
        v = unpack(p)
        if family == "orthogonal" and v["x1"] == 0.0:
            return 0.0
        e1_ = structural_from_ratio(v["x1"])
        return two_pulse_fidelity(v["A1"], v["A2"], e1_, second_vector(family, e1_, v["x2"], convention))

    if names:
        p0 = [vals[k] / PI if k.startswith("A") else vals[k] for k in names]
        lo = [p - (ra / PI if k.startswith("A") else rx) for p, k in zip(p0, names)]
        hi = [p + (ra / PI if k.startswith("A") else rx) for p, k in zip(p0, names)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            r = maximize_local(f, p0, lo, hi)
        best = unpack(r.params)
        f_ref = r.fidelity
    else:
        best, f_ref = vals, f_seed
    e1r = structural_from_ratio(best["x1"])
    x2r = second_vector(family, e1r, best["x2"], convention).ratio
    seed_x2 = e2.ratio
    return FamilyMember(family, A1, A2, x1, seed_x2, f_seed, best["A1"], best["A2"], best["x1"], x2r, f_ref)


def two_pulse_families(
    family: str,
    budget: float,
    x1: float | None = None,
    A1: float | None = None,
    convention: str = "vector",
    threads: int = 1,
) -> list[FamilyMember]:
    """Seeds for a two-pulse protocol family, each refined under its constraint.

    - ``checkered``: areas alternate (4l+2)pi / 4m pi (either order), which
      pins U^V_11 = -1 for any vectors; both ratios are refined.
    - ``aligned`` / ``anti-aligned``: A1 +/- A2 = (4n+2)pi on a pi/2 lattice,
      with e2 = +/-e1 (``convention="ratio"`` uses x2 = -x1 instead); the
      ratio is refined.
    - ``orthogonal``: checkered area seeds with x2 = -1/x1; the ratio and both
      areas are refined with orthogonality held.

    ``x1`` and ``A1`` pin the first pulse. ``budget`` bounds |A1| + |A2|.
    Results are sorted by refined fidelity, best first.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if convention not in ("vector", "ratio"):
        raise ValueError("convention must be 'vector' or 'ratio'")
    if not budget > 2 * PI:
        raise ValueError("budget must exceed 2*pi")
    xs = [float(x1)] if x1 is not None else _x_lattice(budget)
    if family == "orthogonal" and any(x == 0.0 for x in xs):
        raise ValueError("orthogonal family needs x1 != 0")

    if family in ("checkered", "orthogonal"):
        pairs = _checkered_pairs(budget, A1)
    else:
        pairs = _sum_pairs(budget, A1, +1 if family == "aligned" else -1)
    seeds = [(a1, a2, x) for a1, a2 in pairs for x in xs]

    def run(seed):
        a1, a2, x = seed
        return _refine_member(family, a1, a2, x, x, x1 is not None, A1 is not None, convention)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        members = list(pool.map(run, seeds))
    members.sort(key=lambda m: (-m.f_refined, m.A1, m.A2, m.x1))
    return members


def member_sequence(m: FamilyMember, refined: bool = True, convention: str = "vector") -> PulseSequence:
    """Pulse sequence for a family member (refined or seed parameters)."""
    A1, A2, x1, x2 = (m.A1_refined, m.A2_refined, m.x1_refined, m.x2_refined) if refined else (m.A1, m.A2, m.x1, m.x2)
    e1 = structural_from_ratio(x1)
    e2 = structural_from_ratio(x2) if m.family == "checkered" else second_vector(m.family, e1, x2, convention)
    return PulseSequence([Pulse(A1, e1), Pulse(A2, e2)])
