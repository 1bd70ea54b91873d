"""Fidelity maps over one or two protocol parameters, with CSV round-tripping."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fidelity import fidelity_batch

PI = math.pi
AXIS_NAMES = ("A", "A1", "A2", "x", "x1", "x2")
CONSTRAINTS = ("none", "aligned", "anti-aligned", "orthogonal", "x2-neg-x1")
_ALIAS = {"A": "A1", "x": "x1"}
CSV_FORMAT = "{:.12g}"


@dataclass(frozen=True)
class GridAxis:
    """Sampled parameter. Area axes are stored in radians."""

    name: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.points < 2:
            raise ValueError(f"axis {self.name} needs at least 2 points")
        if not self.min < self.max:
            raise ValueError(f"axis {self.name} needs min < max")

    @property
    def is_area(self) -> bool:
        return self.name.startswith("A")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[GridAxis, ...]
    fixed: dict = field(default_factory=dict)
    constraint: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a grid has one or two axes")
        if self.constraint not in CONSTRAINTS:
            raise ValueError(f"unknown constraint {self.constraint!r}; expected one of {CONSTRAINTS}")
        names = [_ALIAS.get(a.name, a.name) for a in self.axes] + [_ALIAS.get(k, k) for k in self.fixed]
        if len(set(names)) != len(names):
            raise ValueError("a parameter is bound twice")
        for k in self.fixed:
            if k not in AXIS_NAMES:
                raise ValueError(f"unknown fixed parameter {k!r}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.points for a in self.axes)

    def to_dict(self) -> dict:
        return {
            "axes": [{"name": a.name, "min": a.min, "max": a.max, "points": a.points} for a in self.axes],
            "fixed": dict(self.fixed),
            "constraint": self.constraint,
        }


@dataclass
class GridResult:
    axes: list[tuple[str, np.ndarray]]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def axis(self, name: str) -> np.ndarray:
        for n, v in self.axes:
            if n == name:
                return v
        raise KeyError(name)


def _resolve(spec: GridSpec) -> dict[str, np.ndarray]:
    """Broadcast every parameter over the flattened grid (row-major)."""
    mesh = np.meshgrid(*[a.values() for a in spec.axes], indexing="ij")
    params = {_ALIAS.get(a.name, a.name): m.ravel() for a, m in zip(spec.axes, mesh)}
    size = mesh[0].size
    for k, v in spec.fixed.items():
        params[_ALIAS.get(k, k)] = np.full(size, float(v))
    return params


def _grid_arrays(spec: GridSpec):
    p = _resolve(spec)
    missing = [k for k in ("A1", "x1") if k not in p]
    if missing:
        raise ValueError(f"grid leaves {missing} unbound")
    x1 = p["x1"]
    a1 = 1.0 / np.sqrt(1.0 + x1 * x1)
    b1 = x1 * a1
    two = "A2" in p or "x2" in p or spec.constraint != "none"
    if not two:
        return p["A1"][:, None], a1[:, None], b1[:, None]
    if "A2" not in p:
        raise ValueError("two-pulse grid needs A2")
    c = spec.constraint
    if c == "none":
        if "x2" not in p:
            raise ValueError("two-pulse grid without a constraint needs x2")
        x2 = p["x2"]
        a2 = 1.0 / np.sqrt(1.0 + x2 * x2)
        b2 = x2 * a2
    elif "x2" in p:
        raise ValueError(f"x2 is determined by the {c} constraint")
    elif c == "aligned":
        a2, b2 = a1, b1
    elif c == "anti-aligned":
        a2, b2 = -a1, -b1
    elif c == "orthogonal":
        a2, b2 = -b1, a1
    else:  # x2-neg-x1
        a2, b2 = a1, -b1
    return np.column_stack([p["A1"], p["A2"]]), np.column_stack([a1, a2]), np.column_stack([b1, b2])


def compute_map(spec: GridSpec, threads: int = 1) -> GridResult:
    """Fidelity at every grid point; ``values`` has shape ``spec.shape``."""
    areas, a, b = _grid_arrays(spec)
    n = areas.shape[0]
    chunks = [c for c in np.array_split(np.arange(n), max(1, threads)) if c.size]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: fidelity_batch(areas[c], a[c], b[c]), chunks))
    values = np.clip(np.concatenate(parts), 0.0, 1.0).reshape(spec.shape)
    return GridResult([(ax.name, ax.values()) for ax in spec.axes], values, {"grid": spec.to_dict()})


# -- CSV ---------------------------------------------------------------------


def _column_name(name: str) -> str:
    return f"{name}_pi" if name.startswith("A") else name


def write_grid_csv(result: GridResult, stream=None) -> str:
    """Serialize a grid as CSV; area columns are in units of pi.

    Metadata travels as ``# {json}`` on the first line. Every number is
    written with 12 significant digits, so ``read_grid_csv`` returns values
    equal to ``float(f"{v:.12g}")`` and re-writing reproduces the same text.
    """
    out = io.StringIO()
    out.write("# " + json.dumps(result.metadata, sort_keys=True) + "\n")
    names = [n for n, _ in result.axes]
    out.write(",".join([_column_name(n) for n in names] + ["fidelity"]) + "\n")
    mesh = np.meshgrid(*[v for _, v in result.axes], indexing="ij")
    cols = [m.ravel() / PI if n.startswith("A") else m.ravel() for n, m in zip(names, mesh)]
    cols.append(np.asarray(result.values).ravel())
    for row in zip(*cols):
        out.write(",".join(CSV_FORMAT.format(float(v)) for v in row) + "\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_grid_csv(text: str) -> GridResult:
    lines = text.splitlines()
    metadata = {}
    if lines and lines[0].startswith("#"):
        metadata = json.loads(lines[0][1:].strip())
        lines = lines[1:]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:] if ln.strip()])
    names = [h[:-3] if h.endswith("_pi") else h for h in header[:-1]]
    axes = []
    for i, n in enumerate(names):
        # row-major order: first occurrence of each distinct value, in order
        col = data[:, i]
        _, first = np.unique(col, return_index=True)
        vals = col[np.sort(first)]
        axes.append((n, vals * PI if header[i].endswith("_pi") else vals))
    shape = tuple(len(v) for _, v in axes)
    return GridResult(axes, data[:, -1].reshape(shape), metadata)


def overlay_curve(x: np.ndarray, multiple: float = 2.0) -> np.ndarray:
    """Area (rad) at which the weaker site accumulates ``multiple * pi``: m pi sqrt(1+x^2)/x."""
    x = np.asarray(x, dtype=float)
    return multiple * PI * np.sqrt(1.0 + x * x) / x


def write_overlay_csv(x: np.ndarray, multiple: float = 2.0) -> str:
    lines = ["x,A_pi"]
    for xv, av in zip(x, overlay_curve(x, multiple)):
        lines.append(CSV_FORMAT.format(float(xv)) + "," + CSV_FORMAT.format(float(av / PI)))
    return "\n".join(lines) + "\n"


# -- ridge analysis ----------------------------------------------------------


def ridge_profile(result: GridResult, area_axis: str, ratio_axis: str, multiple: float = 2.0, band: float = 0.5 * PI):
    """Best fidelity within ``band`` of the overlay curve, for each ratio value.

    Returns ``(x, profile)``; columns with no grid point in the band give NaN.
    """
    names = [n for n, _ in result.axes]
    A = result.axis(area_axis)
    x = result.axis(ratio_axis)
    vals = result.values if names.index(area_axis) == 0 else result.values.T
    curve = overlay_curve(x, multiple)
    prof = np.full(x.size, np.nan)
    for j in range(x.size):
        m = np.abs(A - curve[j]) <= band
        if m.any():
            prof[j] = vals[m, j].max()
    return x, prof


def local_maxima(x: np.ndarray, y: np.ndarray) -> list[float]:
    """Interior points not lower than either neighbour (NaNs never qualify)."""
    out = []
    for j in range(1, len(y) - 1):
        if np.isnan(y[j - 1 : j + 2]).any():
            continue
        if y[j] >= y[j - 1] and y[j] >= y[j + 1]:
            out.append(float(x[j]))
    return out
