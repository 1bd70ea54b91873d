"""Argument parsing helpers, config ingestion and record emission."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .beams import BeamGeometry
from .core import Pulse, StructuralVector, structural_from_ratio
from .grid import GridAxis, GridSpec
from .noise import NoiseSpec, SeriesRow, preset

PI = math.pi
_ANGLE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*(pi|π)?\s*$")


def parse_angle(text: str | float) -> float:
    """Angle in radians from ``"6.162pi"``, ``"-pi"``, ``"2*pi"`` or a plain number."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    if s in ("-pi", "-π"):
        return -PI
    m = _ANGLE.match(s)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"cannot parse angle {text!r}")
    num = float(m.group(1)) if m.group(1) is not None else 1.0
    return num * PI if m.group(2) else num


def parse_pulse(text: str) -> Pulse:
    """Pulse from ``"A=6.162pi,x=0.3333[,phi=0.1pi]"`` or ``"A=2pi,a=0.6,b=0.8"``."""
    fields = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"malformed pulse field {part!r} (expected key=value)")
        k, v = part.split("=", 1)
        fields[k.strip()] = v.strip()
    unknown = set(fields) - {"A", "x", "a", "b", "phi"}
    if unknown:
        raise ValueError(f"unknown pulse fields {sorted(unknown)}")
    if "A" not in fields:
        raise ValueError("pulse needs an area A=...")
    area = parse_angle(fields["A"])
    phase = parse_angle(fields.get("phi", "0"))
    if "x" in fields:
        if "a" in fields or "b" in fields:
            raise ValueError("give either x or (a, b), not both")
        e = structural_from_ratio(float(fields["x"]))
    elif "a" in fields and "b" in fields:
        e = StructuralVector.normalized(float(fields["a"]), float(fields["b"]))
    else:
        raise ValueError("pulse needs x=... or both a=... and b=...")
    return Pulse(area, e, phase)


def parse_axis(text: str) -> GridAxis:
    """Axis from ``"name=min:max:points"``, e.g. ``"A=0:20pi:400"``."""
    try:
        name, rng = text.split("=", 1)
        lo, hi, n = rng.split(":")
    except ValueError:
        raise ValueError(f"malformed axis {text!r} (expected name=min:max:points)") from None
    name = name.strip()
    conv = parse_angle if name.startswith("A") else float
    return GridAxis(name, conv(lo), conv(hi), int(n))


def parse_binding(text: str) -> tuple[str, float]:
    try:
        k, v = text.split("=", 1)
    except ValueError:
        raise ValueError(f"malformed binding {text!r} (expected name=value)") from None
    k = k.strip()
    return k, parse_angle(v) if k.startswith("A") else float(v)


def parse_series(text: str) -> list[int]:
    """``"l0..6"`` -> [0, ..., 6]; ``"1,3,5"`` -> [1, 3, 5]."""
    s = text.strip().lstrip("l")
    if ".." in s:
        lo, hi = s.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in s.split(",")]


# -- config files ------------------------------------------------------------


def load_config(path: str | Path) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def noise_spec_from_config(section: dict) -> NoiseSpec:
    section = dict(section)
    base = section.pop("preset", None)
    kw: dict[str, Any] = {}
    for k, v in section.items():
        if k not in NoiseSpec.__dataclass_fields__:
            raise ValueError(f"unknown noise field {k!r}")
        kw[k] = parse_angle(v) if k == "delta_phi" else v
    return preset(base, **kw) if base else NoiseSpec(**kw)


def grid_spec_from_config(section: dict) -> GridSpec:
    axes = []
    for ax in section.get("axes", []):
        conv = parse_angle if ax["name"].startswith("A") else float
        axes.append(GridAxis(ax["name"], conv(ax["min"]), conv(ax["max"]), int(ax["points"])))
    fixed = {k: (parse_angle(v) if k.startswith("A") else float(v)) for k, v in (section.get("fixed") or {}).items()}
    return GridSpec(tuple(axes), fixed, section.get("constraint", "none"))


def geometry_from_config(section: dict) -> tuple[BeamGeometry, list[np.ndarray], float]:
    """Geometry, target structural vectors (one per pulse) and omega0.

    Targets may be given as ``x`` ratios (two qubits) or as full vectors,
    which are normalized.
    """
    overlaps = None
    if "overlaps" in section:
        overlaps = {(int(i), int(j)): float(t) for i, j, t in section["overlaps"]}
    if "theta" in section:
        geom = BeamGeometry.from_theta(float(section["theta"]))
    else:
        geom = BeamGeometry(float(section.get("alpha", 1.0)), section["positions"], overlaps)
    targets = []
    for t in section.get("targets", []):
        if isinstance(t, dict) and "x" in t:
            e = structural_from_ratio(float(t["x"]))
            targets.append(np.array([e.a, e.b]))
        else:
            v = np.asarray(t.get("e") if isinstance(t, dict) else t, dtype=float)
            targets.append(v / np.linalg.norm(v))
    return geom, targets, float(section.get("omega0", 1.0))


# -- emission ----------------------------------------------------------------


def metadata(seed: int | None = None, **echo) -> dict:
    out: dict[str, Any] = {"version": __version__}
    if seed is not None:
        out["seed"] = seed
    out.update(echo)
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(record: Any) -> str:
    return json.dumps(_jsonable(record), indent=2, sort_keys=False)


def series_csv(rows: Sequence[SeriesRow], meta: dict) -> str:
    """Per-protocol noise statistics; deterministic text for fixed inputs."""
    out = io.StringIO()
    out.write("# " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["l_prime", "x", "A_pi", "ideal_f", "mean_f", "std_f", "truncations"])
    for r in rows:
        w.writerow(
            [r.l_prime, f"{r.x:.12g}", f"{r.area / PI:.12g}", f"{r.ideal_f:.12g}", f"{r.mean_f:.12g}", f"{r.std_f:.12g}", r.truncations]
        )
    return out.getvalue()
