"""Compiled vs pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Times the two hot kernels directly (batched sequence U11 and the RK4
integrator) and checks that both backends return the same numbers.
"""

from __future__ import annotations

import argparse
import json
import platform
import timeit

import numpy as np

from rydgate import _kernels_py

try:
    from rydgate import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _batch(n: int, p: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, p, 2))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return rng.uniform(-40, 40, (n, p)), v[..., 0].copy(), v[..., 1].copy(), rng.uniform(0, 6.3, (n, p))


def _rk4_case(dim: int, steps: int, seed: int = 1):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = m + m.conj().T
    return m, rng.uniform(0, 3, 2 * steps + 1), 1.0 / steps


CASES = {
    "sequence_u11 80000x1": lambda: ("sequence_u11", _batch(80_000, 1)),
    "sequence_u11 20000x4": lambda: ("sequence_u11", _batch(20_000, 4)),
    "rk4_evolve 3x3, 20000 steps": lambda: ("rk4_evolve", _rk4_case(3, 20_000)),
    "rk4_evolve 2x2, 20000 steps": lambda: ("rk4_evolve", _rk4_case(2, 20_000)),
}


def _best(fn, args, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def run(repeat: int = 5) -> list[dict]:
    rows = []
    for name, make in CASES.items():
        kernel, args = make()
        py = getattr(_kernels_py, kernel)
        row = {"case": name, "numpy_s": _best(py, args, repeat)}
        if _compiled is not None:
            cy = getattr(_compiled, kernel)
            a, b = cy(*args), py(*args)
            err = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b)) if isinstance(a, tuple) else float(np.max(np.abs(a - b)))
            row.update(cython_s=_best(cy, args, repeat), max_abs_diff=err)
            row["speedup"] = row["numpy_s"] / row["cython_s"]
        rows.append(row)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results to this path")
    args = ap.parse_args(argv)

    rows = run(args.repeat)
    print(f"python {platform.python_version()}, numpy {np.__version__}, compiled backend: {'yes' if _compiled else 'no'}")
    print(f"{'case':32s} {'numpy [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for r in rows:
        if "cython_s" in r:
            print(f"{r['case']:32s} {r['numpy_s']:11.4f} {r['cython_s']:11.4f} {r['speedup']:8.1f} {r['max_abs_diff']:11.1e}")
        else:
            print(f"{r['case']:32s} {r['numpy_s']:11.4f} {'-':>11s} {'-':>8s} {'-':>11s}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
