"""``rydgate`` command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 verification failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beams import BeamGeometry, amplitude_ratio, build_overlap_matrix, solve_amplitudes
from .core import PulseSequence, Subsystem, compose, gpa, structural_from_ratio
from .diophantine import FAMILIES, enumerate_candidates, two_pulse_families
from .errors import NumericalError
from .fidelity import classify_mechanism, fidelity
from .grid import CONSTRAINTS, GridSpec, compute_map, write_grid_csv, write_overlay_csv
from .io import (
    dumps,
    geometry_from_config,
    grid_spec_from_config,
    load_config,
    metadata,
    noise_spec_from_config,
    parse_angle,
    parse_axis,
    parse_binding,
    parse_pulse,
    parse_series,
    series_csv,
)
from .noise import PRESETS, monte_carlo, noise_series, preset

PI = math.pi
EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    env = os.environ.get("RYDGATE_THREADS")
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"RYDGATE_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("RYDGATE_THREADS must be >= 1")
    return n


def _pi(v: float) -> str:
    return f"{v / PI:.6g}pi"


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- subcommands -------------------------------------------------------------


def cmd_fidelity(args) -> int:
    if not args.pulse:
        raise UsageError("give at least one --pulse")
    seq = PulseSequence(parse_pulse(p) for p in args.pulse)
    u = compose(seq)
    f = fidelity(u)
    labels = classify_mechanism(seq)
    if args.json:
        rec = {
            "metadata": metadata(args.seed, pulses=args.pulse),
            "fidelity": f,
            "u11": {s.name: u.u11(s) for s in Subsystem},
            "gpa_pi": [{s.name: gpa(p, s) / PI for s in Subsystem} for p in seq],
            "mechanism": {s.name: {"label": m.mechanism.value, "w0": m.w0, "w1": m.w1} for s, m in labels.items()},
        }
        print(dumps(rec))
        return EXIT_OK
    print(f"F = {f:.6f}")
    for s in Subsystem:
        z = u.u11(s)
        print(f"U^{s.name}(1,1) = {z.real:+.6f} {z.imag:+.6f}i")
    print("pulse   A           GPA_V       GPA_A       GPA_B")
    for k, p in enumerate(seq, 1):
        print(f"{k:<7d} " + " ".join(f"{_pi(v):<11s}" for v in (p.area, *(gpa(p, s) for s in Subsystem))))
    print("mechanism: " + ", ".join(f"{s.name}={m.mechanism.value} (w0={m.w0:.3g}, w1={m.w1:.3g})" for s, m in labels.items()))
    return EXIT_OK


def cmd_map(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        spec = grid_spec_from_config(cfg.get("grid", cfg))
    else:
        if not args.axis:
            raise UsageError("give --axis (once or twice) or --config")
        spec = GridSpec(
            tuple(parse_axis(a) for a in args.axis),
            dict(parse_binding(b) for b in args.fix or []),
            args.constraint,
        )
    res = compute_map(spec, threads=args.threads)
    res.metadata = metadata(args.seed, grid=spec.to_dict())
    _emit(write_grid_csv(res), args.out)
    if args.overlay:
        ratio = next((v for n, v in res.axes if n.startswith("x")), None)
        if ratio is None:
            raise UsageError("--overlay needs a ratio axis")
        _emit(write_overlay_csv(ratio, args.overlay_multiple), args.overlay)
    return EXIT_OK


def cmd_optimize(args) -> int:
    max_area = parse_angle(args.max_area)
    if not max_area > 2 * PI:
        raise UsageError("--max-area must exceed 2pi")
    meta = metadata(args.seed, max_area_pi=max_area / PI, family=args.family)
    if args.family == "single":
        records = [c.to_record() for c in enumerate_candidates(max_area, threads=args.threads)]
    else:
        x1 = float(args.x1) if args.x1 is not None else None
        A1 = parse_angle(args.A1) if args.A1 is not None else None
        members = two_pulse_families(args.family, max_area, x1=x1, A1=A1, convention=args.convention, threads=args.threads)
        records = [m.to_record() for m in members]
    if args.limit is not None:
        records = records[: args.limit]
    print(dumps({"metadata": meta, "candidates": records}))
    return EXIT_OK


def cmd_beams(args) -> int:
    if args.geometry:
        cfg = load_config(args.geometry)
        geom, targets, omega0 = geometry_from_config(cfg.get("geometry", cfg))
    else:
        if args.theta is None:
            raise UsageError("give --geometry or --theta")
        geom, omega0 = BeamGeometry.from_theta(args.theta), args.omega0
        targets = []
        for t in args.target or []:
            if "," in t:
                v = np.array([float(c) for c in t.split(",")])
                targets.append(v / np.linalg.norm(v))
            else:
                e = structural_from_ratio(float(t))
                targets.append(np.array([e.a, e.b]))
    if not targets:
        raise UsageError("no target structural vectors given")
    ov = build_overlap_matrix(geom)
    pulses = []
    for k, e in enumerate(targets, 1):
        sol = solve_amplitudes(geom, e, omega0)
        rec = {"pulse": k, "target": sol.target, "fields": sol.fields, "ratios": sol.ratios, "residual": sol.residual}
        if geom.n_qubits == 2 and e[0] != 0.0:
            theta = geom.theta(0, 1)
            rec["ratio"] = amplitude_ratio(e[1] / e[0], theta)
        pulses.append(rec)
    print(dumps({"metadata": metadata(args.seed), "overlap_matrix": ov.S, "condition": ov.condition, "pulses": pulses}))
    return EXIT_OK


def _noise_spec(args):
    if args.config:
        cfg = load_config(args.config)
        spec = noise_spec_from_config(cfg.get("noise", cfg))
    else:
        spec = preset(args.preset)
    over = {
        "delta_I": args.delta_I,
        "delta_R": args.delta_R,
        "delta_phi": parse_angle(args.delta_phi) if args.delta_phi is not None else None,
        "temperature": args.temperature,
        "theta": args.theta,
        "samples": args.samples,
    }
    over = {k: v for k, v in over.items() if v is not None}
    return spec.with_(seed=args.seed, **over)


def cmd_noise(args) -> int:
    spec = _noise_spec(args)
    meta = metadata(args.seed, noise=spec.to_dict())
    if args.pulse:
        seq = PulseSequence(parse_pulse(p) for p in args.pulse)
        s = monte_carlo(seq, spec, threads=args.threads)
        rec = {"metadata": dict(meta, pulses=args.pulse), "summary": s.to_record()}
        _emit(dumps(rec) + "\n", args.out)
        return EXIT_OK
    rows = noise_series(parse_series(args.series), spec, threads=args.threads)
    _emit(series_csv(rows, meta), args.out)
    if args.out not in (None, "-"):
        for r in rows:
            print(f"l'={r.l_prime}  ideal={r.ideal_f:.5f}  mean={r.mean_f:.5f}  std={r.std_f:.5f}  truncations={r.truncations}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import Options, as_report, run_all

    opts = Options(seed=args.seed, threads=args.threads, inject_failure=args.inject_failure)
    report = None if args.quiet else (lambda c: print(c.line(), flush=True))
    checks = run_all(opts, include_properties=not args.no_properties, report=report)
    rep = as_report(checks, opts)
    if args.json:
        _emit(json.dumps(rep, indent=2) + "\n", args.json)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


# -- parser ------------------------------------------------------------------


def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d if suppress else 0, help="master seed (default 0)")
    p.add_argument("--threads", type=int, default=d, help="worker threads (default $RYDGATE_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rydgate", description="CZ gates from minimal pulse sequences on non-independent qubits.")
    ap.add_argument("--version", action="version", version=f"rydgate {__version__}")
    _globals(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fidelity", help="fidelity, U(1,1), GPAs and mechanism of a protocol")
    _globals(p, True)
    p.add_argument("--pulse", action="append", help="A=<area>,x=<ratio>[,phi=<phase>] or A=..,a=..,b=.. (repeatable)")
    p.add_argument("--json", action="store_true", help="emit a JSON record")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("map", help="fidelity map over one or two parameters (CSV)")
    _globals(p, True)
    p.add_argument("--axis", action="append", help="name=min:max:points, e.g. A=0:20pi:400")
    p.add_argument("--fix", action="append", help="fixed binding, e.g. A1=4pi")
    p.add_argument("--constraint", choices=CONSTRAINTS, default="none")
    p.add_argument("--config", help="YAML file with a 'grid' section")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--overlay", help="companion CSV with the ridge curve A = m pi sqrt(1+x^2)/x")
    p.add_argument("--overlay-multiple", type=float, default=2.0, help="m in the overlay curve (default 2)")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("optimize", help="enumerate and refine protocol candidates (JSON)")
    _globals(p, True)
    p.add_argument("--max-area", required=True, help="area budget, e.g. 15pi")
    p.add_argument("--family", choices=("single",) + FAMILIES, default="single")
    p.add_argument("--x1", help="pin the first ratio (two-pulse families)")
    p.add_argument("--A1", help="pin the first area (two-pulse families)")
    p.add_argument("--convention", choices=("vector", "ratio"), default="vector", help="anti-aligned second vector: -e1 or x2=-x1")
    p.add_argument("--limit", type=int, help="keep the best N entries")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("beams", help="beam amplitudes realizing target structural vectors (JSON)")
    _globals(p, True)
    p.add_argument("--geometry", help="YAML file with positions/alpha or theta, and targets")
    p.add_argument("--theta", type=float, help="two-qubit overlap parameter")
    p.add_argument("--target", action="append", help="ratio x, or comma-separated vector components (repeatable)")
    p.add_argument("--omega0", type=float, default=1.0)
    p.set_defaults(func=cmd_beams)

    p = sub.add_parser("noise", help="Monte Carlo fidelity statistics")
    _globals(p, True)
    p.add_argument("--series", default="l0..6", help="candidates (l', l', 0), e.g. l0..6 or 1,3,5")
    p.add_argument("--pulse", action="append", help="custom protocol instead of a series (repeatable)")
    p.add_argument("--preset", choices=sorted(PRESETS), default="standard")
    p.add_argument("--config", help="YAML file with a 'noise' section")
    p.add_argument("--delta-I", dest="delta_I", type=float)
    p.add_argument("--delta-R", dest="delta_R", type=float)
    p.add_argument("--delta-phi", dest="delta_phi")
    p.add_argument("--temperature", type=float, help="uK")
    p.add_argument("--theta", type=float, help="beam overlap parameter")
    p.add_argument("--samples", type=int)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("verify", help="run the acceptance and property suites")
    _globals(p, True)
    p.add_argument("--json", help="write a JSON report to this path ('-' for stdout)")
    p.add_argument("--no-properties", action="store_true")
    p.add_argument("--inject-failure", action="store_true", help="harness self-check: force one tolerance to fail")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is None:
            args.threads = _default_threads()
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except NumericalError as exc:
        print(f"rydgate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"rydgate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
