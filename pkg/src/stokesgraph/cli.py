"""Command-line front end.

Subcommands: ``classify``, ``gamma``, ``spectrum``, ``pipeline`` and ``trace``.
Exit codes: 0 success, 2 usage or precondition failure, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config
from .export import SvgCanvas, auto_view, write_csv, write_json
from .gamma_curve import (BRANCH_LABELS, ContinuationError, asymptote_function, classify_region,
                          local_start_angle, solve_asymptote_angle, trace_branch)
from .polynomial import ComplexPolynomial, QuadratureError
from .qes_spectrum import (SELECT_RULES, SpectralProblem, SpectrumError, eigenpairs, rescaled_measure,
                           riccati_residual, select_state, simplified_riccati_residual)
from .quad_diff import (GraphError, QuadraticDifferential, TraceError, critical_graph,
                        short_trajectories, trace)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
FORMATS = ("json", "csv", "svg")
_COMPLEX = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?([+-](\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?[ij]?$")


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``RE+IMi`` (also ``RE``, ``IMi``, ``RE-IMi``; ``j`` accepted for ``i``)."""
    s = text.strip().replace(" ", "")
    if not _COMPLEX.match(s):
        raise UsageError(f"cannot parse complex number {text!r}; expected RE+IMi")
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}; expected RE+IMi") from exc


@dataclass(frozen=True)
class RunConfig:
    """Tolerances plus output directory and formats."""

    cfg: Config
    out: Path
    formats: tuple

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        data = {}
        if args.config:
            try:
                data = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config: {exc}") from exc
            if not isinstance(data, dict):
                raise UsageError("config file must hold a JSON object")
        out = args.out or data.pop("out", None) or "."
        fmt = args.format or data.pop("format", None) or "json,csv"
        data.pop("out", None)
        data.pop("format", None)
        formats = tuple(f.strip() for f in (fmt.split(",") if isinstance(fmt, str) else fmt) if f.strip())
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise UsageError(f"unknown format(s) {bad}; choose from {list(FORMATS)}")
        try:
            cfg = Config.from_dict(data)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        return cls(cfg, path, formats)

    def wants(self, fmt: str) -> bool:
        return fmt in self.formats


def _zero_labels(qd: QuadraticDifferential, named: dict) -> list:
    out = []
    for z in qd.zeros:
        best = min(named, key=lambda k: abs(named[k] - z))
        out.append(best if abs(named[best] - z) < 1e-6 * qd.scale else f"{z.real:.6g}{z.imag:+.6g}i")
    return out


def _graph_svg(graph, title: str, overlay: dict | None = None, clouds: dict | None = None) -> str:
    zs = list(graph.qd.zeros)
    extra = [] if clouds is None else [z for pts in clouds.values() for z in pts]
    center, half = auto_view(zs + extra + [1.0, -1.0], margin=1.2, min_half=1.5)
    half *= 1.6
    canvas = SvgCanvas(center, half)
    canvas.axes()
    for e in graph.edges:
        color = "#c0392b" if e.kind == "short" else "#1f4e9c"
        canvas.polyline(e.trajectory.points, color, 1.6 if e.kind == "short" else 1.0)
    for label, pts in (overlay or {}).items():
        canvas.polyline(pts, "#27ae60", 1.0, dash="5,3")
    palette = ["#8e44ad", "#d35400", "#16a085", "#2c3e50"]
    for i, (label, pts) in enumerate(sorted((clouds or {}).items())):
        for z in pts:
            canvas.marker(z, palette[i % len(palette)], 2.0)
    for z in zs:
        canvas.marker(z, "#000000", 3.5)
    return canvas.render(title)


# ---------------------------------------------------------------- commands


def cmd_classify(args, rc: RunConfig) -> int:
    a = parse_complex(args.a)
    if abs(a.imag) <= rc.cfg.capture_tol:
        raise UsageError("classify needs a non-real parameter a (Im a != 0)")
    region = classify_region(a, rc.cfg)
    qd = QuadraticDifferential.from_parameter(a, rc.cfg)
    graph = critical_graph(qd, rc.cfg)
    names = _zero_labels(qd, {"-1": -1.0, "1": 1.0, "a": a, "conj(a)": a.conjugate()})
    shorts = short_trajectories(graph)
    report = {
        "a": a,
        "region": region.kind,
        "gamma_branch": region.branch,
        "face_census": graph.face_census(),
        "short_trajectory_pairs": [sorted([names[s.pair[0]], names[s.pair[1]]]) for s in shorts],
        "zeros": dict(zip(names, qd.zeros)),
    }
    if rc.wants("json"):
        write_json(rc.out / "classify.json", report)
    if rc.wants("csv"):
        rows = [(k, z.real, z.imag) for k, e in enumerate(graph.edges) for z in e.trajectory.points]
        write_csv(rc.out / "classify_edges.csv", ["edge", "x", "y"], rows)
    if rc.wants("svg"):
        overlay = {lab: trace_branch(lab, rc.cfg).points for lab in BRANCH_LABELS}
        overlay["segment"] = np.array([-1.0 + 0j, 1.0 + 0j])
        (rc.out / "classify.svg").write_text(_graph_svg(graph, f"critical graph, a = {a}", overlay))
    print(json.dumps({"region": str(region), **graph.face_census()}, sort_keys=True))
    return EXIT_OK


def cmd_gamma(args, rc: RunConfig) -> int:
    xstar = solve_asymptote_angle()
    branches = {lab: trace_branch(lab, rc.cfg) for lab in BRANCH_LABELS}
    info = {
        "x_star": xstar,
        "f_at_x_star": float(asymptote_function(xstar)),
        "start_angle": local_start_angle(),
        "headings": {lab: br.heading() for lab, br in branches.items()},
        "radius": rc.cfg.gamma_radius,
    }
    if rc.wants("json"):
        write_json(rc.out / "gamma_angle.json", info)
    if rc.wants("csv"):
        for lab, br in branches.items():
            (rc.out / f"gamma_{lab}.csv").write_text(br.to_csv())
    if rc.wants("svg"):
        canvas = SvgCanvas(0j, 6.0)
        canvas.axes()
        canvas.polyline([-1.0 + 0j, 1.0 + 0j], "#c0392b", 1.6)
        for br in branches.values():
            canvas.polyline(br.points, "#c0392b", 1.6)
        for lab, z in (("O1", 4 + 1j), ("O2", -4 + 1j), ("O+", 2.5j), ("O-", -2.5j)):
            canvas.text(z, lab)
        (rc.out / "gamma.svg").write_text(canvas.render("classification curve"))
    print(json.dumps({"x_star": xstar}, sort_keys=True))
    return EXIT_OK


def _sample_points(points: np.ndarray, n: int = 50, seed: int = 20240101) -> np.ndarray:
    """``n`` points in ``[-2, 2]^2`` kept away from ``points`` (fixed seed)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if len(points) == 0 or np.min(np.abs(points - z)) > 1e-3:
            out.append(z)
    return np.array(out)


def cmd_spectrum(args, rc: RunConfig) -> int:
    if args.m < 1:
        raise UsageError("m must be >= 1")
    prob = SpectralProblem(args.m, args.b)
    pairs = eigenpairs(prob)
    pair = select_state(pairs, args.rule, args.index)
    meas = rescaled_measure(prob, pair, rc.cfg)
    zs = _sample_points(meas.points)
    exact = max(abs(riccati_residual(prob, pair, z, meas, rc.cfg)) for z in zs)
    simple = max(abs(simplified_riccati_residual(prob, pair, z, meas, rc.cfg)) for z in zs)
    report = {
        "m": prob.m, "b": prob.b, "rule": args.rule,
        "betas": [p.beta for p in pairs],
        "selected_beta": pair.beta,
        "energy": prob.energy(pair.beta),
        "normalized_beta": pair.beta / prob.m ** (4.0 / 3.0),
        "root_mass": meas.mass,
        "max_exact_residual": exact,
        "max_simplified_residual": simple,
        "sample_points": len(zs),
    }
    if rc.wants("json"):
        write_json(rc.out / "spectrum.json", report)
    if rc.wants("csv"):
        (rc.out / "spectrum_roots.csv").write_text(meas.to_csv())
    if rc.wants("svg"):
        center, half = auto_view(list(meas.points) + [0j], min_half=1.5)
        canvas = SvgCanvas(center, half)
        canvas.axes()
        for z in meas.points:
            canvas.marker(z, "#8e44ad", 2.5)
        (rc.out / "spectrum.svg").write_text(canvas.render(f"rescaled roots, m = {prob.m}"))
    print(json.dumps({"selected_beta": [pair.beta.real, pair.beta.imag],
                      "max_exact_residual": exact}, sort_keys=True))
    return EXIT_OK


def _parse_ms(text: str) -> list:
    try:
        ms = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad m list {text!r}") from exc
    if not ms or any(m < 1 for m in ms) or any(b <= a for a, b in zip(ms, ms[1:])):
        raise UsageError("m list must be strictly increasing positive integers")
    return ms


def cmd_pipeline(args, rc: RunConfig) -> int:
    from .pipeline import run_pipeline

    ms = _parse_ms(args.m)
    res = run_pipeline(args.b, ms, args.rule, args.index, rc.cfg)
    if rc.wants("json"):
        write_json(rc.out / "pipeline.json", res.to_dict())
    if rc.wants("csv"):
        rows = [(r.m, r.normalized.real, r.normalized.imag, r.root_mass, r.mean_distance,
                 r.max_distance, "" if r.decreasing is None else str(r.decreasing).lower())
                for r in res.rows]
        write_csv(rc.out / "pipeline.csv",
                  ["m", "beta_norm_re", "beta_norm_im", "root_mass", "mean_distance",
                   "max_distance", "decreasing"], rows)
        clouds = [(z.real, z.imag, m) for m, meas in res.measures.items() for z in meas.points]
        write_csv(rc.out / "pipeline_roots.csv", ["re", "im", "m"], clouds)
    if rc.wants("svg"):
        clouds = {f"m={m}": meas.points for m, meas in res.measures.items()}
        (rc.out / "pipeline.svg").write_text(
            _graph_svg(res.graph, f"root clouds on the limit critical graph, b = {args.b}", None, clouds))
    print(json.dumps({"beta_limit": [res.beta_limit.real, res.beta_limit.imag],
                      "monotone_decreasing": res.monotone,
                      "mean_distance": [r.mean_distance for r in res.rows]}, sort_keys=True))
    return EXIT_OK


def cmd_trace(args, rc: RunConfig) -> int:
    if (args.a is None) == (args.poly is None):
        raise UsageError("give exactly one of --a or --poly")
    if args.a is not None:
        a = parse_complex(args.a)
        if abs(a.imag) <= rc.cfg.capture_tol:
            raise UsageError("parameter a must be non-real")
        qd = QuadraticDifferential.from_parameter(a, rc.cfg)
    else:
        coeffs = [parse_complex(t) for t in args.poly.split(",")]
        p = ComplexPolynomial(coeffs[::-1])
        if p.degree != 4 or p.lead != 1:
            raise UsageError("--poly needs the five coefficients of a monic quartic, highest first")
        qd = QuadraticDifferential(p, rc.cfg)
    start = parse_complex(args.start)
    direction = cmath.exp(1j * args.angle)
    traj = trace(qd, start, direction, rc.cfg, orthogonal=args.orthogonal)
    report = {"start": traj.start.to_json(), "end": traj.end.to_json(),
              "arclength": traj.arclength, "samples": len(traj.points)}
    if rc.wants("json"):
        write_json(rc.out / "trace.json", {**report, "points": traj.points})
    if rc.wants("csv"):
        write_csv(rc.out / "trace.csv", ["x", "y"], [(z.real, z.imag) for z in traj.points])
    if rc.wants("svg"):
        center, half = auto_view(list(qd.zeros) + [start], min_half=1.5)
        canvas = SvgCanvas(center, 1.6 * half)
        canvas.axes()
        canvas.polyline(traj.points, "#1f4e9c", 1.4)
        for z in qd.zeros:
            canvas.marker(z, "#000000", 3.5)
        (rc.out / "trace.svg").write_text(canvas.render("trajectory"))
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with tolerances (and optionally out, format)")
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--format", help="comma list of json,csv,svg (default: json,csv)")

    parser = argparse.ArgumentParser(prog="stokesgraph", parents=[common],
                                     description="Critical graphs of quartic quadratic differentials.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="region and critical graph for a parameter")
    p.add_argument("--a", required=True, help="parameter a as RE+IMi")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gamma", parents=[common], help="branches of the classification curve")
    p.set_defaults(func=cmd_gamma)

    for name, func, helptext in (("spectrum", cmd_spectrum, "eigenvalues and root cloud"),
                                 ("pipeline", cmd_pipeline, "root clouds against the limit graph")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "spectrum":
            p.add_argument("--m", type=int, required=True)
        else:
            p.add_argument("--m", required=True, help="comma list of increasing sizes, e.g. 8,16,32")
        p.add_argument("--b", type=float, required=True)
        p.add_argument("--rule", choices=SELECT_RULES, default="max-real")
        p.add_argument("--index", type=int, default=None, help="state index for --rule index")
        p.set_defaults(func=func)

    p = sub.add_parser("trace", parents=[common], help="a single trajectory")
    p.add_argument("--a", help="parameter a of the quartic family")
    p.add_argument("--poly", help="monic quartic coefficients, highest first, comma separated")
    p.add_argument("--start", required=True, help="start point RE+IMi (a zero or a regular point)")
    p.add_argument("--angle", type=float, default=0.0, help="initial direction in radians")
    p.add_argument("--orthogonal", action="store_true", help="trace an orthogonal trajectory")
    p.set_defaults(func=cmd_trace)
    return parser


def _join_signed_values(argv: list) -> list:
    """Turn ``--a -1+0i`` into ``--a=-1+0i``; argparse would read the value as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in ("--a", "--start", "--b", "--poly") and len(nxt) > 1 and nxt[0] == "-" \
                and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_signed_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        rc = RunConfig.from_args(args)
        return args.func(args, rc)
    except (UsageError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, TraceError, ContinuationError, SpectrumError, QuadratureError,
            np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
