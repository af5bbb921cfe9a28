"""Trajectories and critical graphs of ``-p(z) dz**2`` for monic quartics ``p``.

Horizontal trajectories are level curves of ``Re zeta`` with
``zeta = int sqrt(p) dz``.  Each critical trajectory is launched from a zero
along one of its local rays and followed by the tracing kernel until it
reaches another zero or settles into one of the six asymptotic directions at
infinity.  Faces of the resulting planar graph are found with a rotation
system and classified as half-planes or strips.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernel
from .config import Config, resolve
from .polynomial import ComplexPolynomial, roots, sqrt_laurent

__all__ = [
    "QuadraticDifferential", "Trajectory", "Anchor", "CriticalGraph", "Edge", "Face",
    "Corner", "PolygonReport", "ShortTrajectory", "GraphError", "TraceError",
    "infinity_directions", "local_rays", "trace", "trace_ray", "critical_graph",
    "short_trajectories", "teichmuller_check", "teichmuller_from_corners",
    "conjugation_distance", "crossing_pairs",
]

POLE_ORDER = -8  # infinity is a pole of order 8 of -p dz^2


class GraphError(RuntimeError):
    """Critical graph could not be assembled consistently."""


class TraceError(RuntimeError):
    """Step size underflow while tracing."""

    def __init__(self, msg: str, last_point: complex):
        super().__init__(f"{msg} (last point {last_point:.6g})")
        self.last_point = last_point


def infinity_directions() -> np.ndarray:
    """The six asymptotic directions ``(2k+1) pi / 6`` of horizontal trajectories."""
    return (2 * np.arange(6) + 1) * np.pi / 6


def _wrap(x: float) -> float:
    """Map an angle to [-pi, pi)."""
    return (x + math.pi) % (2 * math.pi) - math.pi


class QuadraticDifferential:
    """``-p(z) dz**2`` for a monic quartic ``p``.

    Zeros closer than ``1e-7 * scale`` are merged into a double zero.  For real
    ``p`` the zeros are made exactly conjugation symmetric, which lets the
    tracing arithmetic commute with conjugation.
    """

    def __init__(self, p: ComplexPolynomial, cfg: Config | None = None,
                 known_zeros: Sequence[complex] | None = None):
        if p.degree != 4 or abs(p.lead - 1) > 1e-12:
            raise ValueError("expected a monic quartic")
        self.p = p
        self.is_real = p.is_real()
        # exact zeros supplied by the caller (with multiplicity) take precedence
        r = np.array(known_zeros, dtype=complex) if known_zeros is not None else roots(p, cfg)
        if r.size != 4:
            raise ValueError("expected four zeros counted with multiplicity")
        scale = 1.0 + float(np.max(np.abs(r)))
        merge = 1e-7 * scale
        distinct: list[complex] = []
        mults: list[int] = []
        for z in r:
            for i, d in enumerate(distinct):
                if abs(z - d) < merge:
                    mults[i] += 1
                    distinct[i] = (d * (mults[i] - 1) + z) / mults[i]
                    break
            else:
                distinct.append(complex(z))
                mults.append(1)
        if max(mults) > 2:
            raise ValueError("zeros of multiplicity > 2 are not supported")
        if self.is_real:
            distinct, mults = _symmetrize(distinct, mults, merge)
        order = sorted(range(len(distinct)), key=lambda i: (distinct[i].real, distinct[i].imag))
        self.zeros = tuple(distinct[i] for i in order)
        self.mults = tuple(mults[i] for i in order)
        self.scale = scale
        self.center = -p.coeffs[3] / 4
        if len(self.zeros) > 1:
            self.dmin = min(abs(a - b) for i, a in enumerate(self.zeros) for b in self.zeros[i + 1:])
        else:
            self.dmin = scale
        # coefficient c_r of the leading term p ~ c_r (z - z_j)^r
        leads = []
        for j, zj in enumerate(self.zeros):
            c = 1.0 + 0j
            for i, zi in enumerate(self.zeros):
                if i != j:
                    c *= (zj - zi) ** self.mults[i]
            leads.append(c)
        self.leads = tuple(leads)
        self.factors = tuple(_pair_factors(self.zeros, self.mults))
        self.partner = tuple(self._conj_partner(j) for j in range(len(self.zeros)))

    @classmethod
    def from_parameter(cls, a: complex, cfg: Config | None = None) -> "QuadraticDifferential":
        """``(z**2 - 1)(z - a)(z - conj a)`` for ``a`` strictly off the real axis."""
        a = complex(a)
        cfg = resolve(cfg)
        if abs(a.imag) <= cfg.capture_tol:
            raise ValueError("parameter must be non-real")
        return cls(ComplexPolynomial.quartic_family(a), cfg, (-1.0, 1.0, a, a.conjugate()))

    @classmethod
    def from_roots(cls, rts: Sequence[complex], cfg: Config | None = None) -> "QuadraticDifferential":
        rts = [complex(z) for z in rts]
        p = ComplexPolynomial.from_roots(rts)
        if set(rts) == {z.conjugate() for z in rts}:
            # conjugation-closed zero sets give real coefficients up to rounding
            p = ComplexPolynomial([c.real for c in p.coeffs])
        return cls(p, cfg, rts)

    def _conj_partner(self, j: int) -> int:
        if not self.is_real:
            return -1
        zc = self.zeros[j].conjugate()
        for i, z in enumerate(self.zeros):
            if z == zc:
                return i
        return -1

    def peval(self, z: complex) -> complex:
        return _kernel._trace_py._peval(z, self.factors)

    def __repr__(self) -> str:
        return f"QuadraticDifferential(zeros={self.zeros}, mults={self.mults})"


def _symmetrize(distinct, mults, merge):
    zs, ms = [], []
    used = [False] * len(distinct)
    for i, z in enumerate(distinct):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) < merge:
            zs.append(complex(z.real, 0.0))
            ms.append(mults[i])
            continue
        # find the conjugate partner
        best, bj = math.inf, -1
        for j in range(len(distinct)):
            if not used[j] and abs(distinct[j] - z.conjugate()) < best:
                best, bj = abs(distinct[j] - z.conjugate()), j
        if bj < 0:
            raise ValueError("real polynomial with unpaired non-real zero")
        used[bj] = True
        up = z if z.imag > 0 else distinct[bj]
        up = 0.5 * (up + (distinct[bj] if z.imag > 0 else z).conjugate())
        zs += [up, up.conjugate()]
        ms += [mults[i], mults[bj]]
    return zs, ms


def _pair_factors(zeros, mults):
    """Factor list with conjugate pairs adjacent (see the kernel's evaluator)."""
    expanded = [z for z, m in zip(zeros, mults) for _ in range(m)]
    out, rest = [], list(expanded)
    while rest:
        z = rest.pop(0)
        if z.imag != 0 and z.conjugate() in rest:
            rest.remove(z.conjugate())
            out += [z, z.conjugate()]
        else:
            out.append(z)
    # pair leftover real zeros in order
    return out


def local_rays(qd: QuadraticDifferential, j: int, orthogonal: bool = False) -> np.ndarray:
    """Launch angles of the critical trajectories at zero ``j``, in [-pi, pi), sorted.

    With ``p ~ c (z - z_j)^r`` the angles solve
    ``conj(rot) sqrt(c) e^{i(r+2)theta/2}`` real, i.e.
    ``theta = (2 phi - arg c + 2 pi k) / (r + 2)`` with ``phi = pi/2`` for
    horizontal and ``phi = 0`` for orthogonal trajectories.
    """
    r = qd.mults[j]
    if r > 2:
        raise ValueError("unsupported multiplicity")
    partner = qd.partner[j]
    if partner >= 0 and partner != j and qd.zeros[j].imag < 0:
        return np.sort(-local_rays(qd, partner, orthogonal))
    phi = 0.0 if orthogonal else math.pi / 2
    argc = cmath.phase(qd.leads[j])
    th = np.array([_wrap((2 * phi - argc + 2 * math.pi * k) / (r + 2)) for k in range(r + 2)])
    if partner == j:
        # real zero: make the set exactly symmetric under negation
        for i in range(th.size):
            if th[i] < 0 and th[i] != -math.pi:
                pos = th[th > 0]
                if pos.size:
                    cand = pos[np.argmin(np.abs(pos + th[i]))]
                    if abs(cand + th[i]) < 1e-9:
                        th[i] = -cand
    return np.sort(th)


@dataclass(frozen=True)
class Anchor:
    """Trajectory endpoint: a zero, an asymptotic direction, a regular point or open."""

    kind: str  # "zero" | "infinity" | "point" | "open"
    index: int = -1
    level: float = math.nan  # ordering key inside a bundle at infinity

    def to_json(self) -> dict:
        d = {"kind": self.kind, "index": self.index}
        if self.kind == "infinity":
            d["level"] = self.level
        return d


@dataclass(frozen=True)
class Trajectory:
    points: np.ndarray
    im_progress: np.ndarray
    start: Anchor
    end: Anchor
    arclength: float
    orthogonal: bool = False

    @property
    def start_anchor(self) -> Anchor:
        return self.start

    @property
    def end_anchor(self) -> Anchor:
        return self.end

    def reversed(self) -> "Trajectory":
        return Trajectory(self.points[::-1].copy(), -self.im_progress[::-1], self.end,
                          self.start, self.arclength, self.orthogonal)

    def conj(self) -> "Trajectory":
        return Trajectory(self.points.conj(), self.im_progress.copy(), self.start, self.end,
                          self.arclength, self.orthogonal)

    def to_json(self) -> dict:
        return {
            "start": self.start.to_json(), "end": self.end.to_json(),
            "points": [[z.real, z.imag] for z in self.points],
        }


def _kernel_params(qd: QuadraticDifferential, cfg: Config) -> tuple:
    check = min(max(cfg.capture_rel * qd.dmin, 2 * cfg.capture_tol), 0.25 * qd.dmin)
    escape = cfg.escape_mult * qd.scale
    return (
        escape,                      # h_max
        0.15,                        # step <= k_zero * distance to nearest zero
        0.1,                         # step <= k_inf * (|z - c| + scale)
        cfg.trace_rtol,
        check,
        cfg.capture_tol,
        escape,
        cfg.lock_angle,
        int(cfg.lock_steps),
        cfg.budget_mult * escape,
        int(cfg.max_steps),
        1e-14 * qd.scale,
        qd.scale,
    )


def _zeta_infinity(qd: QuadraticDifferential, z: complex, k: int, nterms: int = 40) -> complex:
    """Primitive of the ``+z**2`` branch of ``sqrt(p)`` near infinity, log cut away from D_k."""
    s = sqrt_laurent(qd.p, nterms)
    acc = 0j
    for n in range(nterms):
        if n != 3:
            acc += s[n] * z ** (3 - n) / (3 - n)
    D = (2 * k + 1) * math.pi / 6
    arg = D + _wrap(cmath.phase(z) - D)
    return acc + s[3] * complex(math.log(abs(z)), arg)


def _run(qd, cfg, z0, w0, zeta0, rot, level, launch, start_anchor, orthogonal):
    params = _kernel_params(qd, cfg)
    off = 0.0 if orthogonal else math.pi / 6
    pts, progs, kind, idx, s = _kernel.trace_kernel(
        list(qd.factors), list(qd.zeros), list(qd.mults), list(qd.leads),
        complex(z0), complex(w0), complex(zeta0), complex(rot), float(level), int(launch),
        complex(qd.center), off, params)
    pts = np.asarray(pts, dtype=complex)
    progs = np.asarray(progs, dtype=float)
    if kind == _kernel.UNDERFLOW:
        raise TraceError("step size underflow", complex(pts[-1]))
    if kind == _kernel.ZERO:
        end = Anchor("zero", idx)
    elif kind == _kernel.INFINITY:
        zi = _zeta_infinity(qd, complex(pts[-1]), idx)
        lev = zi.imag if orthogonal else zi.real
        end = Anchor("infinity", idx, lev)
    else:
        end = Anchor("open")
    if start_anchor.kind == "zero":
        pts = np.concatenate(([qd.zeros[start_anchor.index]], pts))
        progs = np.concatenate(([0.0], progs))
    return Trajectory(pts, progs, start_anchor, end, float(s), orthogonal)


def trace_ray(qd: QuadraticDifferential, j: int, theta: float, cfg: Config | None = None,
              orthogonal: bool = False) -> Trajectory:
    """Trace the critical trajectory leaving zero ``j`` at angle ``theta``.

    The start point sits at distance ``launch_rel * dmin`` on the ray and is
    moved onto the exact level of the zero by Newton steps on the local
    primitive.
    """
    cfg = resolve(cfg)
    rot = 1.0 + 0j if orthogonal else 1j
    crot = rot.conjugate()
    zj = qd.zeros[j]
    z = zj + cfg.launch_rel * qd.dmin * cmath.exp(complex(0.0, theta))
    f = list(qd.factors)
    for _ in range(6):
        w = cmath.sqrt(qd.peval(z))
        I = _kernel.singular_integral(zj, z, w, f)
        if (crot * I).real < 0:
            w, I = -w, -I
        delta = (crot * I).imag
        z = z - 1j * delta * rot / w
    w = cmath.sqrt(qd.peval(z))
    I = _kernel.singular_integral(zj, z, w, f)
    if (crot * I).real < 0:
        w, I = -w, -I
    return _run(qd, cfg, z, w, I, rot, 0.0, j, Anchor("zero", j), orthogonal)


def trace(qd: QuadraticDifferential, start: complex, direction: complex, cfg: Config | None = None,
          orthogonal: bool = False) -> Trajectory:
    """Trace the trajectory through ``start`` leaving in (approximately) ``direction``.

    At a regular point the branch of ``sqrt(p)`` is chosen so the tangent
    points into the half-plane of ``direction``.  At a zero the nearest
    local ray is used.
    """
    cfg = resolve(cfg)
    start = complex(start)
    direction = complex(direction)
    for j, zj in enumerate(qd.zeros):
        if abs(start - zj) <= 1e-12 * qd.scale:
            rays = local_rays(qd, j, orthogonal)
            ang = cmath.phase(direction)
            r = int(np.argmin([abs(_wrap(t - ang)) for t in rays]))
            return trace_ray(qd, j, float(rays[r]), cfg, orthogonal)
    rot = 1.0 + 0j if orthogonal else 1j
    w = cmath.sqrt(qd.peval(start))
    if w == 0:
        raise ValueError("start coincides with a zero")
    u = rot * w.conjugate() / abs(w)
    if (u * direction.conjugate()).real < 0:
        w = -w
    return _run(qd, cfg, start, w, 0j, rot, 0.0, -1, Anchor("point"), orthogonal)


# ---------------------------------------------------------------- graph


@dataclass(frozen=True)
class Edge:
    id: int
    kind: str  # "short" | "infinite"
    ends: tuple  # ((j, ray), (j2, ray2)) or ((j, ray), ("inf", k))
    trajectory: Trajectory


@dataclass(frozen=True)
class Corner:
    vertex: str  # "zero:<j>" or "inf:<k_in>-<k_out>"
    n: int
    angle: float


@dataclass(frozen=True)
class Face:
    darts: tuple
    corners: tuple
    label: str
    n_edges: int
    n_finite_edges: int
    n_infinity_corners: int


@dataclass(frozen=True)
class PolygonReport:
    vertices: tuple  # (label, n_j, t_j)
    m: int
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return (abs(self.lhs - round(self.lhs)) < 1e-6 and abs(self.lhs - self.rhs) < 1e-6)


@dataclass
class CriticalGraph:
    qd: QuadraticDifferential
    rays: dict  # (j, r) -> launch angle (measured)
    traces: dict  # (j, r) -> Trajectory
    edges: list
    faces: list = field(default_factory=list)

    @property
    def vertices(self) -> list:
        return [("zero", z) for z in self.qd.zeros] + [("infinity", d) for d in infinity_directions()]

    def face_census(self) -> dict:
        return {
            "half_planes": sum(f.label == "half-plane" for f in self.faces),
            "strips": sum(f.label == "strip" for f in self.faces),
        }

    def degree(self, j: int) -> int:
        deg = 0
        for e in self.edges:
            for end in e.ends:
                if end[0] == j:
                    deg += 1
        return deg

    def to_json(self) -> dict:
        return {
            "zeros": [[z.real, z.imag] for z in self.qd.zeros],
            "multiplicities": list(self.qd.mults),
            "infinity_directions": [float(d) for d in infinity_directions()],
            "edges": [
                {"kind": e.kind, "ends": [list(x) for x in e.ends],
                 "points": [[z.real, z.imag] for z in e.trajectory.points]}
                for e in self.edges
            ],
            "faces": [
                {"label": f.label, "edges": f.n_edges, "finite_edges": f.n_finite_edges,
                 "infinity_corners": f.n_infinity_corners}
                for f in self.faces
            ],
            "census": self.face_census(),
        }


def _bundle_sign(k: int) -> int:
    # counterclockwise order inside bundle k <-> sign * level increasing
    return -1 if k % 2 == 0 else 1


def critical_graph(qd: QuadraticDifferential, cfg: Config | None = None) -> CriticalGraph:
    """Trace every critical trajectory of ``qd`` and assemble the planar graph."""
    cfg = resolve(cfg)
    check = _kernel_params(qd, cfg)[4]
    if len(qd.zeros) > 1 and qd.dmin <= 4 * check and qd.dmin < 1e-6 * qd.scale:
        raise GraphError("near-degenerate configuration")
    rays, traces = {}, {}
    for j in range(len(qd.zeros)):
        for r, th in enumerate(local_rays(qd, j)):
            t = trace_ray(qd, j, float(th), cfg)
            if t.end.kind == "open":
                raise GraphError(f"budget exhausted on ray {r} of zero {j} (angle {th:.6f})")
            traces[(j, r)] = t
            rays[(j, r)] = cmath.phase(t.points[1] - t.points[0])
    # arrival ray at the far zero
    arrive = {}
    for key, t in traces.items():
        if t.end.kind == "zero":
            j2 = t.end.index
            ang = cmath.phase(t.points[-2] - t.points[-1])
            cands = [(abs(_wrap(a - ang)), r2) for (jj, r2), a in rays.items() if jj == j2]
            arrive[key] = (j2, min(cands)[1])
    edges = []
    for key in sorted(traces):
        t = traces[key]
        if t.end.kind == "zero":
            other = arrive[key]
            if arrive.get(other) != key:
                raise GraphError(f"inconsistent ray matching between {key} and {other}")
            if other < key:
                continue
            edges.append(Edge(len(edges), "short", (key, other), t))
        else:
            edges.append(Edge(len(edges), "infinite", (key, ("inf", t.end.index)), t))
    graph = CriticalGraph(qd, rays, traces, edges)
    graph.faces = _faces(graph)
    return graph


def _faces(graph: CriticalGraph) -> list:
    edges = graph.edges
    third = math.pi / 3

    def origin(d):
        e, side = d
        return edges[e].ends[side]

    # rotation systems
    rot_zero: dict = {}
    inf_list = []
    for e in edges:
        for side in (0, 1):
            end = e.ends[side]
            if end[0] == "inf":
                k = end[1]
                lev = e.trajectory.end.level
                inf_list.append(((k, _bundle_sign(k) * lev), (e.id, side)))
            else:
                rot_zero.setdefault(end[0], []).append((graph.rays[end], (e.id, side)))
    rotation = {}
    for j, lst in rot_zero.items():
        rotation[("z", j)] = [d for _, d in sorted(lst)]
    # counterclockwise around infinity in the chart 1/z is clockwise in z
    zccw = [d for _, d in sorted(inf_list)]
    rotation[("inf",)] = zccw[::-1]
    inf_key = {d: key for key, d in inf_list}

    def vkey(d):
        o = origin(d)
        return ("inf",) if o[0] == "inf" else ("z", o[0])

    def angle_at(d):
        o = origin(d)
        return graph.rays[o]

    seen = set()
    faces = []
    all_darts = [(e.id, s) for e in edges for s in (0, 1)]
    for d0 in all_darts:
        if d0 in seen:
            continue
        darts, corners = [], []
        d = d0
        while True:
            seen.add(d)
            darts.append(d)
            rev = (d[0], 1 - d[1])
            v = vkey(rev)
            lst = rotation[v]
            nxt = lst[(lst.index(rev) - 1) % len(lst)]
            if v == ("inf",):
                (k_in, l_in), (k_out, l_out) = inf_key[rev], inf_key[nxt]
                if k_in == k_out and len(lst) > 1:
                    # keys already carry the bundle sign
                    t = 0.0 if l_out > l_in else 2 * math.pi
                else:
                    t = ((k_out - k_in) % 6) * third
                    if t == 0:
                        t = 2 * math.pi
                corners.append(Corner(f"inf:{k_in}-{k_out}", POLE_ORDER, t))
            else:
                t = (angle_at(rev) - angle_at(nxt)) % (2 * math.pi)
                j = v[1]
                corners.append(Corner(f"zero:{j}", graph.qd.mults[j], t))
            d = nxt
            if d == d0:
                break
        inf_c = [c for c in corners if c.n == POLE_ORDER]
        if len(inf_c) == 1 and abs(inf_c[0].angle - third) < 1e-12:
            label = "half-plane"
        elif len(inf_c) == 2 and all(c.angle == 0.0 for c in inf_c):
            label = "strip"
        else:
            raise GraphError(f"unclassifiable face with corners {[(c.vertex, round(c.angle, 4)) for c in corners]}")
        nfin = sum(edges[e].kind == "short" for e, _ in darts)
        faces.append(Face(tuple(darts), tuple(corners), label, len(darts), nfin, len(inf_c)))
    return faces


def _ccw_after(k: int, l_in: float, l_out: float) -> bool:
    """Whether ``l_out`` follows ``l_in`` counterclockwise inside bundle ``k``."""
    return _bundle_sign(k) * (l_out - l_in) > 0


def _dart_points(graph: CriticalGraph, d) -> np.ndarray:
    pts = graph.edges[d[0]].trajectory.points
    return pts if d[1] == 0 else pts[::-1]


def _arc(c: complex, a: complex, b: complex, sweep: float, n: int = 96) -> np.ndarray:
    ra, rb = abs(a - c), abs(b - c)
    th0 = cmath.phase(a - c)
    s = np.linspace(0.0, 1.0, n)
    return c + (ra + (rb - ra) * s) * np.exp(1j * (th0 + sweep * s))


def _winding(pt: complex, poly: np.ndarray) -> int:
    d = poly - pt
    ang = np.angle(d[1:] / d[:-1])
    return int(round(ang.sum() / (2 * math.pi)))


def _closed_boundary(pieces: list, corners: list, center: complex) -> np.ndarray:
    """Concatenate oriented sides, closing corners at infinity with arcs."""
    out = []
    n = len(pieces)
    for i in range(n):
        out.append(pieces[i])
        c = corners[i]
        if c.n == POLE_ORDER:
            a = pieces[i][-1]
            b = pieces[(i + 1) % n][0]
            actual = cmath.phase(b - center) - cmath.phase(a - center)
            sweep = c.angle + _wrap(actual - c.angle)
            out.append(_arc(center, a, b, sweep))
    return np.concatenate(out + [pieces[0][:1]])


def teichmuller_from_corners(corners: Sequence[Corner], m: int) -> PolygonReport:
    """Both sides of ``sum(1 - (n_j + 2) t_j / 2 pi) = 2 + m``."""
    lhs = sum(1 - (c.n + 2) * c.angle / (2 * math.pi) for c in corners)
    return PolygonReport(tuple((c.vertex, c.n, c.angle) for c in corners), m, lhs, 2.0 + m)


def _face_report(graph: CriticalGraph, face: Face) -> PolygonReport:
    pieces = [_dart_points(graph, d) for d in face.darts]
    poly = _closed_boundary(pieces, list(face.corners), graph.qd.center)
    on_boundary = {int(c.vertex.split(":")[1]) for c in face.corners if c.vertex.startswith("zero")}
    m = 0
    for j, z in enumerate(graph.qd.zeros):
        if j not in on_boundary and _winding(z, poly) != 0:
            m += graph.qd.mults[j]
    return teichmuller_from_corners(face.corners, m)


def teichmuller_check(qd: QuadraticDifferential, polygon, graph: CriticalGraph | None = None,
                      cfg: Config | None = None) -> PolygonReport:
    """Measure the Teichmuller angle balance of a face or of a closed polygon.

    ``polygon`` is either a :class:`Face` of ``graph`` or a sequence of
    :class:`Trajectory` sides, oriented with the interior on the left, whose
    consecutive endpoints coincide (a shared zero, regular point, or the same
    side of infinity).
    """
    if isinstance(polygon, Face):
        if graph is None:
            raise ValueError("a graph is needed to measure a face")
        return _face_report(graph, polygon)
    cfg = resolve(cfg)
    sides = list(polygon)
    if not sides:
        raise ValueError("empty polygon")
    tol = 1e-6 * qd.scale
    corners = []
    for i, s in enumerate(sides):
        nx = sides[(i + 1) % len(sides)]
        a, b = s.end, nx.start
        if a.kind == "infinity" and b.kind == "infinity":
            if a.index == b.index:
                t = 0.0 if _ccw_after(a.index, a.level, b.level) else 2 * math.pi
            else:
                t = ((b.index - a.index) % 6) * math.pi / 3
            corners.append(Corner(f"inf:{a.index}-{b.index}", POLE_ORDER, t))
            continue
        if a.kind in ("infinity", "open") or b.kind in ("infinity", "open"):
            raise ValueError(f"boundary not closed between sides {i} and {(i + 1) % len(sides)}")
        v = s.points[-1]
        if abs(nx.points[0] - v) > tol:
            raise ValueError(f"boundary not closed between sides {i} and {(i + 1) % len(sides)}")
        phi_in = cmath.phase(s.points[-2] - v)
        phi_out = cmath.phase(nx.points[1] - v)
        t = (phi_in - phi_out) % (2 * math.pi)
        if a.kind == "zero":
            corners.append(Corner(f"zero:{a.index}", qd.mults[a.index], t))
        else:
            corners.append(Corner("point", 0, t))
    poly = _closed_boundary([s.points for s in sides], corners, qd.center)
    on_boundary = {int(c.vertex.split(":")[1]) for c in corners if c.vertex.startswith("zero")}
    m = sum(qd.mults[j] for j, z in enumerate(qd.zeros)
            if j not in on_boundary and _winding(z, poly) != 0)
    return teichmuller_from_corners(corners, m)


# ---------------------------------------------------------------- queries


@dataclass(frozen=True)
class ShortTrajectory:
    pair: tuple  # zero indices
    trajectory: Trajectory
    unbroken: bool


def short_trajectories(graph: CriticalGraph) -> list:
    """Edges joining two zeros; ``unbroken`` when no third zero lies on them."""
    qd = graph.qd
    check = 4 * min(qd.dmin * 1e-3, qd.dmin)
    out = []
    for e in graph.edges:
        if e.kind != "short":
            continue
        (j1, _), (j2, _) = e.ends
        pts = e.trajectory.points
        unbroken = True
        for j, z in enumerate(qd.zeros):
            if j in (j1, j2):
                continue
            if _dist_to_polyline(z, pts) < check:
                unbroken = False
        out.append(ShortTrajectory((j1, j2), e.trajectory, unbroken))
    return out


def _dist_to_polyline(z: complex, pts: np.ndarray) -> float:
    a, b = pts[:-1], pts[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    s = np.where(L2 > 0, ((z - a) * d.conj()).real / np.where(L2 > 0, L2, 1), 0.0)
    s = np.clip(s, 0, 1)
    return float(np.min(np.abs(a + s * d - z)))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def cross(a, b):
        return a.real * b.imag - a.imag * b.real

    d1 = cross(q2 - q1, p1 - q1)
    d2 = cross(q2 - q1, p2 - q1)
    d3 = cross(p2 - p1, q1 - p1)
    d4 = cross(p2 - p1, q2 - p1)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def crossing_pairs(graph: CriticalGraph, exclude_radius: float | None = None) -> list:
    """Pairs of edges whose polylines cross away from the zeros."""
    qd = graph.qd
    if exclude_radius is None:
        exclude_radius = 1e-3 * qd.dmin
    zs = np.array(qd.zeros)

    def trimmed(pts):
        keep = np.min(np.abs(pts[:, None] - zs[None, :]), axis=1) > exclude_radius
        return pts[keep]

    polys = [trimmed(e.trajectory.points) for e in graph.edges]
    out = []
    for i in range(len(polys)):
        for k in range(i + 1, len(polys)):
            P, Q = polys[i], polys[k]
            if len(P) < 2 or len(Q) < 2:
                continue
            # bounding-box prefilter per segment pair
            pa, pb = P[:-1], P[1:]
            qa, qb = Q[:-1], Q[1:]
            pminx = np.minimum(pa.real, pb.real)[:, None]
            pmaxx = np.maximum(pa.real, pb.real)[:, None]
            pminy = np.minimum(pa.imag, pb.imag)[:, None]
            pmaxy = np.maximum(pa.imag, pb.imag)[:, None]
            qminx = np.minimum(qa.real, qb.real)[None, :]
            qmaxx = np.maximum(qa.real, qb.real)[None, :]
            qminy = np.minimum(qa.imag, qb.imag)[None, :]
            qmaxy = np.maximum(qa.imag, qb.imag)[None, :]
            cand = np.argwhere((pminx <= qmaxx) & (qminx <= pmaxx) & (pminy <= qmaxy) & (qminy <= pmaxy))
            for a, b in cand:
                if _segments_intersect(pa[a], pb[a], qa[b], qb[b]):
                    out.append((graph.edges[i].id, graph.edges[k].id))
                    break
    return out


def _transversal_distance(qd: QuadraticDifferential, q: complex, pts: np.ndarray,
                          orthogonal: bool = False) -> float:
    """Distance from ``q`` to the trajectory through the samples ``pts``.

    Uses the level mismatch ``|Re int_{pts[i]}^{q} sqrt(p)| / |sqrt(p(q))|``
    from the nearest sample, which is first-order exact for points close to
    the curve and insensitive to where the curve was sampled.
    """
    i = int(np.argmin(np.abs(pts - q)))
    a = complex(pts[i])
    w = cmath.sqrt(qd.peval(a))
    d = q - a
    acc = 0j
    ref = w
    for x, wt in zip(_kernel._trace_py._GL5_X, _kernel._trace_py._GL5_W):
        v = cmath.sqrt(qd.peval(a + x * d))
        if (v * ref.conjugate()).real < 0:
            v = -v
        ref = v
        acc += wt * v
    acc *= d
    wq = abs(cmath.sqrt(qd.peval(q)))
    mis = abs(acc.imag) if orthogonal else abs(acc.real)
    return mis / wq if wq > 0 else abs(d)


def conjugation_distance(graph: CriticalGraph, exclude_rel: float = 1e-2) -> float:
    """Symmetric distance between the graph and its mirror image in the real axis.

    Every sample of every edge is reflected and its distance to the closest
    edge is measured with :func:`_transversal_distance`.  Samples within
    ``exclude_rel * dmin`` of a zero are skipped (the zeros themselves are
    symmetric by construction of the polynomial).
    """
    qd = graph.qd
    zs = np.array(qd.zeros)
    rad = exclude_rel * qd.dmin
    worst = 0.0
    polys = [e.trajectory.points for e in graph.edges]
    for P in polys:
        for z in P:
            q = complex(z).conjugate()
            if np.min(np.abs(zs - q)) < rad:
                continue
            # candidate edges: nearest samples
            best = math.inf
            order = sorted(range(len(polys)), key=lambda k: float(np.min(np.abs(polys[k] - q))))
            for k in order[:2]:
                best = min(best, _transversal_distance(qd, q, polys[k]))
            worst = max(worst, best)
    return worst
