"""Quadratic algebraic equations ``C**2 + r C + s = 0`` and their mother bodies.

For ``r = a z**2 + b z + c`` and ``s = e z + f`` the decaying solution
``C = (-r + sqrt(Q)) / 2`` with ``Q = r**2 - 4 s`` behaves like
``-(e / a) / z`` at infinity, so a measure with this Cauchy transform has
mass ``-e/a``.  Across a horizontal trajectory of ``-Q dz**2`` the two
boundary values differ by ``sqrt(Q)``, giving the density
``(1 / 2 pi i) sqrt(Q(t)) dt``, which is real exactly because ``-Q dt**2 > 0``
there.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import Config, resolve
from .polynomial import ComplexPolynomial, _path_integral
from ._trace_py import _GL5_W, _GL5_X
from .quad_diff import CriticalGraph, QuadraticDifferential, Trajectory, short_trajectories

__all__ = [
    "QuadraticAlgebraicEq", "DiscriminantQD", "MassReport", "ArcDensity", "ArcReport",
    "MotherBodyCandidate", "Rejection", "discriminant_qd", "total_mass", "plemelj_density",
    "verify_candidate", "DegenerateDiscriminant",
]


class DegenerateDiscriminant(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticAlgebraicEq:
    """``C**2 + r(z) C + s(z) = 0`` with ``r = (a, b, c)`` and ``s = (e, f)`` (highest first)."""

    r_coeffs: tuple
    s_coeffs: tuple

    def __post_init__(self):
        r = tuple(complex(v) for v in self.r_coeffs)
        s = tuple(complex(v) for v in self.s_coeffs)
        if len(r) != 3 or len(s) != 2:
            raise ValueError("r needs three coefficients and s two")
        if r[0] == 0:
            raise ValueError("leading coefficient a of r must be nonzero")
        object.__setattr__(self, "r_coeffs", r)
        object.__setattr__(self, "s_coeffs", s)

    @classmethod
    def from_spectral(cls, b: float, beta: complex) -> "QuadraticAlgebraicEq":
        """``r = -2 (z**2 - b)``, ``s = 2 z - beta``: the limit equation of the root measures."""
        return cls((-2.0, 0.0, 2.0 * b), (2.0, -beta))

    @property
    def r(self) -> ComplexPolynomial:
        a, b, c = self.r_coeffs
        return ComplexPolynomial([c, b, a])

    @property
    def s(self) -> ComplexPolynomial:
        e, f = self.s_coeffs
        return ComplexPolynomial([f, e])

    def discriminant(self) -> ComplexPolynomial:
        """``Q = r**2 - 4 s``."""
        r = self.r
        return r * r - self.s.scale(4.0)

    def decaying_solution(self, z: complex) -> complex:
        """The root of the quadratic that vanishes at infinity, in cancellation-free form.

        The large root ``(-r - sqrt(Q)) / 2`` is picked by modulus and the small
        one is ``s / large`` since the product of the roots is ``s``.
        """
        rz, sz = complex(self.r(z)), complex(self.s(z))
        sq = cmath.sqrt(rz * rz - 4.0 * sz)
        big = (-rz - sq) / 2.0
        alt = (-rz + sq) / 2.0
        if abs(alt) > abs(big):
            big = alt
        return sz / big if big != 0 else 0j

    def to_dict(self) -> dict:
        c = lambda v: [v.real, v.imag]
        return {"r": [c(v) for v in self.r_coeffs], "s": [c(v) for v in self.s_coeffs]}


# ---------------------------------------------------------------- discriminant


@dataclass(frozen=True)
class DiscriminantQD:
    """``-Q dz**2`` written as ``factor * (-p dz**2)`` with ``p`` monic and ``factor > 0``.

    ``rotation`` is the unit ``u`` of the coordinate change ``z = u w`` (1 if none).
    """

    qd: QuadraticDifferential
    factor: float
    rotation: complex
    degenerate: bool


def discriminant_qd(eq: QuadraticAlgebraicEq, rotation: complex = 1.0,
                    cfg: Config | None = None) -> DiscriminantQD:
    """Quadratic differential ``-Q dz**2`` of the discriminant.

    The trajectories of ``-Q dz**2`` and of ``-(Q / lead) dz**2`` agree only
    if ``lead`` is positive, so a non-positive leading coefficient is
    rejected; pass ``rotation = u`` (``|u| = 1``) to work in the coordinate
    ``w = z / u``, where the leading coefficient becomes ``a**2 u**6``.
    """
    cfg = resolve(cfg)
    u = complex(rotation)
    if abs(abs(u) - 1.0) > 1e-12:
        raise ValueError("rotation must have modulus 1")
    q = eq.discriminant()
    # -Q(z) dz^2 = -u^2 Q(u w) dw^2
    coeffs = np.array([c * u ** (k + 2) for k, c in enumerate(q.coeffs)])
    lead = coeffs[-1]
    if abs(lead.imag) > 1e-12 * abs(lead) or lead.real <= 0:
        raise ValueError(f"leading coefficient {lead:.6g} of the discriminant is not positive; "
                         "choose a rotation u with a**2 u**6 > 0")
    factor = float(lead.real)
    p = ComplexPolynomial(coeffs / factor)
    rts = np.roots(p.coeffs[::-1])
    spread = 1.0 + float(np.max(np.abs(rts)))
    if np.max(np.abs(rts - rts.mean())) < 1e-7 * spread:
        raise DegenerateDiscriminant("discriminant has a single zero of multiplicity 4")
    try:
        qd = QuadraticDifferential(p, cfg)
    except ValueError as exc:
        raise DegenerateDiscriminant(str(exc)) from exc
    return DiscriminantQD(qd, factor, u, max(qd.mults) > 1)


# ---------------------------------------------------------------- mass


@dataclass(frozen=True)
class MassReport:
    """Numeric ``1/z`` coefficient of the decaying branch and the closed forms."""

    mass: complex
    analytic: complex  # -e/a
    doubled: complex  # -2e/a, the value obtained without the 1/2 of the quadratic formula
    e_over_a_real: bool

    @property
    def doubled_ratio(self) -> float | None:
        """``doubled / mass``; 2 whenever the mass is nonzero."""
        if abs(self.mass) < 1e-300:
            return None
        return float(abs(self.doubled / self.mass))

    def to_dict(self) -> dict:
        c = lambda v: [v.real, v.imag]
        return {"mass": c(self.mass), "minus_e_over_a": c(self.analytic),
                "minus_2e_over_a": c(self.doubled), "doubled_ratio": self.doubled_ratio,
                "e_over_a_real": self.e_over_a_real}


def total_mass(eq: QuadraticAlgebraicEq) -> MassReport:
    """Mass of a measure whose Cauchy transform solves ``eq``.

    ``z C(z) = mass + O(1/z)``; it is evaluated at ``R`` and ``2R`` with
    ``R = 1e6 (1 + max |coefficient|)`` and combined by one Richardson step.
    """
    a, e = eq.r_coeffs[0], eq.s_coeffs[0]
    big = 1.0 + max(abs(v) for v in eq.r_coeffs + eq.s_coeffs)
    radius = 1e6 * big
    u = cmath.exp(0.3j)
    f1 = radius * u * eq.decaying_solution(radius * u)
    f2 = 2 * radius * u * eq.decaying_solution(2 * radius * u)
    mass = 2.0 * f2 - f1
    ratio = e / a
    real = abs(ratio.imag) <= 1e-12 * max(1.0, abs(ratio))
    return MassReport(complex(mass), -ratio, -2.0 * ratio, real)


# ---------------------------------------------------------------- densities


@dataclass(frozen=True)
class ArcDensity:
    """Density per unit arclength sampled at the interior points of an arc."""

    points: np.ndarray
    density: np.ndarray  # complex samples; real part is the density
    mass: float
    level_drift: float

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.density.imag))) if len(self.density) else 0.0

    @property
    def sign(self) -> int:
        re = self.density.real
        if np.all(re > 0):
            return 1
        if np.all(re < 0):
            return -1
        return 0


def _thin(points: np.ndarray, keep_off: float, nmax: int = 400) -> np.ndarray:
    """End points plus interior samples farther than ``keep_off`` from both ends."""
    a, b = points[0], points[-1]
    inner = points[1:-1]
    inner = inner[(np.abs(inner - a) > keep_off) & (np.abs(inner - b) > keep_off)]
    if len(inner) > nmax:
        inner = inner[np.linspace(0, len(inner) - 1, nmax).round().astype(int)]
    return np.concatenate(([a], inner, [b]))


def _sqrt_q(disc: DiscriminantQD, z: complex) -> complex:
    return math.sqrt(disc.factor) * cmath.sqrt(disc.qd.peval(z))


def plemelj_density(eq: QuadraticAlgebraicEq, arc: Trajectory, disc: DiscriminantQD | None = None,
                    cfg: Config | None = None, drift_tol: float = 1e-6) -> ArcDensity:
    """``(1 / 2 pi i) sqrt(Q(t)) t'(s)`` along ``arc`` (coordinates of ``disc``).

    The branch of ``sqrt(Q)`` is continued along the arc from its first
    interior sample.  The tangent ``t'(s)`` is the unit horizontal direction
    of the field at each sample, oriented along the polyline.  That the
    samples really lie on one trajectory is checked separately through the
    drift of ``Re int sqrt(Q)`` along the arc, which must stay below
    ``drift_tol`` times the arc's total ``|int sqrt(Q)|``.  The arc mass is
    the exact period of ``sqrt(Q) / 2 pi i`` between the arc's endpoints.
    """
    cfg = resolve(cfg)
    disc = disc if disc is not None else discriminant_qd(eq, cfg=cfg)
    qd = disc.qd
    pts = np.asarray(arc.points)
    inner = pts[1:-1]
    if len(inner) < 2:
        raise ValueError("arc has too few samples")
    w = np.empty(len(inner), complex)
    ref = None
    for i, z in enumerate(inner):
        v = _sqrt_q(disc, z)
        if ref is not None and (v * ref.conjugate()).real < 0:
            v = -v
        w[i] = ref = v
    chords = np.gradient(inner)
    field = 1j * w.conj() / np.abs(w)
    field = np.where((field * chords.conj()).real < 0, -field, field)
    dens = w * field / (2j * math.pi)
    # cumulative period along the polyline (Gauss rule per chord): its real
    # part measures how far the samples stray from one level set
    cum = np.zeros(len(inner), complex)
    ref = w[0]
    for i in range(len(inner) - 1):
        a, dz = inner[i], inner[i + 1] - inner[i]
        acc = 0j
        for x, wt in zip(_GL5_X, _GL5_W):
            v = _sqrt_q(disc, a + x * dz)
            if (v * ref.conjugate()).real < 0:
                v = -v
            ref = v
            acc += wt * v
        cum[i + 1] = cum[i] + acc * dz
    drift = float(np.max(np.abs(cum.real)))
    if drift > drift_tol * max(abs(cum[-1]), 1e-300):
        raise ValueError(f"arc is not a trajectory of -Q dz^2 (level drift {drift:.3g})")
    keep = _thin(pts, 1e-3 * qd.dmin)
    p = ComplexPolynomial(np.array(qd.p.coeffs) * disc.factor)
    # at a zero the hint only selects the branch just off it; elsewhere it is the start value
    at_zero = np.min(np.abs(np.array(qd.zeros) - keep[0])) < 1e-9 * qd.scale
    hint = _sqrt_q(disc, keep[1] if at_zero else keep[0])
    if (hint * w[0].conjugate()).real < 0:
        hint = -hint
    period, _, _ = _path_integral(p, keep, hint, cfg)
    return ArcDensity(inner, dens, float((period / (2j * math.pi)).real), drift)


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class ArcReport:
    endpoints: tuple
    mass: float
    sign: int

    def to_dict(self) -> dict:
        return {"endpoints": [[z.real, z.imag] for z in self.endpoints],
                "mass": self.mass, "sign": self.sign}


@dataclass(frozen=True)
class MotherBodyCandidate:
    """Accepted support: short trajectories with single-signed densities."""

    support: tuple
    densities: tuple
    arcs: tuple
    total_mass: float
    mass_report: MassReport
    verdict: str = "accepted"
    violated: str | None = None

    def to_dict(self) -> dict:
        return {"mass": self.total_mass, "e_over_a_real": self.mass_report.e_over_a_real,
                "arcs": [a.to_dict() for a in self.arcs], "verdict": self.verdict,
                "violated": self.violated}


@dataclass(frozen=True)
class Rejection:
    """A failed verification naming the violated condition."""

    violated: str
    arcs: tuple
    total_mass: float
    mass_report: MassReport
    verdict: str = "rejected"

    def to_dict(self) -> dict:
        return {"mass": self.total_mass, "e_over_a_real": self.mass_report.e_over_a_real,
                "arcs": [a.to_dict() for a in self.arcs], "verdict": self.verdict,
                "violated": self.violated}


def verify_candidate(eq: QuadraticAlgebraicEq, graph: CriticalGraph, disc: DiscriminantQD | None = None,
                     cfg: Config | None = None, mass_tol: float = 1e-6):
    """Check whether the short trajectories of ``graph`` carry a positive mother body.

    Each short trajectory contributes the absolute value of its arc mass.
    The candidate is accepted when ``e/a`` is real, every density is
    single-signed, and the arc masses add up to :func:`total_mass` within
    ``mass_tol``.  Otherwise a :class:`Rejection` is returned with one of
    ``"mass not real"``, ``"density not single-signed"``, ``"support deficit"``
    or ``"support excess"``.
    """
    cfg = resolve(cfg)
    disc = disc if disc is not None else discriminant_qd(eq, cfg=cfg)
    report = total_mass(eq)
    shorts = short_trajectories(graph)
    dens, arcs = [], []
    for st in shorts:
        d = plemelj_density(eq, st.trajectory, disc, cfg)
        dens.append(d)
        pts = st.trajectory.points
        arcs.append(ArcReport((complex(pts[0]), complex(pts[-1])), abs(d.mass), d.sign))
    carried = float(sum(a.mass for a in arcs))
    arcs = tuple(arcs)
    if not report.e_over_a_real:
        return Rejection("mass not real", arcs, carried, report)
    if any(a.sign == 0 for a in arcs):
        return Rejection("density not single-signed", arcs, carried, report)
    need = report.mass.real
    if carried < need - mass_tol:
        return Rejection("support deficit", arcs, carried, report)
    if carried > need + mass_tol:
        return Rejection("support excess", arcs, carried, report)
    return MotherBodyCandidate(tuple(st.trajectory for st in shorts), tuple(dens), arcs, carried, report)
