"""The classification curve for the family ``(z**2 - 1)(z - a)(z - conj a)``.

``gamma_value(a) = Re int_0^a sqrt((t - a)(t - conj a)(t**2 - 1)) dt`` vanishes
exactly when ``1`` and ``a`` (or ``-1`` and ``a``) are joined by a short
trajectory.  Its zero set in the upper half-plane is the segment ``[-1, 1]``
plus four arcs leaving ``+-1``; they split the plane into four regions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .config import Config, resolve
from .polynomial import ComplexPolynomial, OrientedPath, _path_integral

__all__ = [
    "GammaBranch", "RegionClass", "gamma_value", "fg_split", "asymptote_function",
    "solve_asymptote_angle", "trace_branch", "classify_region", "locate",
    "BRANCH_LABELS", "ContinuationError", "local_start_angle",
]

BRANCH_LABELS = ("G1+", "G1-", "G-1+", "G-1-")


class ContinuationError(RuntimeError):
    def __init__(self, msg: str, last_point: complex):
        super().__init__(f"{msg} (last good point {last_point:.6g})")
        self.last_point = last_point


# ---------------------------------------------------------------- values


def gamma_value(z: complex, cfg: Config | None = None) -> float:
    """Real part of the branch-tracked integral from 0 to ``z``.

    The path is ``0 -> Re z -> z``.  On the real leg the integrand is real
    only on ``|t| > 1``, so the leg contributes ``sign(x) F``; on ``[0, 1]`` it
    is purely imaginary and contributes nothing to the real part.  The
    vertical leg is integrated with the polynomial-core quadrature, whose
    endpoint rule handles the square-root zero at ``z``.  The branch is
    positive on the real axis beyond ``+-1`` (``+i`` times positive inside).
    ``Im z < 0`` is mapped to the conjugate, which has the same value.
    """
    cfg = resolve(cfg)
    z = complex(z)
    x, y = z.real, abs(z.imag)
    if y == 0.0:
        if abs(x) <= 1.0:
            return 0.0
        return math.copysign(_real_leg(abs(x), 0.0), x)
    real_part = math.copysign(_real_leg(abs(x), y), x) if abs(x) > 1.0 else 0.0
    zz = complex(x, y)
    p = ComplexPolynomial.quartic_family(zz)
    if abs(x) > 1.0:
        w0 = complex(y * math.sqrt(x * x - 1.0), 0.0)
        start = complex(x, 0.0)
        val, _, _ = _path_integral(p, (start, zz), w0, cfg)
    elif abs(x) < 1.0:
        w0 = complex(0.0, y * math.sqrt(1.0 - x * x))
        val, _, _ = _path_integral(p, (complex(x, 0.0), zz), w0, cfg)
    else:
        # the leg starts at the zero +-1: pick the branch continuous with x > 1
        mid = complex(x, 0.5 * y)
        hint = y * math.sqrt(1 - 0.25) * cmath.sqrt(mid * mid - 1)
        val, _, _ = _path_integral(p, (complex(x, 0.0), zz), hint, cfg)
    return float(real_part + val.real)


def _real_leg(x: float, y: float) -> float:
    """``F(x, y) = int_1^x sqrt(((u - x)^2 + y^2)(u^2 - 1)) du`` (scipy, algebraic weight)."""
    if x <= 1.0:
        return 0.0
    val, _ = integrate.quad(lambda u: math.sqrt(((u - x) ** 2 + y * y) * (u + 1.0)),
                            1.0, x, weight="alg", wvar=(0.5, 0.0), epsabs=1e-14, epsrel=1e-13)
    return val


def _vertical_leg(x: float, y: float) -> float:
    """``G(x, y) = -y^2 int_0^1 sqrt(1 - s^2) Im sqrt((x + i s y)^2 - 1) ds`` for x >= 0.

    In the closed first quadrant ``(x + i s y)^2 - 1`` has non-negative
    imaginary part, so the principal square root is continuous along the leg.
    """
    def f(s):
        return math.sqrt(1.0 + s) * cmath.sqrt(complex(x, s * y) ** 2 - 1.0).imag

    val, _ = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(0.0, 0.5), epsabs=1e-14, epsrel=1e-13)
    return -y * y * val


def fg_split(x: float, y: float) -> tuple[float, float]:
    """The real-leg and vertical-leg parts ``(F, G)`` with ``F + G = gamma_value(x + iy)``.

    Computed with scipy's algebraic-weight quadrature, independently of the
    branch-tracked route used by :func:`gamma_value`.
    """
    if not (x > 1.0 and y > 0.0):
        raise ValueError("(x, y) must satisfy x > 1 and y > 0")
    return _real_leg(x, y), _vertical_leg(x, y)


@lru_cache(maxsize=65536)
def _g_first_quadrant(x: float, y: float) -> float:
    """F + G for x >= 0, y >= 0 (zero on [0, 1])."""
    return _real_leg(x, y) + _vertical_leg(x, y)


# ---------------------------------------------------------------- asymptote


def asymptote_function(x):
    """``sinh(2/(3 cot x sin^3 x) - cot x / sin x) - cot x`` on (0, pi/2)."""
    x = np.asarray(x, dtype=float)
    c = np.cos(x) / np.sin(x)
    s = np.sin(x)
    return np.sinh(2.0 / (3.0 * c * s ** 3) - c / s) - c


def solve_asymptote_angle() -> float:
    """Unique root of :func:`asymptote_function` in (0, pi/2).

    The function tends to -inf at 0+ and +inf at pi/2-; the bracket below
    is checked for a sign change before Brent's method is applied.
    """
    a, b = 0.5, 1.2
    fa, fb = float(asymptote_function(a)), float(asymptote_function(b))
    if not (fa < 0 < fb):
        raise RuntimeError("asymptote bracket lost its sign change")
    return float(optimize.brentq(lambda t: float(asymptote_function(t)), a, b,
                                 xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


# ---------------------------------------------------------------- branches


@dataclass(frozen=True)
class GammaBranch:
    label: str
    points: np.ndarray
    asymptote_angle: float

    def heading(self) -> float:
        """Direction of the last polyline segment."""
        return cmath.phase(self.points[-1] - self.points[-2])

    def to_csv(self) -> str:
        lines = ["x,y"] + [f"{float(z.real)!r},{float(z.imag)!r}" for z in self.points]
        return "\n".join(lines) + "\n"


def local_start_angle() -> float:
    """Polar angle at which the first-quadrant arc leaves ``z = 1``.

    Writing ``a = 1 + rho e^{i phi}`` and letting ``rho -> 0``, the condition
    ``Re int_1^a sqrt(p) = 0`` becomes, after the scaling ``t = 1 + rho s``,
    ``Re[i e^{2 i phi} int_0^1 sqrt(t (1 - t)) sqrt(t e^{i phi} - e^{-i phi}) dt] = 0``,
    which is independent of ``rho``.  Its root in (1, 1.3) is returned.
    """
    def h(phi):
        e1, e2 = cmath.exp(1j * phi), cmath.exp(2j * phi)
        val, _ = integrate.quad(lambda t: (1j * e2 * cmath.sqrt(t * e1 - e1.conjugate())).real,
                                0.0, 1.0, weight="alg", wvar=(0.5, 0.5), epsabs=1e-15, epsrel=1e-14)
        return val

    return float(optimize.brentq(h, 1.0, 1.3, xtol=1e-15))


def _radial_grid(radius: float) -> np.ndarray:
    """Distances from 1 at which the arc is sampled: steps 0.001 growing to 0.5."""
    tiny = np.array([0.001, 0.002, 0.005])
    fine = np.arange(1, 100) * 0.01
    mid = 1.0 + np.arange(0, 80) * 0.05
    far = 5.0 + np.arange(0, int(math.ceil((radius + 1.0 - 5.0) / 0.5)) + 1) * 0.5
    return np.round(np.concatenate((tiny, fine, mid, far)), 12)


def _correct(rho: float, phi: float) -> float:
    """Polar angle where the arc meets ``|z - 1| = rho``, bracketed near ``phi``.

    ``g`` scales like ``rho**2.5`` near 1, so an absolute tolerance on the
    value is useless; a sign-change bracket with Brent's method is not.
    """
    def g(t):
        z = 1.0 + rho * cmath.exp(1j * t)
        return _g_first_quadrant(z.real, z.imag)

    g0 = g(phi)
    if g0 == 0.0:
        return float(phi)
    for width in (0.005, 0.02, 0.08, 0.25, 0.5):
        for other in (phi - width, phi + width):
            if 0.0 < other < math.pi and g(other) * g0 < 0:
                lo, hi = sorted((phi, other))
                return float(optimize.brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16))
    raise ContinuationError("corrector divergence", 1.0 + rho * cmath.exp(1j * phi))


@lru_cache(maxsize=8)
def _first_branch(radius: float) -> np.ndarray:
    """The arc leaving 1 into the first quadrant, sampled on circles about 1.

    Predictor: extrapolate the polar angle from the two previous circles.
    Corrector: bracketed root of ``F + G`` on the circle, i.e. transverse to the arc.
    """
    pts = [1.0 + 0j]
    phis: list[float] = []
    rhos: list[float] = []
    for rho in _radial_grid(radius):
        if len(phis) >= 2:
            guess = phis[-1] + (phis[-1] - phis[-2]) * (rho - rhos[-1]) / (rhos[-1] - rhos[-2])
        elif phis:
            guess = phis[-1]
        else:
            guess = local_start_angle()
        phi = _correct(float(rho), guess)
        if phis and abs(phi - phis[-1]) > 0.5:
            raise ContinuationError("corrector jumped off the branch", pts[-1])
        phis.append(phi)
        rhos.append(float(rho))
        pts.append(1.0 + rho * cmath.exp(1j * phi))
        if abs(pts[-1]) >= radius:
            break
    return np.array(pts)


def trace_branch(label: str, cfg: Config | None = None) -> GammaBranch:
    """Polyline of one of the four arcs, out to ``cfg.gamma_radius``.

    The first-quadrant arc is traced by predictor-corrector continuation of
    ``F + G = 0``; the others are its reflections in the axes.
    """
    cfg = resolve(cfg)
    if label not in BRANCH_LABELS:
        raise ValueError(f"unknown branch {label!r}")
    base = _first_branch(float(cfg.gamma_radius))
    xstar = solve_asymptote_angle()
    if label == "G1+":
        pts, ang = base, xstar
    elif label == "G1-":
        pts, ang = base.conj(), -xstar
    elif label == "G-1+":
        pts, ang = -base.conj(), math.pi - xstar
    else:
        pts, ang = -base, xstar - math.pi
    return GammaBranch(label, pts.copy(), ang)


# ---------------------------------------------------------------- regions


@dataclass(frozen=True)
class RegionClass:
    """One of ``O1, O2, O+, O-``, ``on-gamma`` (with branch label) or ``on-segment``."""

    kind: str
    branch: str | None = None

    def __str__(self) -> str:
        return f"{self.kind}({self.branch})" if self.branch else self.kind


def _crossings(pt: complex, poly: np.ndarray) -> int:
    """Number of crossings of the ray ``pt + s``, ``s > 0`` with the polyline."""
    a, b = poly[:-1], poly[1:]
    ya, yb = a.imag, b.imag
    straddle = (ya > pt.imag) != (yb > pt.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = a.real + (pt.imag - ya) * (b.real - a.real) / (yb - ya)
    return int(np.count_nonzero(straddle & (xc > pt.real)))


def _extended_branch(cfg: Config) -> np.ndarray:
    base = _first_branch(float(cfg.gamma_radius))
    d = base[-1] - base[-2]
    far = base[-1] + 1e6 * d / abs(d)
    return np.append(base, far)


def locate(a: complex, cfg: Config | None = None) -> RegionClass:
    """Region of any point of the plane, including the real axis."""
    cfg = resolve(cfg)
    a = complex(a)
    if a.imag == 0.0:
        if abs(a.real) <= 1.0:
            return RegionClass("on-segment")
        return RegionClass("O1" if a.real > 0 else "O2")
    return classify_region(a, cfg)


def classify_region(a: complex, cfg: Config | None = None) -> RegionClass:
    """Region of a non-real parameter ``a``.

    The point is reflected into the first quadrant, compared with the traced
    first-quadrant arc by a horizontal-ray crossing count, and mapped back.
    Points with ``|Re a| > 1`` and ``|gamma_value(a)| < cfg.on_curve`` are
    reported on the curve.
    """
    cfg = resolve(cfg)
    a = complex(a)
    if a.imag == 0.0:
        raise ValueError("parameter must be non-real")
    right = a.real >= 0
    upper = a.imag > 0
    # the arcs live in |Re z| > 1; near (-1, 1) the value is small but the
    # point is off the curve, so the band test is restricted to |Re a| > 1
    if abs(a.real) > 1.0 and abs(gamma_value(a, cfg)) < cfg.on_curve:
        lab = ("G1" if right else "G-1") + ("+" if upper else "-")
        return RegionClass("on-gamma", lab)
    q = complex(abs(a.real), abs(a.imag))
    above = _crossings(q, _extended_branch(cfg)) % 2 == 1
    if above:
        return RegionClass("O+" if upper else "O-")
    return RegionClass("O1" if right else "O2")
