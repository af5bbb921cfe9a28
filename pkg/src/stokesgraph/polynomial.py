"""Complex polynomials, root finding and branch-tracked integrals of sqrt(p)."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Config, resolve
from .quadrature import QuadratureError, _Integrand, segment_integral

__all__ = [
    "ComplexPolynomial", "OrientedPath", "BranchedSqrtTrace", "BranchPointProximity",
    "QuadratureError", "roots", "sqrt_along", "period_integral",
    "residue_at_infinity", "satisfies_necessary_condition", "sqrt_laurent",
]


class BranchPointProximity(ValueError):
    """A path sample or segment comes too close to a zero of p."""

    def __init__(self, index: int, distance: float):
        super().__init__(f"branch point proximity at sample {index} (distance {distance:.3e})")
        self.index = index
        self.distance = distance


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients, lowest degree first.

    Trailing (highest-degree) zero coefficients are stripped on construction.
    """

    coeffs: tuple

    def __init__(self, coeffs: Sequence[complex]):
        c = [complex(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, rts: Sequence[complex], lead: complex = 1.0) -> "ComplexPolynomial":
        c = np.array([complex(lead)])
        for r in rts:
            # multiply by (z - r), lowest degree first
            c = np.concatenate(([0j], c)) - np.concatenate((c * r, [0j]))
        return cls(c)

    @classmethod
    def quartic_family(cls, a: complex) -> "ComplexPolynomial":
        """``(z**2 - 1)(z - a)(z - conj(a))``."""
        # built in real arithmetic so the coefficients are exactly real
        a = complex(a)
        x, r2 = a.real, a.real * a.real + a.imag * a.imag
        return cls([-r2, 2 * x, r2 - 1.0, -2 * x, 1.0])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], np.asarray(z, dtype=complex))

    def deriv(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial([0])
        return ComplexPolynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "ComplexPolynomial":
        return ComplexPolynomial([c / self.lead for c in self.coeffs])

    def __mul__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return ComplexPolynomial(np.convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, complex)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return ComplexPolynomial(a)

    def __sub__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return self + ComplexPolynomial([-c for c in other.coeffs])

    def scale(self, s: complex) -> "ComplexPolynomial":
        return ComplexPolynomial([s * c for c in self.coeffs])

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol * max(1.0, abs(c)) for c in self.coeffs)

    def to_json(self) -> list:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "ComplexPolynomial":
        return cls([complex(re, im) for re, im in data])


@dataclass(frozen=True)
class OrientedPath:
    samples: tuple
    closed: bool = False

    def __init__(self, samples: Sequence[complex], closed: bool = False):
        s = tuple(complex(z) for z in samples)
        if len(s) < 2:
            raise ValueError("a path needs at least two samples")
        for k in range(len(s) - 1):
            if s[k] == s[k + 1]:
                raise ValueError(f"consecutive samples {k} and {k + 1} coincide")
        if closed and s[0] != s[-1]:
            s = s + (s[0],)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "closed", closed)

    @classmethod
    def segment(cls, a: complex, b: complex) -> "OrientedPath":
        return cls([a, b])

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 64) -> "OrientedPath":
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        pts = center + radius * np.exp(1j * t)
        return cls(list(pts) + [pts[0]], closed=True)

    @property
    def start(self) -> complex:
        return self.samples[0]

    @property
    def end(self) -> complex:
        return self.samples[-1]

    def reversed(self) -> "OrientedPath":
        return OrientedPath(self.samples[::-1], self.closed)

    def conj(self) -> "OrientedPath":
        return OrientedPath([z.conjugate() for z in self.samples], self.closed)


@dataclass(frozen=True)
class BranchedSqrtTrace:
    path: OrientedPath
    values: tuple


def roots(p: ComplexPolynomial, cfg: Config | None = None) -> np.ndarray:
    """All roots of ``p`` with multiplicity.

    Companion-matrix eigenvalues (numpy) followed by one Newton step per root.
    The Newton step is skipped when it would not reduce the residual, which
    keeps clustered (multiple) roots from being pushed apart.
    """
    cfg = resolve(cfg)
    if p.degree < 1:
        raise ValueError("constant polynomial")
    c = np.array(p.coeffs[::-1])
    r = np.roots(c).astype(complex)
    dp = np.polyder(c)
    for i, z in enumerate(r):
        f = np.polyval(c, z)
        d = np.polyval(dp, z)
        if d != 0:
            zn = z - f / d
            if abs(np.polyval(c, zn)) < abs(f):
                r[i] = zn
    # stable, deterministic ordering
    return r[np.lexsort((r.imag, r.real))]


def _zero_data(p: ComplexPolynomial, cfg: Config):
    if p.degree == 0:
        return np.zeros(0, complex), 1.0
    z = roots(p, cfg)
    scale = max(1.0, float(np.max(np.abs(z))))
    return z, scale


def _check_clearance(z: np.ndarray, samples, clearance: float, allow_ends: bool):
    n = len(samples)
    for k, s in enumerate(samples):
        if z.size == 0:
            return
        d = float(np.min(np.abs(z - s)))
        if d < clearance and not (allow_ends and k in (0, n - 1)):
            raise BranchPointProximity(k, d)
    for k in range(n - 1):
        a, b = samples[k], samples[k + 1]
        ex_a = allow_ends and k == 0 and np.min(np.abs(z - a)) < clearance
        ex_b = allow_ends and k == n - 2 and np.min(np.abs(z - b)) < clearance
        for zj in z:
            if (ex_a and abs(zj - a) < clearance) or (ex_b and abs(zj - b) < clearance):
                continue
            d = _Integrand(np.array([zj])).dist(a, b)
            if d < clearance:
                raise BranchPointProximity(k, d)


def sqrt_along(p: ComplexPolynomial, path: OrientedPath, start_branch: complex,
               cfg: Config | None = None) -> BranchedSqrtTrace:
    """Continue ``sqrt(p)`` along ``path`` from ``start_branch``.

    Each path segment is internally subdivided so that every sub-step is short
    relative to the distance to the nearest zero; the sign is chosen by
    continuity at every internal point.
    """
    cfg = resolve(cfg)
    z, scale = _zero_data(p, cfg)
    samples = path.samples
    p0 = complex(p(samples[0]))
    sb = complex(start_branch)
    if abs(sb * sb - p0) > 1e-8 * max(1.0, abs(p0)):
        raise ValueError("start_branch**2 does not match p(start)")
    _check_clearance(z, samples, cfg.clearance_rel * scale, allow_ends=False)
    vals = [sb]
    w = sb
    for k in range(len(samples) - 1):
        a, b = samples[k], samples[k + 1]
        w = _continue_segment(p, z, a, b, w)
        vals.append(w)
    return BranchedSqrtTrace(path, tuple(vals))


def _continue_segment(p: ComplexPolynomial, z: np.ndarray, a: complex, b: complex,
                      w: complex) -> complex:
    t = 0.0
    L = abs(b - a)
    while t < 1.0:
        here = a + (b - a) * t
        d = float(np.min(np.abs(z - here))) if z.size else np.inf
        dt = min(1.0 - t, 0.25 * d / L) if L > 0 else 1.0
        t = min(1.0, t + dt)
        v = cmath.sqrt(complex(p(a + (b - a) * t)))
        if (v * w.conjugate()).real < 0:
            v = -v
        w = v
    return w


def _path_integral(p: ComplexPolynomial, samples, start_branch, cfg: Config):
    z, scale = _zero_data(p, cfg)
    clearance = cfg.clearance_rel * scale
    _check_clearance(z, samples, clearance, allow_ends=True)
    f = _Integrand(z, p.lead)
    n = len(samples) - 1
    sing_start = z.size > 0 and np.min(np.abs(z - samples[0])) < clearance
    sing_end = z.size > 0 and np.min(np.abs(z - samples[-1])) < clearance
    total = 0j
    err = 0.0
    w = None if start_branch is None else complex(start_branch)
    if not sing_start and w is None:
        w = cmath.sqrt(complex(p(samples[0])))
    if not sing_start and w is not None:
        p0 = complex(p(samples[0]))
        if abs(w * w - p0) > 1e-8 * max(1.0, abs(p0)):
            raise ValueError("start_branch**2 does not match p(start)")
    # per-segment tolerance split by length
    lengths = np.array([abs(samples[k + 1] - samples[k]) for k in range(n)])
    tot_len = float(lengths.sum())
    for k in range(n):
        sa = sing_start and k == 0
        sb = sing_end and k == n - 1
        tol = cfg.quad_abs * lengths[k] / tot_len
        v, e, w = segment_integral(f, samples[k], samples[k + 1], w, sa, sb, tol)
        total += v
        err += e
    return total, err, w


def period_integral(p: ComplexPolynomial, path: OrientedPath, start_branch: complex | None = None,
                    cfg: Config | None = None) -> complex:
    """Integral of ``sqrt(p)`` along ``path`` with the branch continued from ``start_branch``.

    The path may begin and/or end at a zero of ``p``; in that case the terminal
    sub-segment uses the substitution ``t = z0 + d*u**2``.  When the path starts
    at a zero, ``start_branch`` is a hint selecting the branch just off the zero
    (``None`` picks the principal branch at the first segment midpoint).

    Raises
    ------
    BranchPointProximity
        An interior sample or segment passes within the clearance of a zero.
    QuadratureError
        The adaptive refinement did not reach the configured tolerance.
    """
    cfg = resolve(cfg)
    val, err, _ = _path_integral(p, path.samples, start_branch, cfg)
    if err > 10 * max(cfg.quad_abs, 1e-13 * abs(val)):
        raise QuadratureError("adaptive refinement did not converge", err)
    return complex(val)


def residue_at_infinity(p: ComplexPolynomial) -> complex:
    """Return ``(alpha**3 - 4 alpha beta + 8 gamma) / 16`` for a monic quartic.

    With ``p = z^4 + alpha z^3 + beta z^2 + gamma z + delta`` this is the
    coefficient of ``1/z`` in the expansion of ``sqrt(p)`` at infinity (branch
    ``~ z^2``), i.e. minus the residue of ``sqrt(p) dz`` at infinity.
    """
    if p.degree != 4:
        raise ValueError(f"expected a quartic, got degree {p.degree}")
    if abs(p.lead - 1) > 1e-12:
        raise ValueError("expected a monic quartic")
    _, gamma, beta, alpha, _ = p.coeffs
    return (alpha ** 3 - 4 * alpha * beta + 8 * gamma) / 16


def satisfies_necessary_condition(p: ComplexPolynomial, tol: float = 1e-12) -> bool:
    """Whether ``Im(alpha^3 - 4 alpha beta + 8 gamma) = 0`` (necessary, not sufficient)."""
    return abs((16 * residue_at_infinity(p)).imag) <= tol * max(1.0, max(abs(c) for c in p.coeffs) ** 3)


def sqrt_laurent(p: ComplexPolynomial, nterms: int) -> np.ndarray:
    """Coefficients ``s_n`` with ``sqrt(p) = z^(d/2) * sum_n s_n z^(-n)`` at infinity.

    ``p`` must be monic of even degree ``d``; the branch is the one ~ ``z^(d/2)``.
    """
    d = p.degree
    if d % 2 or abs(p.lead - 1) > 1e-12:
        raise ValueError("need a monic polynomial of even degree")
    c = np.zeros(nterms, complex)
    for n in range(min(nterms, d + 1)):
        c[n] = p.coeffs[d - n]
    s = np.zeros(nterms, complex)
    s[0] = 1.0
    for n in range(1, nterms):
        acc = sum(s[k] * s[n - k] for k in range(1, n))
        s[n] = (c[n] - acc) / 2
    return s
