"""Adaptive Gauss-Kronrod integration of a branch-continued square root.

The integrand is ``sqrt(p(t)) dt`` along a straight segment.  Since the square
root is two-valued, the sign at every quadrature node is chosen by continuity
with the previously accepted node, starting from a known anchor value.  Panels
are processed in path order so that continuity propagates.

Endpoints that coincide with a zero of ``p`` are handled by the substitution
``t = z0 + (m - z0) u**2`` on the half-segment next to the zero, which turns the
``sqrt(t - z0)`` singularity into a smooth integrand in ``u``.
"""
from __future__ import annotations

import numpy as np

# 15-point Kronrod nodes on [-1, 1] with the embedded 7-point Gauss rule.
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]

_MAX_DEPTH = 60
# relative floor: below this the Kronrod/Gauss difference is rounding noise
_ROUND = 1e-14
_MAX_PANELS = 20000


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""

    def __init__(self, msg: str, bound: float):
        super().__init__(f"{msg} (achieved error bound {bound:.3e})")
        self.bound = bound


def eval_monic(zeros: np.ndarray, t):
    """Evaluate ``prod (t - z_j)`` in factored form (accurate near zeros)."""
    t = np.asarray(t, dtype=complex)
    out = np.ones_like(t)
    for zj in zeros:
        out = out * (t - zj)
    return out


def _fix_signs(vals: np.ndarray, ref: complex) -> np.ndarray:
    """Flip signs of ``vals`` in sequence so consecutive entries stay close."""
    out = vals.copy()
    prev = ref
    for i in range(out.size):
        v = out[i]
        if (v * np.conj(prev)).real < 0:
            v = -v
            out[i] = v
        prev = v
    return out


class _Integrand:
    """``sqrt(lead * prod(t - z_j))`` with a cheap distance-to-zeros query."""

    def __init__(self, zeros, lead=1.0):
        self.zeros = np.asarray(zeros, dtype=complex)
        self.lead = complex(lead)

    def sqrt_raw(self, t):
        return np.sqrt(self.lead * eval_monic(self.zeros, t))

    def dist(self, a: complex, b: complex, exclude: complex | None = None) -> float:
        """Distance from segment [a, b] to the zeros, ignoring the one nearest ``exclude``."""
        if self.zeros.size == 0:
            return np.inf
        d = b - a
        L2 = abs(d) ** 2
        skip = -1
        if exclude is not None:
            skip = int(np.argmin(np.abs(self.zeros - exclude)))
        best = np.inf
        for j, z in enumerate(self.zeros):
            if j == skip:
                continue
            s = 0.0 if L2 == 0 else min(1.0, max(0.0, ((z - a) * np.conj(d)).real / L2))
            best = min(best, abs(a + s * d - z))
        return best


def _regular(f: _Integrand, a: complex, b: complex, w_a: complex, tol: float):
    """Integrate from a to b (no zero on the closed segment).

    Returns (value, error_estimate, branch value at b).
    """
    total, err_total = 0.0 + 0.0j, 0.0
    L = abs(b - a)
    # stack of parameter intervals; processed strictly left to right
    stack = [(0.0, 1.0, 0)]
    w = w_a
    npan = 0
    while stack:
        npan += 1
        if npan > _MAX_PANELS:
            raise QuadratureError("panel budget exhausted", err_total)
        s0, s1, depth = stack.pop()
        t0 = a + (b - a) * s0
        t1 = a + (b - a) * s1
        plen = L * (s1 - s0)
        if depth < _MAX_DEPTH and plen > 0.5 * f.dist(t0, t1):
            sm = 0.5 * (s0 + s1)
            stack.append((sm, s1, depth + 1))
            stack.append((s0, sm, depth + 1))
            continue
        half = 0.5 * (t1 - t0)
        mid = 0.5 * (t1 + t0)
        nodes = np.append(mid + half * _XK, t1)
        vals = _fix_signs(f.sqrt_raw(nodes), w)
        k = half * np.dot(_WK, vals[:15])
        g = half * np.dot(_WG, vals[:15])
        e = abs(k - g)
        if e > max(tol * (s1 - s0), _ROUND * abs(k)) and depth < _MAX_DEPTH and plen > 1e-15 * (1 + L):
            sm = 0.5 * (s0 + s1)
            stack.append((sm, s1, depth + 1))
            stack.append((s0, sm, depth + 1))
            continue
        total += k
        err_total += e
        w = vals[15]
    return total, err_total, w


def _singular(f: _Integrand, z0: complex, m: complex, w_m: complex, tol: float):
    """Integrate from the zero z0 to the regular point m.

    Uses t = z0 + (m - z0) u**2, u in [0, 1], and processes panels from u = 1
    toward u = 0 so the branch is anchored at m.
    Returns (value, error_estimate).
    """
    D = m - z0
    total, err_total = 0.0 + 0.0j, 0.0
    stack = [(0.0, 1.0, 0)]
    w = w_m
    npan = 0
    while stack:
        npan += 1
        if npan > _MAX_PANELS:
            raise QuadratureError("panel budget exhausted", err_total)
        u0, u1, depth = stack.pop()
        t0 = z0 + D * u0 * u0
        t1 = z0 + D * u1 * u1
        plen = abs(D) * (u1 * u1 - u0 * u0)
        if depth < _MAX_DEPTH and plen > 0.5 * f.dist(t0, t1, exclude=z0):
            um = 0.5 * (u0 + u1)
            stack.append((u0, um, depth + 1))
            stack.append((um, u1, depth + 1))
            continue
        half = 0.5 * (u1 - u0)
        mid = 0.5 * (u1 + u0)
        us = np.concatenate(([u0], mid + half * _XK))
        # sign fixing runs from u1 downward, starting at the anchor
        desc = us[::-1]
        vals = _fix_signs(f.sqrt_raw(z0 + D * desc * desc), w)[::-1]
        jac = 2.0 * us * D
        fv = vals * jac
        k = half * np.dot(_WK, fv[1:])
        g = half * np.dot(_WG, fv[1:])
        e = abs(k - g)
        if e > max(tol * (u1 - u0), _ROUND * abs(k)) and depth < _MAX_DEPTH and plen > 1e-300:
            um = 0.5 * (u0 + u1)
            stack.append((u0, um, depth + 1))
            stack.append((um, u1, depth + 1))
            continue
        total += k
        err_total += e
        # branch at u0 (only meaningful when u0 > 0)
        w = vals[0]
    return total, err_total


def segment_integral(f: _Integrand, a: complex, b: complex, w_a: complex | None,
                     sing_a: bool, sing_b: bool, tol: float):
    """Integral of sqrt(p) over [a, b].

    ``w_a`` is the branch value at ``a`` when ``a`` is regular.  When ``a`` is a
    zero it is a hint: the branch at the segment midpoint is the one closest to
    ``w_a`` (principal branch when the hint is None).
    Returns (value, error, branch value at b or None if b is a zero).
    """
    if not (sing_a or sing_b):
        return _regular(f, a, b, w_a, tol)
    m = 0.5 * (a + b)
    if sing_a:
        w_m = complex(f.sqrt_raw(np.array([m]))[0])
        if w_a is not None and (w_m * np.conj(w_a)).real < 0:
            w_m = -w_m
        v1, e1 = _singular(f, a, m, w_m, 0.5 * tol)
        if sing_b:
            v2, e2 = _singular(f, b, m, w_m, 0.5 * tol)
            return v1 - v2, e1 + e2, None
        v2, e2, w_b = _regular(f, m, b, w_m, 0.5 * tol)
        return v1 + v2, e1 + e2, w_b
    v1, e1, w_m = _regular(f, a, m, w_a, 0.5 * tol)
    v2, e2 = _singular(f, b, m, w_m, 0.5 * tol)
    return v1 - v2, e1 + e2, None
