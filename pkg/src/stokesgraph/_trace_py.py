"""Pure-Python trajectory tracing kernel.

Mirrors ``_trace_c.pyx`` line for line; used when the compiled module is not
available or when ``STOKESGRAPH_PURE_PYTHON=1`` is set.

The traced curve follows the unit field ``u = rot * conj(w) / |w|`` with
``w = sqrt(p(z))`` continued along the curve.  Along it
``conj(rot) * dzeta = |w| ds`` so ``Im(conj(rot) * zeta)`` is conserved and
``Re(conj(rot) * zeta)`` increases.  ``rot = 1j`` gives horizontal
trajectories, ``rot = 1`` orthogonal ones.
"""
from __future__ import annotations

import cmath
import math

# Gauss-Legendre on [0, 1]
_GL5_X = (0.04691007703066800, 0.23076534494715845, 0.5,
          0.76923465505284155, 0.95308992296933200)
_GL5_W = (0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
          0.23931433524968324, 0.11846344252809454)
# 8-point rule on [0, 1], listed with descending nodes
_GL8_X = (0.98014492824876812, 0.89833323870681337, 0.76276620495816450,
          0.59171732124782495, 0.40828267875217505, 0.23723379504183550,
          0.10166676129318663, 0.01985507175123188)
_GL8_W = (0.05061426814518813, 0.11119051722668724, 0.15685332293894364,
          0.18134189168918100, 0.18134189168918100, 0.15685332293894364,
          0.11119051722668724, 0.05061426814518813)

OPEN, ZERO, INFINITY, UNDERFLOW = 0, 1, 2, -1


def _peval(z, factors):
    # factors are multiplied in consecutive pairs; listing conjugate zeros
    # next to each other makes p(conj z) == conj(p(z)) bit for bit
    v = 1.0 + 0.0j
    n = len(factors)
    i = 0
    while i + 1 < n:
        v *= (z - factors[i]) * (z - factors[i + 1])
        i += 2
    if i < n:
        v *= z - factors[i]
    return v


def _branch(z, ref, factors):
    w = cmath.sqrt(_peval(z, factors))
    if (w * ref.conjugate()).real < 0:
        w = -w
    return w


def _tangent(w, rot):
    return rot * w.conjugate() / abs(w)


def singular_integral(zj, z, w, factors):
    """Integral of sqrt(p) from the zero ``zj`` to ``z`` (branch ``w`` at ``z``)."""
    D = z - zj
    total = 0.0j
    ref = w
    for i in range(8):
        x = _GL8_X[i]
        t = zj + D * x * x
        v = cmath.sqrt(_peval(t, factors))
        if (v * ref.conjugate()).real < 0:
            v = -v
        ref = v
        total += _GL8_W[i] * v * (2.0 * x)
    return total * D


def trace_kernel(factors, zeros, mults, leads, z0, w0, zeta0, rot, level, launch, center,
                 dir_offset, params):
    (h_max, k_zero, k_inf, rtol, check_radius, capture_tol, escape_radius,
     lock_angle, lock_steps, budget, max_steps, h_min, scale) = params
    nz = len(zeros)
    crot = rot.conjugate()
    z = z0
    w = w0
    zeta = zeta0
    prog = (crot * zeta).real
    pts = [z]
    progs = [prog]
    s = 0.0
    missed = [False] * nz
    left_launch = launch < 0
    lock_k = -1
    lock_n = 0
    h = h_max
    third = math.pi / 3.0
    for _step in range(max_steps):
        # distance to zeros, capture test
        dz = math.inf
        for j in range(nz):
            dj = abs(z - zeros[j])
            if dj < dz:
                dz = dj
            if j == launch and not left_launch:
                if dj > 4.0 * check_radius:
                    left_launch = True
                continue
            if dj < check_radius:
                if missed[j]:
                    continue
                zeta_j = zeta - singular_integral(zeros[j], z, w, factors)
                delta = (crot * zeta_j).imag - level
                r = mults[j]
                dest = ((r + 2) * abs(delta) / (2.0 * math.sqrt(abs(leads[j])))) ** (2.0 / (r + 2))
                prog_j = (crot * zeta_j).real
                if dest < capture_tol and prog_j > prog - 1e-12 * (1.0 + abs(prog)):
                    pts.append(zeros[j])
                    progs.append(max(prog_j, prog + 1e-300))
                    s += dj
                    return pts, progs, ZERO, j, s
                missed[j] = True
            elif dj > 2.0 * check_radius:
                missed[j] = False
        # escape test
        rc = abs(z - center)
        if rc > escape_radius:
            ang = cmath.phase(z - center)
            k = int(round((ang - dir_offset) / third)) % 6
            dev = (ang - dir_offset - k * third + math.pi) % (2.0 * math.pi) - math.pi
            u = _tangent(w, rot)
            outward = ((z - center).conjugate() * u).real > 0
            if abs(dev) < lock_angle and outward:
                if k == lock_k:
                    lock_n += 1
                else:
                    lock_k = k
                    lock_n = 1
                if lock_n >= lock_steps:
                    return pts, progs, INFINITY, lock_k, s
            else:
                lock_n = 0
                lock_k = -1
        if s > budget:
            return pts, progs, OPEN, -1, s
        # adaptive Bogacki-Shampine step
        ell = min(dz, rc + scale)
        tol = rtol * ell
        hcap = min(h_max, k_zero * dz, k_inf * (rc + scale))
        if h > hcap:
            h = hcap
        while True:
            if h < h_min:
                return pts, progs, UNDERFLOW, -1, s
            k1 = _tangent(w, rot)
            z2 = z + 0.5 * h * k1
            w2 = _branch(z2, w, factors)
            k2 = _tangent(w2, rot)
            z3 = z + 0.75 * h * k2
            w3 = _branch(z3, w, factors)
            k3 = _tangent(w3, rot)
            zn = z + h * (2.0 / 9.0 * k1 + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3)
            wn = _branch(zn, w3, factors)
            k4 = _tangent(wn, rot)
            err = h * abs(-5.0 / 72.0 * k1 + 1.0 / 12.0 * k2 + 1.0 / 9.0 * k3 - 0.125 * k4)
            if err <= tol:
                break
            h *= max(0.2, 0.9 * (tol / err) ** (1.0 / 3.0))
        # chord integral with branch continuity
        dzc = zn - z
        acc = 0.0j
        ref = w
        for i in range(5):
            v = _branch(z + _GL5_X[i] * dzc, ref, factors)
            ref = v
            acc += _GL5_W[i] * v
        zeta_n = zeta + acc * dzc
        # transversal projection back onto the level set
        delta = (crot * zeta_n).imag - level
        zn = zn - 1j * delta * rot / wn
        zeta_n = zeta_n - 1j * delta * rot
        wn = _branch(zn, wn, factors)
        s += abs(zn - z)
        z = zn
        w = wn
        zeta = zeta_n
        prog = (crot * zeta).real
        pts.append(z)
        progs.append(prog)
        if err > 0:
            h = min(h * min(2.0, 0.9 * (tol / err) ** (1.0 / 3.0)), h_max)
        else:
            h = min(2.0 * h, h_max)
    return pts, progs, OPEN, -1, s
