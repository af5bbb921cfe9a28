# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory tracing kernel.

Same algorithm and same floating-point operation order as ``_trace_py``; see
that module for the description.
"""
from libc.math cimport sqrt, fabs, atan2, round as c_round, fmod, pow, M_PI, INFINITY as C_INF

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)

cdef double[5] GL5_X = [0.04691007703066800, 0.23076534494715845, 0.5,
                        0.76923465505284155, 0.95308992296933200]
cdef double[5] GL5_W = [0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                        0.23931433524968324, 0.11846344252809454]
cdef double[8] GL8_X = [0.98014492824876812, 0.89833323870681337, 0.76276620495816450,
                        0.59171732124782495, 0.40828267875217505, 0.23723379504183550,
                        0.10166676129318663, 0.01985507175123188]
cdef double[8] GL8_W = [0.05061426814518813, 0.11119051722668724, 0.15685332293894364,
                        0.18134189168918100, 0.18134189168918100, 0.15685332293894364,
                        0.11119051722668724, 0.05061426814518813]

DEF MAXF = 8
DEF MAXZ = 8

cdef int OPEN = 0
cdef int ZERO = 1
cdef int INF_END = 2
cdef int UNDERFLOW = -1


cdef inline double cabs_(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double complex conj_(double complex z) nogil:
    return z.real - 1j * z.imag


cdef inline double complex peval(double complex z, double complex* f, int n) nogil:
    cdef double complex v = 1.0
    cdef int i = 0
    while i + 1 < n:
        v = v * ((z - f[i]) * (z - f[i + 1]))
        i += 2
    if i < n:
        v = v * (z - f[i])
    return v


cdef inline double complex branch(double complex z, double complex ref,
                                  double complex* f, int n) nogil:
    cdef double complex w = csqrt(peval(z, f, n))
    if (w * conj_(ref)).real < 0:
        w = -w
    return w


cdef inline double complex tangent(double complex w, double complex rot) nogil:
    return rot * conj_(w) / cabs_(w)


cdef double complex sing_int(double complex zj, double complex z, double complex w,
                             double complex* f, int n) nogil:
    cdef double complex D = z - zj
    cdef double complex total = 0.0
    cdef double complex ref = w
    cdef double complex v, t
    cdef double x
    cdef int i
    for i in range(8):
        x = GL8_X[i]
        t = zj + D * x * x
        v = csqrt(peval(t, f, n))
        if (v * conj_(ref)).real < 0:
            v = -v
        ref = v
        total = total + GL8_W[i] * v * (2.0 * x)
    return total * D


def singular_integral(zj, z, w, factors):
    """Integral of sqrt(p) from the zero ``zj`` to ``z`` (branch ``w`` at ``z``)."""
    cdef double complex f[MAXF]
    cdef int n = len(factors)
    cdef int i
    if n > MAXF:
        raise ValueError("too many factors")
    for i in range(n):
        f[i] = factors[i]
    return sing_int(zj, z, w, f, n)


def trace_kernel(factors, zeros, mults, leads, double complex z0, double complex w0,
                 double complex zeta0, double complex rot, double level, int launch,
                 double complex center, double dir_offset, params):
    cdef double h_max, k_zero, k_inf, rtol, check_radius, capture_tol, escape_radius
    cdef double lock_angle, budget, h_min, scale
    cdef int lock_steps, max_steps
    (h_max, k_zero, k_inf, rtol, check_radius, capture_tol, escape_radius,
     lock_angle, lock_steps, budget, max_steps, h_min, scale) = params

    cdef double complex f[MAXF]
    cdef double complex zs[MAXZ]
    cdef int ms[MAXZ]
    cdef double sqlead[MAXZ]
    cdef int missed[MAXZ]
    cdef int nf = len(factors)
    cdef int nz = len(zeros)
    cdef int i, j, r, k, step
    if nf > MAXF or nz > MAXZ:
        raise ValueError("too many zeros")
    for i in range(nf):
        f[i] = factors[i]
    for j in range(nz):
        zs[j] = zeros[j]
        ms[j] = mults[j]
        sqlead[j] = sqrt(cabs_(<double complex>leads[j]))
        missed[j] = 0

    cdef double complex crot = conj_(rot)
    cdef double complex z = z0, w = w0, zeta = zeta0
    cdef double prog = (crot * zeta).real
    cdef list pts = [z]
    cdef list progs = [prog]
    cdef double s = 0.0
    cdef bint left_launch = launch < 0
    cdef int lock_k = -1, lock_n = 0
    cdef double h = h_max
    cdef double third = M_PI / 3.0
    cdef double dz, dj, delta, dest, prog_j, rc, ang, dev, ell, tol, hcap, err
    cdef double complex zeta_j, u, k1, k2, k3, k4, z2, z3, zn, w2, w3, wn, dzc, acc, ref, v, zeta_n
    cdef bint outward

    for step in range(max_steps):
        dz = C_INF
        for j in range(nz):
            dj = cabs_(z - zs[j])
            if dj < dz:
                dz = dj
            if j == launch and not left_launch:
                if dj > 4.0 * check_radius:
                    left_launch = True
                continue
            if dj < check_radius:
                if missed[j]:
                    continue
                zeta_j = zeta - sing_int(zs[j], z, w, f, nf)
                delta = (crot * zeta_j).imag - level
                r = ms[j]
                dest = pow((r + 2) * fabs(delta) / (2.0 * sqlead[j]), 2.0 / (r + 2))
                prog_j = (crot * zeta_j).real
                if dest < capture_tol and prog_j > prog - 1e-12 * (1.0 + fabs(prog)):
                    pts.append(zs[j])
                    progs.append(max(prog_j, prog + 1e-300))
                    s += dj
                    return pts, progs, ZERO, j, s
                missed[j] = 1
            elif dj > 2.0 * check_radius:
                missed[j] = 0
        rc = cabs_(z - center)
        if rc > escape_radius:
            ang = atan2((z - center).imag, (z - center).real)
            k = (<int> c_round((ang - dir_offset) / third)) % 6
            if k < 0:
                k += 6
            dev = fmod(ang - dir_offset - k * third + M_PI, 2.0 * M_PI)
            if dev < 0:
                dev += 2.0 * M_PI
            dev -= M_PI
            u = tangent(w, rot)
            outward = (conj_(z - center) * u).real > 0
            if fabs(dev) < lock_angle and outward:
                if k == lock_k:
                    lock_n += 1
                else:
                    lock_k = k
                    lock_n = 1
                if lock_n >= lock_steps:
                    return pts, progs, INF_END, lock_k, s
            else:
                lock_n = 0
                lock_k = -1
        if s > budget:
            return pts, progs, OPEN, -1, s
        ell = min(dz, rc + scale)
        tol = rtol * ell
        hcap = min(h_max, min(k_zero * dz, k_inf * (rc + scale)))
        if h > hcap:
            h = hcap
        while True:
            if h < h_min:
                return pts, progs, UNDERFLOW, -1, s
            k1 = tangent(w, rot)
            z2 = z + 0.5 * h * k1
            w2 = branch(z2, w, f, nf)
            k2 = tangent(w2, rot)
            z3 = z + 0.75 * h * k2
            w3 = branch(z3, w, f, nf)
            k3 = tangent(w3, rot)
            zn = z + h * (2.0 / 9.0 * k1 + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3)
            wn = branch(zn, w3, f, nf)
            k4 = tangent(wn, rot)
            err = h * cabs_(-5.0 / 72.0 * k1 + 1.0 / 12.0 * k2 + 1.0 / 9.0 * k3 - 0.125 * k4)
            if err <= tol:
                break
            h *= max(0.2, 0.9 * pow(tol / err, 1.0 / 3.0))
        dzc = zn - z
        acc = 0.0
        ref = w
        for i in range(5):
            v = branch(z + GL5_X[i] * dzc, ref, f, nf)
            ref = v
            acc = acc + GL5_W[i] * v
        zeta_n = zeta + acc * dzc
        delta = (crot * zeta_n).imag - level
        zn = zn - 1j * delta * rot / wn
        zeta_n = zeta_n - 1j * delta * rot
        wn = branch(zn, wn, f, nf)
        s += cabs_(zn - z)
        z = zn
        w = wn
        zeta = zeta_n
        prog = (crot * zeta).real
        pts.append(z)
        progs.append(prog)
        if err > 0:
            h = min(h * min(2.0, 0.9 * pow(tol / err, 1.0 / 3.0)), h_max)
        else:
            h = min(2.0 * h, h_max)
    return pts, progs, OPEN, -1, s
