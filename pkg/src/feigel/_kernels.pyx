# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled nested adaptive quadrature of the polar vacuum integrand.

Same rule, panel layout and stopping test as ``_kernels_py``.
"""
from libc.math cimport exp, expm1, cos, sin, fabs
from libc.stdlib cimport malloc, free

from ._gk import GAUSS, KRONROD, NODES, RADIAL_BREAKS

NAME = "cython"

cdef double _NODES[21]
cdef double _KRON[21]
cdef double _GAUSS[21]
cdef int _i
for _i in range(21):
    _NODES[_i] = NODES[_i]
    _KRON[_i] = KRONROD[_i]
    _GAUSS[_i] = GAUSS[_i]

cdef double _PI = 3.14159265358979323846


cdef inline void _channels(double kap, double c4, double c2s2, double a,
                           double* yz, double* zy) noexcept nogil:
    cdef double x, one_minus, base, F
    if kap == 0.0:
        yz[0] = 0.0
        zy[0] = 0.0
        return
    x = 2.0 * kap * a
    one_minus = -expm1(-x)
    base = kap * kap * exp(-x) / one_minus
    F = x / one_minus
    yz[0] = base * (c4 - c2s2 * F)
    zy[0] = -base * (5.0 * c4 + 2.0 * c2s2 - (2.0 * c4 + c2s2) * F)


def polar_channels(double kap, double theta, double a):
    cdef double c = cos(theta), s = sin(theta), yz, zy
    _channels(kap, c * c * c * c, c * c * s * s, a, &yz, &zy)
    return yz, zy


cdef struct Panels:
    double* lo
    double* hi
    double* yz
    double* zy
    double* err
    int n
    int cap


cdef int _alloc(Panels* p, int cap) noexcept nogil:
    p.lo = <double*> malloc(cap * sizeof(double))
    p.hi = <double*> malloc(cap * sizeof(double))
    p.yz = <double*> malloc(cap * sizeof(double))
    p.zy = <double*> malloc(cap * sizeof(double))
    p.err = <double*> malloc(cap * sizeof(double))
    p.n = 0
    p.cap = cap
    if p.lo == NULL or p.hi == NULL or p.yz == NULL or p.zy == NULL or p.err == NULL:
        return -1
    return 0


cdef void _release(Panels* p) noexcept nogil:
    free(p.lo)
    free(p.hi)
    free(p.yz)
    free(p.zy)
    free(p.err)


cdef void _inner_panel(double lo, double hi, double c4, double c2s2, double a,
                       double* out) noexcept nogil:
    cdef double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo)
    cdef double kyz = 0.0, kzy = 0.0, gyz = 0.0, gzy = 0.0, yz, zy
    cdef int j
    for j in range(21):
        _channels(mid + half * _NODES[j], c4, c2s2, a, &yz, &zy)
        kyz += _KRON[j] * yz
        kzy += _KRON[j] * zy
        gyz += _GAUSS[j] * yz
        gzy += _GAUSS[j] * zy
    out[0] = half * kyz
    out[1] = half * kzy
    out[2] = fabs(half * kyz - half * gyz) + fabs(half * kzy - half * gzy)


cdef int _worst(Panels* p) noexcept nogil:
    cdef int i, w = 0
    for i in range(1, p.n):
        if p.err[i] > p.err[w]:
            w = i
    return w


cdef void _inner(double theta, double a, double* kbreaks, int nbreaks,
                 double rel_tol, double abs_tol, Panels* p, double* out) noexcept nogil:
    # out: yz, zy, err, n_panel_evals, converged
    cdef double c = cos(theta), s = sin(theta)
    cdef double c4 = c * c * c * c, c2s2 = c * c * s * s
    cdef double buf[3]
    cdef double tyz, tzy, terr, lo, hi, mid, tol
    cdef int i, w, n_eval
    p.n = 0
    for i in range(nbreaks - 1):
        _inner_panel(kbreaks[i], kbreaks[i + 1], c4, c2s2, a, buf)
        p.lo[p.n] = kbreaks[i]
        p.hi[p.n] = kbreaks[i + 1]
        p.yz[p.n] = buf[0]
        p.zy[p.n] = buf[1]
        p.err[p.n] = buf[2]
        p.n += 1
    n_eval = p.n
    while True:
        tyz = 0.0
        tzy = 0.0
        terr = 0.0
        for i in range(p.n):
            tyz += p.yz[i]
            tzy += p.zy[i]
            terr += p.err[i]
        tol = rel_tol * (fabs(tyz) + fabs(tzy))
        if tol < abs_tol:
            tol = abs_tol
        if terr <= tol or p.n >= p.cap:
            out[0] = tyz
            out[1] = tzy
            out[2] = terr
            out[3] = n_eval
            out[4] = 1.0 if terr <= tol else 0.0
            return
        w = _worst(p)
        lo = p.lo[w]
        hi = p.hi[w]
        mid = 0.5 * (lo + hi)
        _inner_panel(lo, mid, c4, c2s2, a, buf)
        p.hi[w] = mid
        p.yz[w] = buf[0]
        p.zy[w] = buf[1]
        p.err[w] = buf[2]
        _inner_panel(mid, hi, c4, c2s2, a, buf)
        p.lo[p.n] = mid
        p.hi[p.n] = hi
        p.yz[p.n] = buf[0]
        p.zy[p.n] = buf[1]
        p.err[p.n] = buf[2]
        p.n += 1
        n_eval += 2


cdef void _outer_panel(double lo, double hi, double a, double* kbreaks, int nbreaks,
                       double rel_tol, double abs_tol, Panels* scratch,
                       double* out, double* evals, int* ok) noexcept nogil:
    cdef double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo)
    cdef double kyz = 0.0, kzy = 0.0, gyz = 0.0, gzy = 0.0, kerr = 0.0
    cdef double r[5]
    cdef int j
    for j in range(21):
        _inner(mid + half * _NODES[j], a, kbreaks, nbreaks, rel_tol, abs_tol, scratch, r)
        kyz += _KRON[j] * r[0]
        kzy += _KRON[j] * r[1]
        gyz += _GAUSS[j] * r[0]
        gzy += _GAUSS[j] * r[1]
        kerr += _KRON[j] * r[2]
        evals[0] += 21.0 * r[3]
        if r[4] == 0.0:
            ok[0] = 0
    out[0] = half * kyz
    out[1] = half * kzy
    out[2] = fabs(half * kyz - half * gyz) + fabs(half * kzy - half * gzy) + half * kerr


def polar_integral(double a, double kappa_max, double rel_tol, double abs_tol, int max_sub):
    """Integrate both channels over theta in [0, pi/2], kappa in [0, kappa_max].

    Returns ``(I_yz, I_zy, err, n_evals, converged)`` without the overall
    material prefactor.
    """
    cdef Panels outer, scratch
    cdef double kbreaks[8]
    cdef int nbreaks = 0, i, w, ok = 1
    cdef double evals = 0.0, buf[3], tyz, tzy, terr, tol, lo, hi, mid
    cdef double inner_rel = 0.1 * rel_tol
    for b in RADIAL_BREAKS:
        if b / a < kappa_max:
            kbreaks[nbreaks] = b / a
            nbreaks += 1
    kbreaks[nbreaks] = kappa_max
    nbreaks += 1
    if _alloc(&outer, max_sub) != 0 or _alloc(&scratch, max_sub) != 0:
        _release(&outer)
        _release(&scratch)
        raise MemoryError()
    try:
        with nogil:
            _outer_panel(0.0, 0.5 * _PI, a, kbreaks, nbreaks, inner_rel, abs_tol,
                         &scratch, buf, &evals, &ok)
            outer.lo[0] = 0.0
            outer.hi[0] = 0.5 * _PI
            outer.yz[0] = buf[0]
            outer.zy[0] = buf[1]
            outer.err[0] = buf[2]
            outer.n = 1
            while True:
                tyz = 0.0
                tzy = 0.0
                terr = 0.0
                for i in range(outer.n):
                    tyz += outer.yz[i]
                    tzy += outer.zy[i]
                    terr += outer.err[i]
                tol = rel_tol * (fabs(tyz) + fabs(tzy))
                if tol < abs_tol:
                    tol = abs_tol
                if terr <= tol:
                    break
                if outer.n >= outer.cap:
                    ok = 0
                    break
                w = _worst(&outer)
                lo = outer.lo[w]
                hi = outer.hi[w]
                mid = 0.5 * (lo + hi)
                _outer_panel(lo, mid, a, kbreaks, nbreaks, inner_rel, abs_tol,
                             &scratch, buf, &evals, &ok)
                outer.hi[w] = mid
                outer.yz[w] = buf[0]
                outer.zy[w] = buf[1]
                outer.err[w] = buf[2]
                _outer_panel(mid, hi, a, kbreaks, nbreaks, inner_rel, abs_tol,
                             &scratch, buf, &evals, &ok)
                outer.lo[outer.n] = mid
                outer.hi[outer.n] = hi
                outer.yz[outer.n] = buf[0]
                outer.zy[outer.n] = buf[1]
                outer.err[outer.n] = buf[2]
                outer.n += 1
    finally:
        _release(&outer)
        _release(&scratch)
    return tyz, tzy, terr, int(evals), bool(ok)
