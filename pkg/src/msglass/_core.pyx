# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; see ``_pycore`` for the reference twin."""
from libc.math cimport sqrt, log, log1p, pow, fabs, NAN

cdef double EPS = 2.220446049250313e-16


def f_inverse(double a, double z):
    cdef double c, r
    if z == 0.0:
        return 0.0, 1.0
    c = z / a
    r = c + sqrt(c * c + 4.0 * c)
    return 2.0 * c / r, 4.0 * c / (r * r)


cdef inline double _log_one_minus(double c, double r, double x) nogil:
    if x < 0.5:
        return log1p(-x)
    return log(4.0 * c) - 2.0 * log(r)


cdef double _g(const double[::1] a, const double[::1] lam, double z) nogil:
    cdef Py_ssize_t t
    cdef double g = z, c, r, x
    for t in range(a.shape[0]):
        c = z / a[t]
        r = c + sqrt(c * c + 4.0 * c)
        x = 2.0 * c / r
        g += lam[t] * (x + _log_one_minus(c, r, x))
    return g


def g_eval(const double[::1] a, const double[::1] lam, const double[::1] p, double z):
    cdef Py_ssize_t t
    cdef double g = z, dg = 1.0, c, r, x
    for t in range(a.shape[0]):
        if z == 0.0:
            dg -= 0.5 * p[t]
            continue
        c = z / a[t]
        r = c + sqrt(c * c + 4.0 * c)
        x = 2.0 * c / r
        g += lam[t] * (x + _log_one_minus(c, r, x))
        dg -= p[t] * (1.0 - x) / (2.0 - x)
    return g, dg


def brent_root_g(const double[::1] a, const double[::1] lam, const double[::1] p,
                 double lo, double hi, double rtol, int maxiter):
    cdef double xa = lo, xb = hi, xc, fa, fb, fc, d, e, tol, m, s, pp, qq, r
    cdef int it
    fa = _g(a, lam, xa)
    fb = _g(a, lam, xb)
    if fa * fb > 0.0:
        return NAN, NAN, -1
    xc = xa
    fc = fa
    d = xb - xa
    e = d
    for it in range(1, maxiter + 1):
        if fb * fc > 0.0:
            xc = xa
            fc = fa
            d = xb - xa
            e = d
        if fabs(fc) < fabs(fb):
            xa = xb; xb = xc; xc = xa
            fa = fb; fb = fc; fc = fa
        tol = 2.0 * EPS * fabs(xb) + 0.5 * rtol * fabs(xb)
        m = 0.5 * (xc - xb)
        if fabs(m) <= tol or fb == 0.0:
            return xb, fb, it
        if fabs(e) >= tol and fabs(fa) > fabs(fb):
            s = fb / fa
            if xa == xc:
                pp = 2.0 * m * s
                qq = 1.0 - s
            else:
                qq = fa / fc
                r = fb / fc
                pp = s * (2.0 * m * qq * (qq - r) - (xb - xa) * (r - 1.0))
                qq = (qq - 1.0) * (r - 1.0) * (s - 1.0)
            if pp > 0.0:
                qq = -qq
            else:
                pp = -pp
            if 2.0 * pp < min(3.0 * m * qq - fabs(tol * qq), fabs(e * qq)):
                e = d
                d = pp / qq
            else:
                d = m
                e = m
        else:
            d = m
            e = m
        xa = xb
        fa = fb
        if fabs(d) > tol:
            xb += d
        elif m > 0.0:
            xb += tol
        else:
            xb -= tol
        fb = _g(a, lam, xb)
    return xb, fb, maxiter


cdef double _upsilon(const double[::1] p, const double[::1] gamma, double y) nogil:
    cdef Py_ssize_t s
    cdef double val = y * y
    for s in range(p.shape[0]):
        val *= pow(gamma[s] / y + 1.0, p[s])
    return val


def upsilon_eval(const double[::1] p, const double[::1] gamma, double y):
    cdef Py_ssize_t s
    cdef double val = y * y, slope = 2.0
    for s in range(p.shape[0]):
        val *= pow(gamma[s] / y + 1.0, p[s])
        slope -= p[s] * gamma[s] / (gamma[s] + y)
    return val, val / y * slope


cdef double _y0_excess(const double[::1] p, const double[::1] gamma, double y) nogil:
    cdef Py_ssize_t s
    cdef double h = -2.0
    for s in range(p.shape[0]):
        h += p[s] * gamma[s] / (gamma[s] + y)
    return h


def y0_root(const double[::1] p, const double[::1] gamma, int maxiter):
    cdef Py_ssize_t s
    cdef double total = 0.0, lo = 0.0, hi = 0.0, mid
    cdef int i
    for s in range(p.shape[0]):
        total += p[s]
        if gamma[s] > hi:
            hi = gamma[s]
    if total <= 2.0:
        return 0.0
    while _y0_excess(p, gamma, hi) > 0.0:
        lo = hi
        hi *= 2.0
    for i in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _y0_excess(p, gamma, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def upsilon_upper_root(const double[::1] p, const double[::1] gamma,
                       double target, double lo, int maxiter):
    cdef double hi = 2.0 * lo, mid
    cdef int n = 0, i
    if hi < 1.0:
        hi = 1.0
    while _upsilon(p, gamma, hi) <= target:
        lo = hi
        hi *= 2.0
        n += 1
        if n > 1100:
            return NAN
    for i in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _upsilon(p, gamma, mid) <= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
