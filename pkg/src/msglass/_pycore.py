"""Pure-Python scalar kernels; reference twin of the compiled ``_core``.

Every function here has an identically named, identically behaving
counterpart in ``_core.pyx``. Arrays arrive as contiguous float64 buffers.
"""
import math

EPS = 2.220446049250313e-16


def f_inverse(a, z):
    """Root ``x`` of ``a x^2/(1-x) = z``; returns ``(x, 1-x)``."""
    if z == 0.0:
        return 0.0, 1.0
    c = z / a
    r = c + math.sqrt(c * c + 4.0 * c)
    return 2.0 * c / r, 4.0 * c / (r * r)


def _log_one_minus(c, r, x):
    # 1 - x = 4c / r^2; the log form avoids cancellation as x -> 1
    if x < 0.5:
        return math.log1p(-x)
    return math.log(4.0 * c) - 2.0 * math.log(r)


def g_eval(a, lam, p, z):
    a = a.tolist() if hasattr(a, "tolist") else a
    lam = lam.tolist() if hasattr(lam, "tolist") else lam
    p = p.tolist() if hasattr(p, "tolist") else p
    g = z
    dg = 1.0
    for at, lt, pt in zip(a, lam, p):
        if z == 0.0:
            dg -= 0.5 * pt
            continue
        c = z / at
        r = c + math.sqrt(c * c + 4.0 * c)
        x = 2.0 * c / r
        g += lt * (x + _log_one_minus(c, r, x))
        dg -= pt * (1.0 - x) / (2.0 - x)
    return g, dg


def _g(a, lam, p, z):
    g = z
    for at, lt in zip(a, lam):
        c = z / at
        r = c + math.sqrt(c * c + 4.0 * c)
        x = 2.0 * c / r
        g += lt * (x + _log_one_minus(c, r, x))
    return g


def brent_root_g(a, lam, p, lo, hi, rtol, maxiter):
    """Brent's zeroin for ``g`` on a sign-changing bracket ``[lo, hi]``.

    Returns ``(z, g(z), iterations)``.
    """
    a = a.tolist() if hasattr(a, "tolist") else a
    lam = lam.tolist() if hasattr(lam, "tolist") else lam
    xa, xb = lo, hi
    fa, fb = _g(a, lam, p, xa), _g(a, lam, p, xb)
    if fa * fb > 0.0:
        return math.nan, math.nan, -1
    xc, fc = xa, fa
    d = e = xb - xa
    for it in range(1, maxiter + 1):
        if fb * fc > 0.0:
            xc, fc = xa, fa
            d = e = xb - xa
        if abs(fc) < abs(fb):
            xa, xb, xc = xb, xc, xb
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * EPS * abs(xb) + 0.5 * rtol * abs(xb)
        m = 0.5 * (xc - xb)
        if abs(m) <= tol or fb == 0.0:
            return xb, fb, it
        if abs(e) >= tol and abs(fa) > abs(fb):
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
            if 2.0 * pp < min(3.0 * m * qq - abs(tol * qq), abs(e * qq)):
                e = d
                d = pp / qq
            else:
                d = m
                e = m
        else:
            d = m
            e = m
        xa, fa = xb, fb
        if abs(d) > tol:
            xb += d
        else:
            xb += tol if m > 0.0 else -tol
        fb = _g(a, lam, p, xb)
    return xb, fb, maxiter


def upsilon_eval(p, gamma, y):
    """``(Upsilon(y), Upsilon'(y))`` for ``y > 0``."""
    p = p.tolist() if hasattr(p, "tolist") else p
    gamma = gamma.tolist() if hasattr(gamma, "tolist") else gamma
    val = y * y
    slope = 2.0
    for ps, gs in zip(p, gamma):
        val *= (gs / y + 1.0) ** ps
        slope -= ps * gs / (gs + y)
    return val, val / y * slope


def _y0_excess(p, gamma, y):
    h = -2.0
    for ps, gs in zip(p, gamma):
        h += ps * gs / (gs + y)
    return h


def y0_root(p, gamma, maxiter):
    """Unique ``y > 0`` with ``sum p*gamma/(gamma+y) = 2``, by bisection.

    Returns 0.0 when ``|p| <= 2`` (no interior turning point).
    """
    p = p.tolist() if hasattr(p, "tolist") else p
    gamma = gamma.tolist() if hasattr(gamma, "tolist") else gamma
    if sum(p) <= 2.0:
        return 0.0
    lo = 0.0
    hi = max(gamma)
    while _y0_excess(p, gamma, hi) > 0.0:
        lo = hi
        hi *= 2.0
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _y0_excess(p, gamma, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _upsilon(p, gamma, y):
    val = y * y
    for ps, gs in zip(p, gamma):
        val *= (gs / y + 1.0) ** ps
    return val


def upsilon_upper_root(p, gamma, target, lo, maxiter):
    """Root of ``Upsilon(y) = target`` on ``[lo, inf)`` where Upsilon increases.

    ``lo`` must satisfy ``Upsilon(lo) <= target``. Returns ``nan`` if the
    doubling search for an upper bracket overflows.
    """
    p = p.tolist() if hasattr(p, "tolist") else p
    gamma = gamma.tolist() if hasattr(gamma, "tolist") else gamma
    hi = max(2.0 * lo, 1.0)
    n = 0
    while _upsilon(p, gamma, hi) <= target:
        lo = hi
        hi *= 2.0
        n += 1
        if n > 1100:
            return math.nan
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _upsilon(p, gamma, mid) <= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
