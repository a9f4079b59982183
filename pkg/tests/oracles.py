"""Independent reference computations used by the tests.

None of these call the package's solver paths; they work directly from the
defining equations with generic numerics (grids, bisection, finite
differences, symbolic expansion).
"""
import itertools
import math

import numpy as np
from scipy import optimize


def xi(p, x):
    return float(np.prod(np.asarray(x, float) ** np.asarray(p, float)))


def fd_hessian(p, x, h=1e-5):
    x = np.asarray(x, float)
    n = len(x)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            ei, ej = np.eye(n)[i] * h, np.eye(n)[j] * h
            out[i, j] = (
                xi(p, x + ei + ej) - xi(p, x + ei - ej) - xi(p, x - ei + ej) + xi(p, x - ei - ej)
            ) / (4 * h * h)
    return out


def phi(lam, p, q):
    lam, p, q = (np.asarray(v, float) for v in (lam, p, q))
    with np.errstate(invalid="ignore", divide="ignore"):
        V = -np.sum(lam * np.log(1 - q))
    U = 1 + np.sum((1 - q) * p / q)
    return V / U


def qc_system(lam, p, q):
    """Residual vector of (lam/p) q^2/(1-q) - Phi(q)."""
    lam, p, q = (np.asarray(v, float) for v in (lam, p, q))
    return lam / p * q**2 / (1 - q) - phi(lam, p, q)


def qc_log_system(lam, p, q):
    """log f_s(q_s) - log Phi(q); stays finite as q -> 0, unlike the plain difference."""
    lam, p, q = (np.asarray(v, float) for v in (lam, p, q))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.log(lam / p * q**2 / (1 - q)) - np.log(phi(lam, p, q))


def qc_by_grid_newton(lam, p, grid=60, starts=20):
    """Critical overlap by multi-start Newton from the best grid points.

    The system is asymptotically satisfied near q = 0, so only converged
    roots with every entry above 1e-3 are kept; all of them must agree.
    """
    n = len(lam)
    pts = np.linspace(0.02, 0.98, grid)
    scored = sorted(
        (float(np.sum(qc_log_system(lam, p, q) ** 2)), q) for q in itertools.product(pts, repeat=n)
    )
    roots = []
    for _, q0 in scored[:starts]:
        sol = optimize.root(lambda q: qc_log_system(lam, p, q), np.array(q0), method="hybr", tol=1e-15)
        q = sol.x
        if np.all(q > 1e-3) and np.all(q < 1) and np.max(np.abs(qc_log_system(lam, p, q))) < 1e-12:
            roots.append(q)
    if not roots:
        raise RuntimeError("no interior root found")
    for q in roots:
        assert np.allclose(q, roots[0], rtol=1e-8), (q, roots[0])
    return roots[0]


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def g_direct(lam, p, z):
    """g(z) with q_z from bisection on f_s(x) = z."""
    total = z
    for l, ps in zip(lam, p):
        x = bisect(lambda x: l / ps * x * x / (1 - x) - z, 0.0, 1.0 - 1e-16)
        total += l * x + l * math.log(1 - x)
    return total


def sign_changes_on_grid(f, ys):
    vals = np.array([f(y) for y in ys])
    return np.nonzero(np.diff(np.sign(vals)) != 0)[0]


def xi_q_coefficients_sympy(p, q):
    """Monomial coefficients of xi((1-q)x+q) - xi(q) - sum (1-q) dxi(q) x by expansion."""
    import sympy as sp

    xs = sp.symbols(f"x0:{len(p)}")
    qs = [sp.nsimplify(v) for v in q]
    expr = sp.Integer(1)
    for xv, qv, ps in zip(xs, qs, p):
        expr *= ((1 - qv) * xv + qv) ** ps
    xi_q = sp.Integer(1)
    for qv, ps in zip(qs, p):
        xi_q *= qv**ps
    lin = 0
    for s, (xv, qv, ps) in enumerate(zip(xs, qs, p)):
        d = sp.Integer(ps)
        for t, (qt, pt) in enumerate(zip(qs, p)):
            d *= qt ** (pt - 1 if t == s else pt)
        lin += (1 - qv) * d * xv
    poly = sp.Poly(sp.expand(expr - xi_q - lin), *xs)
    return {tuple(k): float(c) for k, c in poly.terms() if c != 0}
