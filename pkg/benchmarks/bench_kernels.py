"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--models 200] [--betas 2000] [--repeat 3]

Times solve_critical over random models and a dense supercritical beta
sweep, once per available backend, and checks both give the same numbers.
"""
import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

from msglass import kernels
from msglass.critical import solve_critical
from msglass.model import ModelSpec
from msglass.supercritical import free_energy_at

NAMES = ("f_inverse", "g_eval", "brent_root_g", "upsilon_eval", "y0_root", "upsilon_upper_root")


@contextmanager
def use_backend(module):
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, getattr(module, n))
    try:
        yield
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def random_models(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.integers(2, 5))
        p = rng.integers(1, 5, size=k)
        if not 3 <= p.sum() <= 8:
            continue
        lam = rng.dirichlet(np.ones(k))
        lam[-1] = 1.0 - lam[:-1].sum()
        out.append(ModelSpec(tuple(lam), tuple(int(v) for v in p)))
    return out


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=200)
    ap.add_argument("--betas", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    models = random_models(args.models)
    sweep_model = ModelSpec((2 / 3, 1 / 3), (2, 1))
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled core not built; timing the Python backend only", file=sys.stderr)

    rows, results = [], {}
    for name, module in backends.items():
        with use_backend(module):
            t_crit, crit = best_of(lambda: [solve_critical(m).beta_c for m in models], args.repeat)
            cp = solve_critical(sweep_model)
            betas = np.linspace(cp.beta_c * 1.001, 10 * cp.beta_c, args.betas)
            t_sweep, sweep = best_of(lambda: [free_energy_at(sweep_model, cp, b) for b in betas], args.repeat)
        results[name] = (np.array(crit), np.array(sweep))
        rows.append((name, t_crit, t_sweep))

    print(f"{'backend':<8} {'solve_critical x' + str(args.models):>22} {'sweep x' + str(args.betas):>14}")
    for name, t_crit, t_sweep in rows:
        print(f"{name:<8} {t_crit * 1e3:>19.2f} ms {t_sweep * 1e3:>11.2f} ms")
    if len(rows) == 2:
        (_, c0, s0), (_, c1, s1) = rows
        print(f"speedup  {c0 / c1:>19.1f} x  {s0 / s1:>11.1f} x  (python / cython)")
        a, b = results["python"], results["cython"]
        diff = max(np.max(np.abs(a[0] - b[0]) / a[0]), np.max(np.abs(a[1] - b[1]) / a[1]))
        print(f"max relative difference between backends: {diff:.1e}")


if __name__ == "__main__":
    main()
