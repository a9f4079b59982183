"""Finite-N Monte Carlo checks of the model identities and limit predictions.

Randomness
----------
Every random stream is ``numpy.random.default_rng(replica_seed(seed, i))``
where ``replica_seed`` is the ``i``-th output of a SplitMix64 generator
started at ``seed``::

    z = (seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    return z ^ (z >> 31)

Replicas (Hamiltonian draws, ascent restarts, sample chunks) are indexed,
and results are aggregated in index order, so outputs do not depend on the
number of worker threads.

Tensor layout
-------------
A sample stores one i.i.d. standard normal coefficient per tuple of the
canonical axis layout: ``p(s)`` consecutive axes of length ``N_s`` for each
species in declaration order. Summing the Hamiltonian over every ordered
position pattern of ``I(p)`` with independent coefficients is equal in law
to this canonical sum with the coefficients scaled by ``sqrt(K)``,
``K = |p|! / prod p(s)!`` (the number of patterns), so the effective
prefactor is ``C_{N,p} sqrt(K)``.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelError
from .model import ModelSpec, xi_eval

MAX_TENSOR_ENTRIES = 10**8
MAX_BATCH_ENTRIES = 10**7
_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer applied to a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replica_seed(seed: int, index: int) -> int:
    """Seed of replica ``index`` derived from a master ``seed``."""
    return splitmix64((seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64)


def replica_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(replica_seed(seed, index))


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def split_sizes(model: ModelSpec, n_total: int) -> tuple[int, ...]:
    """Per-species block sizes ``~ lam * n_total`` summing to ``n_total``."""
    raw = np.asarray(model.lam) * n_total
    sizes = np.floor(raw).astype(int)
    for i in np.argsort(-(raw - sizes), kind="stable")[: n_total - sizes.sum()]:
        sizes[i] += 1
    return tuple(int(v) for v in sizes)


@dataclass(frozen=True)
class HamiltonianSample:
    model: ModelSpec
    n_per_species: tuple
    coefficients: np.ndarray
    normalization: float
    seed: int

    @property
    def axis_species(self) -> tuple:
        return tuple(s for s, ps in enumerate(self.model.p) for _ in range(ps))

    @property
    def n_total(self) -> int:
        return sum(self.n_per_species)

    @property
    def multiplicity(self) -> int:
        return math.factorial(self.model.total_degree) // math.prod(
            math.factorial(ps) for ps in self.model.p
        )

    @property
    def scale(self) -> float:
        return self.normalization * math.sqrt(self.multiplicity)


def normalization_sq(model: ModelSpec, n_per_species) -> float:
    """``C_{N,p}^2 = N / prod N_s^p(s) * prod p(s)! / |p|!``."""
    n = sum(n_per_species)
    denom = math.prod(ns**ps for ns, ps in zip(n_per_species, model.p))
    fact = math.prod(math.factorial(ps) for ps in model.p) / math.factorial(model.total_degree)
    return n / denom * fact


def _check_sizes(model: ModelSpec, n_per_species) -> tuple:
    sizes = tuple(int(v) for v in n_per_species)
    if len(sizes) != model.n_species:
        raise ModelError(f"expected {model.n_species} block sizes, got {len(sizes)}")
    if any(v < 2 for v in sizes):
        raise DomainError(f"every block needs at least 2 coordinates, got {sizes}")
    entries = math.prod(ns**ps for ns, ps in zip(sizes, model.p))
    if entries > MAX_TENSOR_ENTRIES:
        raise DomainError(
            f"coefficient tensor would have {entries} entries (limit {MAX_TENSOR_ENTRIES})"
        )
    return sizes


def sample_hamiltonian(model: ModelSpec, n_per_species, seed: int) -> HamiltonianSample:
    sizes = _check_sizes(model, n_per_species)
    shape = tuple(sizes[s] for s, ps in enumerate(model.p) for _ in range(ps))
    coeffs = np.random.default_rng(seed).standard_normal(shape)
    return HamiltonianSample(
        model=model,
        n_per_species=sizes,
        coefficients=coeffs,
        normalization=math.sqrt(normalization_sq(model, sizes)),
        seed=seed,
    )


def _check_config(h: HamiltonianSample, sigma) -> list:
    if len(sigma) != len(h.n_per_species):
        raise DomainError(f"configuration has {len(sigma)} blocks, expected {len(h.n_per_species)}")
    blocks = [np.asarray(b, dtype=float) for b in sigma]
    for b, ns in zip(blocks, h.n_per_species):
        if b.shape[-1] != ns:
            raise DomainError(f"block of length {b.shape[-1]} where {ns} was expected")
    return blocks


def eval_hamiltonian(h: HamiltonianSample, sigma) -> float:
    """``H(sigma)`` by successive tensor-vector contractions."""
    blocks = _check_config(h, sigma)
    t = h.coefficients
    for s in reversed(h.axis_species):
        t = t @ blocks[s]
    return float(h.scale * t)


def eval_hamiltonian_batch(h: HamiltonianSample, sigmas) -> np.ndarray:
    """``H`` at a batch; ``sigmas[s]`` has shape ``(B, N_s)``."""
    blocks = _check_config(h, sigmas)
    axes = h.axis_species
    t = np.tensordot(h.coefficients, blocks[axes[-1]], axes=([-1], [1]))
    for s in reversed(axes[:-1]):
        t = np.einsum("...ib,bi->...b", t, blocks[s])
    return h.scale * t


def retract(blocks) -> list:
    """Rescale every block ``b`` to norm ``sqrt(len(b))``."""
    return [b * math.sqrt(b.shape[-1]) / np.linalg.norm(b, axis=-1, keepdims=True) for b in blocks]


def random_configuration(n_per_species, rng: np.random.Generator, batch: int | None = None) -> list:
    """Uniform point on the product of spheres (or ``batch`` of them)."""
    shape = (lambda ns: (ns,)) if batch is None else (lambda ns: (batch, ns))
    return retract([rng.standard_normal(shape(ns)) for ns in n_per_species])


def overlap(sigma1, sigma2) -> np.ndarray:
    """Per-species overlap ``R_s = <sigma1_s, sigma2_s> / N_s``."""
    if len(sigma1) != len(sigma2):
        raise DomainError("configurations have different numbers of blocks")
    out = []
    for a, b in zip(sigma1, sigma2):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if a.shape != b.shape:
            raise DomainError(f"block shapes differ: {a.shape} vs {b.shape}")
        out.append(float(a @ b) / a.shape[0])
    return np.array(out)


def _features(h_axes, blocks) -> np.ndarray:
    f = np.asarray(blocks[h_axes[0]], dtype=float)
    for s in h_axes[1:]:
        f = np.multiply.outer(f, blocks[s]).ravel()
    return f


# ---------------------------------------------------------------------------
# covariance identity


@dataclass(frozen=True)
class CovariancePair:
    overlap: np.ndarray
    target: float
    mean: float
    stderr: float
    z: float


@dataclass(frozen=True)
class CovarianceReport:
    pairs: list
    trials: int
    max_abs_z: float
    threshold: float = 5.0

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold


def _partner(sigma, rng, rho, orthogonal_block=None) -> list:
    out = []
    for s, b in enumerate(sigma):
        g = rng.standard_normal(b.shape)
        g -= (g @ b) / (b @ b) * b
        g *= math.sqrt(b.shape[0]) / np.linalg.norm(g)
        r = 0.0 if s == orthogonal_block else rho[s]
        out.append(r * b + math.sqrt(1.0 - r * r) * g)
    return out


def configuration_pairs(model: ModelSpec, n_per_species, pairs: int, seed: int) -> list:
    """Test pairs: ``(sigma, sigma)``, one with block 0 orthogonal, then correlated pairs."""
    rng = replica_rng(seed, 0)
    out = []
    for k in range(pairs):
        sigma = random_configuration(n_per_species, rng)
        if k == 0:
            out.append((sigma, [b.copy() for b in sigma]))
        else:
            rho = rng.uniform(-1.0, 1.0, size=model.n_species)
            out.append((sigma, _partner(sigma, rng, rho, 0 if k == 1 else None)))
    return out


def covariance_check(
    model: ModelSpec, n_per_species, trials: int, pairs: int, seed: int, workers: int = 1
) -> CovarianceReport:
    """Compare ``mean H(sigma) H(sigma') / N`` over draws with ``xi(R)``.

    Draw ``i`` uses seed ``replica_seed(seed, i + 1)``; configuration pairs
    use replica 0.
    """
    if trials < 100:
        raise DomainError(f"covariance check needs trials >= 100, got {trials}")
    sizes = _check_sizes(model, n_per_species)
    n = sum(sizes)
    cfg = configuration_pairs(model, sizes, pairs, seed)
    axes = tuple(s for s, ps in enumerate(model.p) for _ in range(ps))
    left = np.stack([_features(axes, a) for a, _ in cfg])
    right = np.stack([_features(axes, b) for _, b in cfg])

    def draw(i):
        h = sample_hamiltonian(model, sizes, replica_seed(seed, i + 1))
        j = h.coefficients.ravel()
        return h.scale**2 * (left @ j) * (right @ j) / n

    prods = np.array(_map(draw, range(trials), workers))
    rows = []
    for k, (a, b) in enumerate(cfg):
        r = np.array([float(x @ y) / x.shape[0] for x, y in zip(a, b)])
        target = xi_eval(model, r)
        mean = float(prods[:, k].mean())
        se = float(prods[:, k].std(ddof=1) / math.sqrt(trials))
        rows.append(CovariancePair(r, target, mean, se, (mean - target) / se))
    return CovarianceReport(rows, trials, max(abs(row.z) for row in rows))


# ---------------------------------------------------------------------------
# ground states


def top_singular_value_sq(m: np.ndarray, rtol: float = 1e-10, maxiter: int = 100_000, rng=None) -> float:
    """Largest eigenvalue of ``M^T M`` by power iteration on the smaller Gram side."""
    if m.shape[0] < m.shape[1]:
        m = m.T
    rng = rng or np.random.default_rng(0)
    v = rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    nu = 0.0
    for _ in range(maxiter):
        w = m.T @ (m @ v)
        nu_new = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(nu_new - nu) <= rtol * nu_new:
            return nu_new
        nu = nu_new
    return nu


def wishart_ground_state(n_total: int, lambda_s: float, seed: int) -> float:
    """``sqrt(nu_max(M^T M) / n)`` for an ``floor(lam n) x (n - floor(lam n))`` Gaussian ``M``."""
    if n_total < 50:
        raise DomainError(f"wishart ground state needs n_total >= 50, got {n_total}")
    ns = int(math.floor(lambda_s * n_total))
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((ns, n_total - ns))
    return math.sqrt(top_singular_value_sq(m, rng=rng) / n_total)


def _symmetrized(h: HamiltonianSample) -> np.ndarray:
    t = h.coefficients
    start = 0
    for ps in h.model.p:
        if ps > 1:
            axes = list(range(t.ndim))
            perms = list(itertools.permutations(range(start, start + ps)))
            acc = np.zeros_like(t)
            for perm in perms:
                order = axes[:start] + list(perm) + axes[start + ps :]
                acc += np.transpose(t, order)
            t = acc / len(perms)
        start += ps
    return t


def _contract_except(t: np.ndarray, axis_species, blocks, keep: int) -> np.ndarray:
    for a in range(len(axis_species) - 1, keep, -1):
        t = t @ blocks[axis_species[a]]
    for a in range(keep):
        t = np.tensordot(blocks[axis_species[a]], t, axes=([0], [0]))
    return t


class _Ascent:
    def __init__(self, h: HamiltonianSample):
        self.h = h
        self.sym = _symmetrized(h)
        self.axes = h.axis_species
        self.first_axis = [self.axes.index(s) for s in range(h.model.n_species)]

    def energy(self, blocks) -> float:
        t = self.sym
        for s in reversed(self.axes):
            t = t @ blocks[s]
        return float(self.h.scale * t)

    def gradient(self, blocks) -> list:
        out = []
        for s, ps in enumerate(self.h.model.p):
            g = _contract_except(self.sym, self.axes, blocks, self.first_axis[s])
            out.append(self.h.scale * ps * g)
        return out

    def run(self, blocks, step0=0.1, rtol=1e-10, maxiter=10_000) -> float:
        e = self.energy(blocks)
        for _ in range(maxiter):
            grad = self.gradient(blocks)
            rgrad = [g - (g @ b) / (b @ b) * b for g, b in zip(grad, blocks)]
            step = step0
            while step > 1e-12:
                trial = retract([b + step * r for b, r in zip(blocks, rgrad)])
                e_new = self.energy(trial)
                if e_new > e:
                    break
                step *= 0.5
            else:
                break
            gain = e_new - e
            blocks, e = trial, e_new
            if gain < rtol * abs(e):
                break
        return e


def gradient_ascent_ground_state(
    model: ModelSpec,
    n_per_species,
    restarts: int,
    seed: int,
    workers: int = 1,
    hamiltonian: HamiltonianSample | None = None,
) -> float:
    """Best ``H/N`` over projected gradient-ascent runs on the product of spheres.

    The Hamiltonian is drawn with ``replica_seed(seed, 0)`` unless given;
    restart ``r`` starts from a uniform point drawn with replica ``r + 1``.
    A lower-bound heuristic for the finite-N ground-state energy.
    """
    if restarts < 1:
        raise DomainError(f"restarts must be >= 1, got {restarts}")
    h = hamiltonian or sample_hamiltonian(model, n_per_species, replica_seed(seed, 0))
    ascent = _Ascent(h)

    def one(r):
        start = random_configuration(h.n_per_species, replica_rng(seed, r + 1))
        return ascent.run(start)

    energies = _map(one, range(restarts), workers)
    return max(energies) / h.n_total


# ---------------------------------------------------------------------------
# free energy smoke test


def _beta_c(model: ModelSpec) -> float:
    if model.is_bipartite:
        from .bipartite import BipartiteModel, bipartite_critical

        return bipartite_critical(BipartiteModel.from_model(model))[0]
    from .critical import solve_critical

    return solve_critical(model).beta_c


def small_beta_free_energy(
    model: ModelSpec,
    n_per_species,
    beta: float,
    samples: int,
    seed: int,
    chunk: int = 10_000,
    return_stderr: bool = False,
):
    """``(1/N) log mean exp(beta H(sigma_i))`` over uniform ``sigma_i``, one disorder draw.

    The Hamiltonian uses replica 0 and sample chunk ``c`` uses replica
    ``c + 1``; chunks shrink for large tensors so that the batched
    intermediate stays near ``MAX_BATCH_ENTRIES``. With ``return_stderr`` a delta-method standard error is also
    returned.
    """
    if beta < 0.0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    if beta > 0.5 * _beta_c(model):
        raise DomainError("small_beta_free_energy needs beta <= beta_c / 2")
    sizes = _check_sizes(model, n_per_species)
    n = sum(sizes)
    if beta == 0.0:
        return (0.0, 0.0) if return_stderr else 0.0
    h = sample_hamiltonian(model, sizes, replica_seed(seed, 0))
    # keep the first batched contraction near 1e7 entries
    per_sample = h.coefficients.size // sizes[h.axis_species[-1]]
    chunk = max(1, min(chunk, MAX_BATCH_ENTRIES // per_sample))
    values = []
    for c, start in enumerate(range(0, samples, chunk)):
        b = min(chunk, samples - start)
        sig = random_configuration(sizes, replica_rng(seed, c + 1), batch=b)
        values.append(beta * eval_hamiltonian_batch(h, sig))
    x = np.concatenate(values)
    top = x.max()
    w = np.exp(x - top)
    est = (top + math.log(w.mean())) / n
    if not return_stderr:
        return est
    se = float(w.std(ddof=1) / (w.mean() * math.sqrt(len(w)))) / n
    return est, se
