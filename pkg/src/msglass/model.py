"""Mixture-polynomial algebra for pure multi-species spherical p-spin models.

A pure model is described by per-species proportions ``lam`` and integer
degrees ``p``; its mixture polynomial is ``xi(x) = prod_s x[s] ** p[s]``.
Overlap vectors and evaluation points are plain 1-D float arrays indexed in
the species order of the :class:`ModelSpec`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModelError

LAMBDA_SUM_TOL = 1e-12
HESSIAN_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class ModelSpec:
    """Pure multi-species model ``xi(x) = prod x(s)^p(s)``.

    Parameters
    ----------
    lam : tuple of float
        Species proportions, each in (0, 1), summing to one.
    p : tuple of int
        Per-species degrees, each at least 1.
    species : tuple of str, optional
        Labels; defaults to ``s0, s1, ...``.
    """

    lam: tuple
    p: tuple
    species: tuple = field(default=())

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        p_in = tuple(self.p)
        if len(lam) != len(p_in):
            raise ModelError(f"lambda has {len(lam)} entries but p has {len(p_in)}")
        if len(lam) < 2:
            raise ModelError("at least two species are required")
        p = []
        for v in p_in:
            if isinstance(v, bool) or int(v) != v:
                raise ModelError(f"degree p={v!r} is not an integer")
            if int(v) < 1:
                raise ModelError(f"degree p={v!r} must be >= 1")
            p.append(int(v))
        for v in lam:
            if not 0.0 < v < 1.0:
                raise ModelError(f"lambda={v!r} must lie in (0, 1)")
        total = math.fsum(lam)
        if abs(total - 1.0) > LAMBDA_SUM_TOL:
            raise ModelError(f"lambda sums to {total!r}, expected 1")
        species = tuple(self.species) or tuple(f"s{i}" for i in range(len(lam)))
        if len(species) != len(lam):
            raise ModelError("number of labels does not match number of species")
        if len(set(species)) != len(species):
            raise ModelError("species labels must be unique")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "p", tuple(p))
        object.__setattr__(self, "species", tuple(str(s) for s in species))

    @property
    def n_species(self) -> int:
        return len(self.lam)

    @property
    def total_degree(self) -> int:
        return sum(self.p)

    @property
    def is_bipartite(self) -> bool:
        """True for the ``|p| = 2`` model, which needs the closed-form path."""
        return self.total_degree == 2

    @property
    def lam_array(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=float)

    @property
    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    def index(self, s) -> int:
        """Position of species ``s`` given either as label or integer index."""
        if isinstance(s, str):
            try:
                return self.species.index(s)
            except ValueError:
                raise ModelError(f"unknown species label {s!r}") from None
        i = int(s)
        if not 0 <= i < self.n_species:
            raise ModelError(f"species index {s} out of range")
        return i


def _as_point(model: ModelSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_species,):
        raise DomainError(
            f"expected a vector of length {model.n_species}, got shape {x.shape}"
        )
    return x


def xi_eval(model: ModelSpec, x) -> float:
    """Mixture ``prod_s x[s]**p[s]``."""
    x = _as_point(model, x)
    return float(np.prod(x ** model.p_array))


def grad_xi(model: ModelSpec, q) -> np.ndarray:
    """Gradient of the mixture, with ``xi(q)/q[s]`` taken by cancellation.

    Component ``s`` is ``p[s] * q[s]**(p[s]-1) * prod_{t != s} q[t]**p[t]``,
    so zero entries of ``q`` are allowed.
    """
    q = _as_point(model, q)
    out = np.empty_like(q)
    for s, ps in enumerate(model.p):
        others = np.delete(q ** model.p_array, s)
        out[s] = ps * q[s] ** (ps - 1) * np.prod(others)
    return out


def hessian(model: ModelSpec, x) -> np.ndarray:
    """Hessian ``xi(x) [v v^T - diag(p/x^2)]`` with ``v = p/x``."""
    x = _as_point(model, x)
    if np.any(x <= 0.0):
        raise DomainError("hessian formula requires every entry of x to be > 0")
    pv = model.p_array
    v = pv / x
    return xi_eval(model, x) * (np.outer(v, v) - np.diag(pv / x**2))


def hessian_signature(model: ModelSpec, x) -> tuple[int, int, int]:
    """Counts of (positive, negative, zero) eigenvalues of the Hessian at ``x``."""
    eig = np.linalg.eigvalsh(hessian(model, x))
    thresh = HESSIAN_ZERO_TOL * np.max(np.abs(eig))
    pos = int(np.sum(eig > thresh))
    neg = int(np.sum(eig < -thresh))
    return pos, neg, len(eig) - pos - neg


def potentials(model: ModelSpec, q) -> tuple[float, float, float, float]:
    """Return ``(V, U, Phi, Omega)`` at ``q`` in the open unit box.

    ``V = -sum lam log(1-q)``, ``U = 1 + sum (1-q) p / q``,
    ``Phi = V/U`` and ``Omega = V*U``.
    """
    q = _as_point(model, q)
    if np.any(q <= 0.0):
        raise DomainError("U undefined: potentials need q(s) > 0 for every species")
    if np.any(q >= 1.0):
        raise DomainError("V undefined: potentials need q(s) < 1 for every species")
    V = float(-np.sum(model.lam_array * np.log1p(-q)))
    U = float(1.0 + np.sum((1.0 - q) * model.p_array / q))
    return V, U, V / U, V * U


def phi_with_origin_limit(model: ModelSpec, q) -> float:
    """``Phi(q)``, extended by its limit ``Phi(0) = 0`` at the origin only."""
    q = _as_point(model, q)
    if np.all(q == 0.0):
        return 0.0
    return potentials(model, q)[2]


def multi_indices(model: ModelSpec):
    """All ``k <= p`` with ``|k| >= 2``, in lexicographic species order."""
    ranges = [range(ps + 1) for ps in model.p]
    for k in itertools.product(*ranges):
        if sum(k) >= 2:
            yield k


def xi_q_coefficients(model: ModelSpec, q) -> dict[tuple, float]:
    """Coefficients of the recentred mixture ``xi_q`` indexed by multi-index.

    ``Delta^2_{q,k} = prod_s C(p_s, k_s) (1-q_s)^k_s q_s^(p_s-k_s)``. Terms
    that vanish identically (``q_s = 0`` with ``k_s < p_s``) are dropped.
    """
    q = _as_point(model, q)
    terms = {}
    for k in multi_indices(model):
        c = 1.0
        for ps, ks, qs in zip(model.p, k, q):
            c *= math.comb(ps, ks) * (1.0 - qs) ** ks * qs ** (ps - ks)
        if c != 0.0:
            terms[k] = c
    return terms


def xi_q_eval(model: ModelSpec, q, x) -> float:
    """Recentred mixture ``xi((1-q)x+q) - xi(q) - sum (1-q) grad_xi(q) x``."""
    q = _as_point(model, q)
    x = _as_point(model, x)
    return (
        xi_eval(model, (1.0 - q) * x + q)
        - xi_eval(model, q)
        - float(np.sum((1.0 - q) * grad_xi(model, q) * x))
    )


def xi_q_at_one(model: ModelSpec, q) -> float:
    """``xi_q(1) = xi(1) - xi(q) - sum_s (1-q_s) grad_xi(q)_s``."""
    q = _as_point(model, q)
    return 1.0 - xi_eval(model, q) - float(np.sum((1.0 - q) * grad_xi(model, q)))
