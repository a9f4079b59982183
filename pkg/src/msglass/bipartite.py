"""Closed forms for the two-species model with ``p = (1, 1)``.

Here the critical overlap is zero, ``E* = sqrt(lam_s) + sqrt(lam_t)`` (the
limiting top singular value of a rectangular Gaussian matrix) and
``beta_c = (lam_s lam_t)^(1/4)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .critical import CriticalPoint
from .errors import ModelError
from .model import ModelSpec


@dataclass(frozen=True)
class BipartiteModel:
    lambda_s: float
    lambda_t: float

    def __post_init__(self):
        for v in (self.lambda_s, self.lambda_t):
            if not 0.0 < v < 1.0:
                raise ModelError(f"lambda={v!r} must lie in (0, 1)")
        if abs(self.lambda_s + self.lambda_t - 1.0) > 1e-12:
            raise ModelError(f"lambda sums to {self.lambda_s + self.lambda_t!r}, expected 1")

    @classmethod
    def from_model(cls, model: ModelSpec) -> "BipartiteModel":
        if model.n_species != 2 or model.p != (1, 1):
            raise ModelError(f"bipartite closed forms need p = (1, 1), got {model.p}")
        return cls(*model.lam)

    @classmethod
    def from_lambda_s(cls, lambda_s: float) -> "BipartiteModel":
        return cls(lambda_s, 1.0 - lambda_s)

    def to_model(self, species=("s", "t")) -> ModelSpec:
        return ModelSpec((self.lambda_s, self.lambda_t), (1, 1), tuple(species))

    @property
    def _roots(self):
        return math.sqrt(self.lambda_s), math.sqrt(self.lambda_t)

    def _disc(self, beta):
        rs, rt = self._roots
        return math.sqrt((rs - rt) ** 2 + 4.0 * beta * beta)


def bipartite_critical(m: BipartiteModel) -> tuple[float, float, np.ndarray]:
    """``(beta_c, e_star, q_c)`` with ``q_c = (0, 0)``."""
    rs, rt = m._roots
    return (m.lambda_s * m.lambda_t) ** 0.25, rs + rt, np.zeros(2)


def critical_point(m: BipartiteModel) -> CriticalPoint:
    """Bipartite critical data in the shape consumed by the supercritical solver."""
    beta_c, e_star, q_c = bipartite_critical(m)
    return CriticalPoint(q_c=q_c, beta_c=beta_c, e_star=e_star, phi_qc=0.0, z_root=0.0)


def bipartite_overlap(m: BipartiteModel, beta: float) -> tuple[float, float, bool]:
    """``(q_s, q_t, subcritical)``; zeros with the flag set when ``beta <= beta_c``."""
    beta_c = bipartite_critical(m)[0]
    if beta <= beta_c:
        return 0.0, 0.0, True
    rs, rt = m._roots
    d = m._disc(beta)
    # numerator d - (rs + rt) rewritten to avoid cancellation near beta_c
    num = 4.0 * (beta * beta - rs * rt) / (d + rs + rt)
    q_s = num / (rs - rt + d)
    q_t = num / (rt - rs + d)
    return q_s, q_t, False


def bipartite_free_energy(m: BipartiteModel, beta: float) -> float:
    """Free energy; ``beta^2/2`` at and below ``beta_c``."""
    beta_c = bipartite_critical(m)[0]
    if beta <= beta_c:
        return 0.5 * beta * beta
    ls, lt = m.lambda_s, m.lambda_t
    rs, rt = m._roots
    d = m._disc(beta)
    return (
        0.5 * (-1.0 - rs * rt + (rs + rt) * d)
        - 0.25 * (ls - lt) * math.log((rs - rt + d) / (rt - rs + d))
        - 0.5 * math.log(beta)
        + 0.25 * ls * math.log(ls)
        + 0.25 * lt * math.log(lt)
    )


def kappa(m: BipartiteModel, beta: float) -> tuple[float, float]:
    """``kappa(beta)`` and ``kappa'(beta)``; ``kappa <= 0`` with equality at ``beta_c``."""
    rs, rt = m._roots
    d = m._disc(beta)
    value = (rs + rt) * d - 1.0 - 2.0 * beta * beta
    deriv = 4.0 * beta * ((rs + rt) / d - 1.0)
    return value, deriv
