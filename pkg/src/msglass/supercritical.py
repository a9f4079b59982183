"""Maximal multi-samplable overlap and free energy above the critical point.

For ``beta > beta_c`` the overlap is parametrized by the per-species
constants ``Gamma(s)`` (fixed by ``Phi(q_c)``) and the larger positive root
``y_star`` of ``Upsilon(y) = beta^2``, through ``q(s) = y/(Gamma(s)+y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .critical import CriticalPoint
from .errors import DomainError, NumericalError
from .model import ModelSpec, xi_eval, xi_q_at_one

BISECT_MAXITER = 400
NEAR_CRITICAL_RTOL = 1e-10
# admissible excess of Upsilon(y0) over beta^2 caused by rounding near beta_c
Y0_SLACK = 1e-12


@dataclass(frozen=True)
class SupercriticalSolution:
    beta: float
    gamma: np.ndarray
    y_star: float
    q: np.ndarray
    free_energy: float
    xi_q_one: float
    a_star: float

    def as_dict(self, model: ModelSpec) -> dict:
        return {
            "beta": self.beta,
            "gamma": {lab: float(v) for lab, v in zip(model.species, self.gamma)},
            "y_star": self.y_star,
            "q": {lab: float(v) for lab, v in zip(model.species, self.q)},
            "free_energy": self.free_energy,
            "xi_q_one": self.xi_q_one,
            "a_star": self.a_star,
        }


def gamma_vector(model: ModelSpec, phi_qc: float) -> np.ndarray:
    """``Gamma(s) = (-sqrt(phi) + sqrt(phi + 4 lam_s/p_s)) / 2``.

    Computed in the cancellation-free form ``2 (lam/p) / (sqrt(phi) + sqrt(phi + 4 lam/p))``.
    """
    if phi_qc < 0.0:
        raise DomainError(f"phi_qc must be >= 0, got {phi_qc!r}")
    a = model.lam_array / model.p_array
    r = math.sqrt(phi_qc)
    return 2.0 * a / (r + np.sqrt(phi_qc + 4.0 * a))


def theta(model: ModelSpec, y: float) -> tuple[float, float, float]:
    """``Theta(y)`` and its first two derivatives."""
    a = model.lam_array / model.p_array
    p = model.p_array
    root = np.sqrt(y * y + 4.0 * a)
    value = y + float(np.sum(0.5 * p * (root - y)))
    d1 = 1.0 + float(np.sum(0.5 * p * (y / root - 1.0)))
    d2 = float(np.sum(2.0 * model.lam_array / root**3))
    return value, d1, d2


def upsilon(model: ModelSpec, gamma, y: float) -> tuple[float, float]:
    """``Upsilon(y) = y^2 prod (Gamma/y + 1)^p`` and its derivative."""
    if not y > 0.0:
        raise DomainError(f"Upsilon is defined for y > 0, got {y!r}")
    return kernels.upsilon_eval(model.p_array, np.ascontiguousarray(gamma, dtype=float), float(y))


def find_y0(model: ModelSpec, gamma) -> tuple[float, bool]:
    """Turning point of ``Upsilon``.

    Returns ``(y0, degenerate)``; ``degenerate`` is True when ``|p| = 2``,
    in which case ``Upsilon`` increases on all of ``(0, inf)`` and ``y0 = 0``.
    """
    y0 = kernels.y0_root(model.p_array, np.ascontiguousarray(gamma, dtype=float), BISECT_MAXITER)
    return y0, model.total_degree <= 2


def solve_y_star(model: ModelSpec, gamma, beta: float, beta_c: float) -> float:
    """Larger positive root of ``Upsilon(y) = beta^2``."""
    if not beta > beta_c:
        raise DomainError(f"solve_y_star needs beta > beta_c ({beta!r} <= {beta_c!r})")
    gamma = np.ascontiguousarray(gamma, dtype=float)
    target = beta * beta
    y0, degenerate = find_y0(model, gamma)
    if not degenerate:
        ups0 = kernels.upsilon_eval(model.p_array, gamma, y0)[0]
        if ups0 > target * (1.0 + Y0_SLACK):
            raise NumericalError(
                f"Upsilon(y0) = {ups0!r} exceeds beta^2 = {target!r}: no root, which "
                "contradicts beta > beta_c"
            )
    y = kernels.upsilon_upper_root(model.p_array, gamma, target, y0, BISECT_MAXITER)
    if not math.isfinite(y):
        raise NumericalError(f"no upper bracket for Upsilon(y) = {target!r}")
    return y


def _is_near_critical(beta: float, beta_c: float) -> bool:
    return beta - beta_c < NEAR_CRITICAL_RTOL * beta_c


def solve_supercritical(model: ModelSpec, critical: CriticalPoint, beta: float) -> SupercriticalSolution:
    """Overlap and free energy at ``beta > beta_c``.

    ``critical`` may come from :func:`msglass.critical.solve_critical` or,
    for the bipartite model, from :func:`msglass.bipartite.critical_point`.
    """
    if beta <= critical.beta_c or _is_near_critical(beta, critical.beta_c):
        raise DomainError(
            f"beta = {beta!r} is not above beta_c = {critical.beta_c!r}; use free_energy_at"
        )
    gamma = gamma_vector(model, critical.phi_qc)
    y = solve_y_star(model, gamma, beta, critical.beta_c)
    q = y / (gamma + y)
    xi_one = xi_q_at_one(model, q)
    entropy = 0.5 * float(np.sum(model.lam_array * np.log1p(-q)))
    energy = beta * math.sqrt(xi_eval(model, q)) * critical.e_star
    return SupercriticalSolution(
        beta=float(beta),
        gamma=gamma,
        y_star=y,
        q=q,
        free_energy=energy + entropy + 0.5 * beta * beta * xi_one,
        xi_q_one=xi_one,
        a_star=critical.e_star - math.sqrt(critical.phi_qc),
    )


def free_energy_at(model: ModelSpec, critical: CriticalPoint, beta: float) -> float:
    """Limiting free energy at any ``beta >= 0``.

    Equals ``beta^2 xi(1)/2`` up to and including ``beta_c`` (and within the
    near-critical guard), and the supercritical formula above it.
    """
    if beta < 0.0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    if beta <= critical.beta_c or _is_near_critical(beta, critical.beta_c):
        return 0.5 * beta * beta * xi_eval(model, np.ones(model.n_species))
    return solve_supercritical(model, critical, beta).free_energy
