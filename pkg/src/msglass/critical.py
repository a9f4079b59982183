"""Critical overlap, critical inverse-temperature and ground-state energy.

The per-species system ``(lam/p) q^2/(1-q) = Phi(q)`` is reduced to one
scalar equation: with ``q_z(s)`` the inverse of
``f_s(x) = (lam_s/p_s) x^2/(1-x)`` at level ``z``, the system holds exactly
when ``g(z) = z + sum lam q_z + sum lam log(1-q_z)`` vanishes. ``g`` is
strictly convex with ``g(0) = 0`` and ``g'(0+) = 1 - |p|/2``, so for
``|p| >= 3`` it has exactly one positive root.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NumericalError, UnsupportedModelError
from .model import ModelSpec, potentials, xi_eval

log = logging.getLogger(__name__)

Z_LO = 1e-12
Z_HI_CAP = 2.0**60
ROOT_RTOL = 1e-13
MAXITER = 500


@dataclass(frozen=True)
class CriticalPoint:
    """Solution at the critical inverse-temperature.

    ``q_c`` is the critical overlap, ``beta_c`` the critical
    inverse-temperature, ``e_star`` the ground-state energy,
    ``phi_qc = Phi(q_c)`` and ``z_root`` the root of ``g``. For the
    bipartite model ``q_c`` is the zero vector and ``z_root = 0``.
    """

    q_c: np.ndarray
    beta_c: float
    e_star: float
    phi_qc: float
    z_root: float

    def as_dict(self, model: ModelSpec) -> dict:
        return {
            "q_c": {lab: float(v) for lab, v in zip(model.species, self.q_c)},
            "beta_c": self.beta_c,
            "e_star": self.e_star,
            "phi_qc": self.phi_qc,
            "z_root": self.z_root,
        }


def _ratio(model: ModelSpec) -> np.ndarray:
    return model.lam_array / model.p_array


def f_species(model: ModelSpec, s, x: float) -> float:
    """``f_s(x) = (lam_s/p_s) x^2 / (1-x)`` on ``[0, 1)``."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"f_s needs x in [0, 1), got {x!r}")
    i = model.index(s)
    return model.lam[i] / model.p[i] * x * x / (1.0 - x)


def f_species_inverse(model: ModelSpec, s, z: float) -> float:
    """Inverse of :func:`f_species`: the root in ``[0, 1)`` of ``f_s(x) = z``."""
    if z < 0.0:
        raise DomainError(f"f_s inverse needs z >= 0, got {z!r}")
    i = model.index(s)
    return kernels.f_inverse(model.lam[i] / model.p[i], float(z))[0]


def overlap_at_level(model: ModelSpec, z: float) -> np.ndarray:
    """The vector ``q_z`` with ``q_z(s) = f_s^{-1}(z)``."""
    if z < 0.0:
        raise DomainError(f"level z must be >= 0, got {z!r}")
    return np.array([kernels.f_inverse(a, float(z))[0] for a in _ratio(model)])


def g_and_derivative(model: ModelSpec, z: float) -> tuple[float, float]:
    """``(g(z), g'(z))`` with ``g'(z) = 1 - sum p (1-q_z)/(2-q_z)``."""
    if z < 0.0:
        raise DomainError(f"g needs z >= 0, got {z!r}")
    return kernels.g_eval(_ratio(model), model.lam_array, model.p_array, float(z))


def _bracket(model: ModelSpec) -> tuple[float, float]:
    a, lam, p = _ratio(model), model.lam_array, model.p_array
    g_lo, _ = kernels.g_eval(a, lam, p, Z_LO)
    if not g_lo < 0.0:
        raise NumericalError(f"g({Z_LO:g}) = {g_lo!r} is not negative")
    lo, hi = Z_LO, 1.0
    while kernels.g_eval(a, lam, p, hi)[0] <= 0.0:
        lo = hi
        hi *= 2.0
        if hi > Z_HI_CAP:
            raise NumericalError(
                f"no sign change of g up to z = 2^60 for lambda={model.lam}, p={model.p}"
            )
    return lo, hi


def solve_critical(model: ModelSpec) -> CriticalPoint:
    """Critical point of a pure model with ``|p| >= 3``.

    Raises
    ------
    UnsupportedModelError
        For ``|p| <= 2``; use :mod:`msglass.bipartite` instead.
    NumericalError
        If the root of ``g`` cannot be bracketed.
    """
    if model.total_degree < 3:
        raise UnsupportedModelError(
            "solve_critical requires |p| >= 3; the |p| = 2 model is handled by "
            "msglass.bipartite"
        )
    lo, hi = _bracket(model)
    z, gz, iters = kernels.brent_root_g(
        _ratio(model), model.lam_array, model.p_array, lo, hi, ROOT_RTOL, MAXITER
    )
    if iters < 0 or not math.isfinite(z):
        raise NumericalError(f"Brent iteration lost the bracket [{lo}, {hi}]")
    log.debug("g root z=%.17g g=%.3g after %d iterations", z, gz, iters)
    q_c = overlap_at_level(model, z)
    _, _, phi, omega = potentials(model, q_c)
    beta_c = math.sqrt(phi / xi_eval(model, q_c))
    return CriticalPoint(q_c=q_c, beta_c=beta_c, e_star=math.sqrt(omega), phi_qc=phi, z_root=z)


def qc_formula_residuals(model: ModelSpec, q) -> np.ndarray:
    """Relative residuals ``|f_s(q_s) - Phi(q)| / Phi(q)`` per species."""
    q = np.asarray(q, dtype=float)
    phi = potentials(model, q)[2]
    f = _ratio(model) * q**2 / (1.0 - q)
    return np.abs(f - phi) / phi


def stationarity_lhs_rhs(model: ModelSpec, beta: float, q, e: float):
    """Both sides of the per-species stationarity equations in ``q``."""
    q = np.asarray(q, dtype=float)
    lam, p = model.lam_array, model.p_array
    xi = xi_eval(model, q)
    odds = p * (1.0 - q) / q
    lhs = lam / (1.0 - q) + beta**2 * xi * (-odds / q + p / q * odds.sum())
    rhs = beta * e * math.sqrt(xi) * p / q
    return lhs, rhs


def critical_residuals(model: ModelSpec, beta: float, q, e: float) -> dict:
    """Relative residuals of the critical-point equations.

    Returns a dict with ``"stationarity"`` (per species, one per overlap
    derivative), ``"energy_balance"`` (``beta^2 xi U = V``) and
    ``"ground_state"`` (``V = beta E sqrt(xi)``), each scaled by the size
    of its left side, plus ``"max"`` over all of them.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise DomainError("critical residuals need q in (0, 1) for every species")
    lhs, rhs = stationarity_lhs_rhs(model, beta, q, e)
    stationarity = np.abs(lhs - rhs) / np.abs(lhs)
    V, U, _, _ = potentials(model, q)
    xi = xi_eval(model, q)
    a = beta**2 * xi * U
    c = beta * e * math.sqrt(xi)
    balance = abs(a - V) / abs(a)
    ground = abs(V - c) / abs(V)
    return {
        "stationarity": stationarity,
        "energy_balance": balance,
        "ground_state": ground,
        "max": float(max(stationarity.max(), balance, ground)),
    }
