"""Cubic-regularized tangential subproblem.

The tangential model is

    m(t) = f0 + g.T t + 1/2 t.T H t + sigma/3 ||t||^3,   t in null(A).

Writing ``t = Z w`` with orthonormal ``Z`` gives an unconstrained ARC problem
in ``w`` with ``g_r = Z.T g`` and ``H_r = Z.T H Z``, solved globally through
the secular equation ``||w(nu)|| = nu / sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .kernels import project

__all__ = [
    "TangentialModel",
    "SubproblemSolution",
    "ReducedSolution",
    "cauchy_step",
    "cauchy_decrease_bound",
    "solve_reduced_arc",
    "solve_reduced_cubic",
    "tangential_model_value",
    "reduced_model_value",
]

CAUCHY_ONLY = "cauchy-only"
SECULAR = "secular-converged"
HARD_CASE = "hard-case"


@dataclass(frozen=True)
class TangentialModel:
    f0: float
    g: np.ndarray
    H: np.ndarray
    sigma: float
    fac: object

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def pg(self):
        return project(self.fac, self.g)


@dataclass(frozen=True)
class SubproblemSolution:
    t: np.ndarray
    model_value: float
    decrease: float
    cauchy_decrease: float
    status: str
    nu: float = 0.0
    reduced_min_eig: float = np.inf


@dataclass(frozen=True)
class ReducedSolution:
    w: np.ndarray
    nu: float
    status: str
    min_eig: float


def tangential_model_value(t, f0, g, H, sigma):
    t = np.asarray(t, dtype=float)
    return float(f0 + g @ t + 0.5 * t @ (H @ t) + sigma / 3.0 * np.linalg.norm(t) ** 3)


def reduced_model_value(w, g, H, sigma):
    """Reduced cubic model without the constant term."""
    return tangential_model_value(w, 0.0, g, H, sigma)


def cauchy_decrease_bound(pg_norm, H_norm, sigma):
    """Guaranteed Cauchy decrease ``(|pg| / 6 sqrt 2) min(|pg| / (1 + |H|), sqrt(|pg| / sigma) / 2)``."""
    return pg_norm / (6.0 * np.sqrt(2.0)) * min(pg_norm / (1.0 + H_norm), 0.5 * np.sqrt(pg_norm / sigma))


def _cauchy_beta(a, b, cube, sigma):
    # positive root of -a + b beta + sigma cube beta^2 = 0, cancellation-free
    disc = np.sqrt(b * b + 4.0 * sigma * cube * a)
    if b >= 0:
        return 2.0 * a / (b + disc)
    return (disc - b) / (2.0 * sigma * cube)


def cauchy_step(model):
    """Exact minimizer of the model along ``-P g``.

    Returns
    -------
    t_c : ndarray
    decrease : float
        ``f0 - m(t_c)``.
    """
    pg = model.pg
    pg_norm = np.linalg.norm(pg)
    if pg_norm == 0.0:
        return np.zeros_like(pg), 0.0
    a = pg_norm**2
    b = float(pg @ (model.H @ pg))
    beta = _cauchy_beta(a, b, pg_norm**3, model.sigma)
    t_c = -beta * pg
    decrease = beta * a - 0.5 * beta**2 * b - model.sigma / 3.0 * beta**3 * pg_norm**3
    return t_c, float(decrease)


def _canonical_sign(v):
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    return -v if nz.size and v[nz[0]] < 0 else v


def solve_reduced_cubic(g, H, sigma, tol=None):
    """Global minimizer of ``g.T w + 1/2 w.T H w + sigma/3 ||w||^3``.

    Characterized by ``(H + nu I) w = -g``, ``nu = sigma ||w||`` and
    ``H + nu I`` positive semidefinite.

    Parameters
    ----------
    g : ndarray, shape (p,)
    H : ndarray, shape (p, p)
        Symmetric.
    sigma : float
        Positive regularization weight.
    tol : float, optional
        Absolute tolerance on the multiplier, default ``1e-10 (1 + ||g||)``.

    Returns
    -------
    ReducedSolution
    """
    g = np.asarray(g, dtype=float)
    p = g.size
    if p == 0:
        return ReducedSolution(np.zeros(0), 0.0, CAUCHY_ONLY, np.inf)
    gnorm = np.linalg.norm(g)
    tol = 1e-10 * (1.0 + gnorm) if tol is None else tol
    lam, Q = scipy.linalg.eigh(0.5 * (H + H.T))
    gam = Q.T @ g
    lam_min = float(lam[0])
    nu_low = max(0.0, -lam_min)
    scale = max(1.0, np.abs(lam).max())

    def w_of(nu):
        return -(Q @ (gam / (lam + nu)))

    def psi(nu):
        return np.linalg.norm(gam / (lam + nu)) - nu / sigma

    if gnorm == 0.0 and lam_min >= 0.0:
        return ReducedSolution(np.zeros(p), 0.0, SECULAR, lam_min)

    # candidate hard case: g has (numerically) no component on the leftmost eigenspace
    left = lam <= lam_min + 1e-12 * scale
    if lam_min <= 0.0 and np.linalg.norm(gam[left]) <= 1e-12 * max(1.0, gnorm):
        rest = ~left
        w_part = -(Q[:, rest] @ (gam[rest] / (lam[rest] + nu_low)))
        radius = nu_low / sigma
        wp_norm = np.linalg.norm(w_part)
        if wp_norm <= radius:
            tau = np.sqrt(max(radius**2 - wp_norm**2, 0.0))
            q = _canonical_sign(Q[:, np.flatnonzero(left)[0]])
            plus = w_part + tau * q
            minus = w_part - tau * q
            mp = reduced_model_value(plus, g, H, sigma)
            mm = reduced_model_value(minus, g, H, sigma)
            w = minus if mm < mp else plus
            return ReducedSolution(w, nu_low, HARD_CASE, lam_min)

    # regular case: psi is decreasing on (nu_low, inf) and crosses zero once
    lo = nu_low
    if lam_min + lo <= 0.0:
        lo = nu_low + max(1e-15 * scale, np.finfo(float).tiny)
    if not psi(lo) > 0.0:
        # root within rounding of the pole: a numerically hard case
        return ReducedSolution(w_of(lo), lo, HARD_CASE, lam_min)
    hi = max(2.0 * lo, sigma * gnorm / max(scale, 1.0), 1.0)
    while psi(hi) > 0.0:
        hi *= 2.0
    nu = brentq(psi, lo, hi, xtol=min(tol, 1e-14 * hi) or 1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return ReducedSolution(w_of(nu), float(nu), SECULAR, lam_min)


def solve_reduced_arc(model, tol=None):
    """Solve the tangential subproblem and return ``t = Z w``.

    Falls back to the Cauchy step if the eigen-solve fails or yields less
    decrease than the Cauchy point.
    """
    Z = model.fac.Z
    t_c, dec_c = cauchy_step(model)
    if Z.shape[1] == 0:
        t = np.zeros(model.fac.n)
        return SubproblemSolution(t, float(model.f0), 0.0, 0.0, CAUCHY_ONLY)
    g_r = Z.T @ model.g
    H_r = Z.T @ model.H @ Z
    try:
        red = solve_reduced_cubic(g_r, H_r, model.sigma, tol)
    except (np.linalg.LinAlgError, ValueError, RuntimeError):
        red = None
    if red is not None:
        t = Z @ red.w
        decrease = -reduced_model_value(red.w, g_r, H_r, model.sigma)
        # roundoff slack when the two candidates coincide
        if decrease >= dec_c - 1e-14 * (1.0 + abs(dec_c)):
            return SubproblemSolution(t, model.f0 - decrease, decrease, dec_c, red.status, red.nu, red.min_eig)
    min_eig = red.min_eig if red is not None else np.inf
    return SubproblemSolution(t_c, model.f0 - dec_c, dec_c, dec_c, CAUCHY_ONLY, 0.0, min_eig)
