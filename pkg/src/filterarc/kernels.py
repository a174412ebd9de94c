"""Dense linear algebra on the constraint Jacobian.

Everything is driven by one complete QR factorization ``A.T = [Y Z] [R; 0]``:
``Y`` spans the row space of ``A``, ``Z`` its null space, and
``A A.T = R.T R`` so no normal-equations matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .problem import SQRT_EPS, evaluate

__all__ = [
    "RankDeficientError",
    "JacobianFactorization",
    "KktQuantities",
    "factorize_jacobian",
    "project",
    "multipliers",
    "normal_step",
    "normal_step_bound",
    "normal_step_condition",
    "kkt_quantities",
    "directional_multiplier_derivative",
]


class RankDeficientError(np.linalg.LinAlgError):
    """The Jacobian does not have full row rank."""

    def __init__(self, smin, anorm):
        self.smin = smin
        self.anorm = anorm
        super().__init__(f"rank-deficient Jacobian: smallest singular value {smin:.3e}, norm {anorm:.3e}")


@dataclass(frozen=True)
class JacobianFactorization:
    """Orthogonal factorization of ``A.T``.

    Attributes
    ----------
    A : ndarray, shape (m, n)
    Y : ndarray, shape (n, m)
        Orthonormal basis of the row space of ``A``.
    Z : ndarray, shape (n, n - m)
        Orthonormal basis of the null space of ``A``.
    R : ndarray, shape (m, m)
        Upper triangular, ``A.T = Y @ R``.
    smin : float
        Smallest singular value of ``A``.
    anorm : float
        Largest singular value of ``A``.
    """

    A: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    R: np.ndarray
    smin: float
    anorm: float

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    def projector(self):
        """Explicit ``P = Z Z.T``; for tests and diagnostics only."""
        return self.Z @ self.Z.T


@dataclass(frozen=True)
class KktQuantities:
    lam: np.ndarray
    pg: np.ndarray
    pg_norm: float
    h: float
    res: float
    lagrangian_value: float


def factorize_jacobian(A, rank_tol=1e-10):
    """Factor ``A.T`` and check full row rank.

    Raises
    ------
    RankDeficientError
        If ``smin < rank_tol * ||A||``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got A of shape {A.shape}")
    Q, R = scipy.linalg.qr(A.T, mode="full")
    R = R[:m, :]
    sv = scipy.linalg.svdvals(R)
    anorm = float(sv[0])
    smin = float(sv[-1])
    if not smin > rank_tol * anorm:
        raise RankDeficientError(smin, anorm)
    return JacobianFactorization(A=A, Y=Q[:, :m], Z=Q[:, m:], R=R, smin=smin, anorm=anorm)


def project(fac, v):
    """Null-space projection ``P v = Z Z.T v``."""
    v = np.asarray(v, dtype=float)
    return fac.Z @ (fac.Z.T @ v)


def multipliers(fac, g):
    """Least-squares multipliers ``(A A.T)^{-1} A g = R^{-1} Y.T g``."""
    return scipy.linalg.solve_triangular(fac.R, fac.Y.T @ np.asarray(g, dtype=float))


def normal_step(fac, c):
    """Minimum-norm solution of ``A n + c = 0``, i.e. ``-Y R^{-T} c``."""
    c = np.asarray(c, dtype=float)
    return -fac.Y @ scipy.linalg.solve_triangular(fac.R, c, trans="T")


def normal_step_bound(sigma, beta1, beta2, beta3):
    root = np.sqrt(sigma)
    return beta1 * min(1.0, beta2 / root**beta3) / root


def normal_step_condition(n, sigma, beta1, beta2, beta3):
    """``||n|| <= beta1 * min(1, beta2 / sqrt(sigma)**beta3) / sqrt(sigma)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return bool(np.linalg.norm(n) <= normal_step_bound(sigma, beta1, beta2, beta3))


def kkt_quantities(f, g, c, fac):
    g = np.asarray(g, dtype=float)
    c = np.asarray(c, dtype=float)
    lam = multipliers(fac, g)
    pg = project(fac, g)
    pg_norm = float(np.linalg.norm(pg))
    h = float(np.linalg.norm(c))
    return KktQuantities(
        lam=lam,
        pg=pg,
        pg_norm=pg_norm,
        h=h,
        res=max(pg_norm, h),
        lagrangian_value=float(f - lam @ c),
    )


def directional_multiplier_derivative(problem, x, d, lam_x, counters, rank_tol=1e-10):
    """Forward difference of the multiplier function along ``d``.

    Returns ``(lam(x + s d) - lam(x)) / s`` with ``s = sqrt(eps) (1 + ||x||) / ||d||``,
    which approximates ``grad(lam).T @ d``. Costs one gradient and one Jacobian
    evaluation at the probe point.

    Raises
    ------
    RankDeficientError
        If the Jacobian at the probe point is rank deficient.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    dnorm = np.linalg.norm(d)
    if dnorm == 0.0:
        raise ValueError("direction must be nonzero")
    step = SQRT_EPS * (1.0 + np.linalg.norm(x)) / dnorm
    xp = x + step * d
    ev = evaluate(problem, xp, {"G", "A"}, counters)
    lam_p = multipliers(factorize_jacobian(ev.A, rank_tol), ev.g)
    return (lam_p - np.asarray(lam_x, dtype=float)) / step
