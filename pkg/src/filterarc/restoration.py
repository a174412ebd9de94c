"""Feasibility restoration: Levenberg-Marquardt on ``||c(x)||^2``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernels import RankDeficientError, factorize_jacobian, multipliers, normal_step, normal_step_condition
from .problem import EvaluationError, evaluate

__all__ = ["RestorationResult", "restore", "RESTORED", "INFEASIBLE_STATIONARY", "BUDGET_EXHAUSTED"]

_log = logging.getLogger(__name__)

RESTORED = "restored"
INFEASIBLE_STATIONARY = "infeasible-stationary"
BUDGET_EXHAUSTED = "budget-exhausted"

_MAX_DAMPING_TRIES = 60


@dataclass
class RestorationResult:
    status: str
    x_new: np.ndarray
    inner_iterations: int
    h_final: float
    f: Optional[float] = None
    c: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None
    fac: object = None
    lam: Optional[np.ndarray] = None
    l: Optional[float] = None
    trace: list = field(default_factory=list)
    message: str = ""
    rank_deficient: bool = False


def _lm_step(A, c, nu):
    # min ||A p + c||^2 + nu ||p||^2 as a stacked least-squares problem
    if nu == 0.0:
        return np.linalg.lstsq(A, -c, rcond=None)[0]
    n = A.shape[1]
    K = np.vstack([A, np.sqrt(nu) * np.eye(n)])
    rhs = np.concatenate([-c, np.zeros(n)])
    return np.linalg.lstsq(K, rhs, rcond=None)[0]


def restore(problem, x_start, filt, counters, params, sigma=None, require_normal_bound=False):
    """Reduce ``h(x) = ||c(x)||`` from ``x_start`` until the point is filter-acceptable.

    Iterates stop once ``h`` sits below ``(1 - gamma_h) h_j`` for every
    filter entry and below ``h_max``, which makes the point acceptable whatever
    its Lagrangian value. With ``require_normal_bound`` the normal step at the
    result must also satisfy the step bound for ``sigma``. The objective is
    evaluated once, at the returned point.

    Each inner iteration tries the current damping ``nu`` (initially zero,
    i.e. a minimum-norm Gauss-Newton step); a step is accepted when the actual
    reduction of ``h^2`` is at least 1e-4 of the predicted one. Damping is
    divided by 3 on success and doubled (from at least ``1e-3 ||A.T A||``) on
    failure.
    """
    result = _restore(problem, x_start, filt, counters, params, sigma, require_normal_bound)
    if result.status != RESTORED and result.A is not None and not result.rank_deficient:
        try:
            factorize_jacobian(result.A, params.rank_tol)
        except RankDeficientError:
            result.rank_deficient = True
    return result


def _restore(problem, x_start, filt, counters, params, sigma, require_normal_bound):
    x = np.array(x_start, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("restoration start point is not finite")
    if require_normal_bound and sigma is None:
        raise ValueError("sigma is required to enforce the normal-step bound")
    gamma_h = filt.gamma_h
    eps = params.epsilon
    trace = []

    try:
        ev = evaluate(problem, x, {"C", "A"}, counters)
    except EvaluationError as exc:
        return RestorationResult(BUDGET_EXHAUSTED, x, 0, np.inf, message=f"evaluation failed at start: {exc}")
    c, A = ev.c, ev.A
    h = float(np.linalg.norm(c))

    def h_target_met(h, A, c):
        if h >= filt.h_max:
            return False
        if any(h > (1.0 - gamma_h) * e.h for e in filt.entries):
            return False
        # the main loop cannot resume at a rank-deficient point
        try:
            fac = factorize_jacobian(A, params.rank_tol)
        except RankDeficientError:
            return False
        if require_normal_bound:
            return normal_step_condition(normal_step(fac, c), sigma, params.beta1, params.beta2, params.beta3)
        return True

    def finish(x, c, A, status, inner, message=""):
        try:
            fac = factorize_jacobian(A, params.rank_tol)
        except RankDeficientError as exc:
            return RestorationResult(BUDGET_EXHAUSTED, x, inner, float(np.linalg.norm(c)), c=c, A=A, trace=trace,
                                     message=str(exc), rank_deficient=True), str(exc)
        try:
            ev = evaluate(problem, x, {"F", "G"}, counters)
        except EvaluationError as exc:
            return None, str(exc)
        lam = multipliers(fac, ev.g)
        l = float(ev.f - lam @ c)
        h = float(np.linalg.norm(c))
        return RestorationResult(status, x, inner, h, ev.f, c, ev.g, A, fac, lam, l, trace, message), ""

    def full_check(x, c, A, inner):
        # acceptance through the Lagrangian value when h alone cannot qualify
        res, _ = finish(x, c, A, RESTORED, inner)
        if res is None or res.status != RESTORED:
            return None
        h = res.h_final
        if filt.contains(h, res.l) or not filt.margins_hold(h, res.l):
            return None
        if require_normal_bound and not normal_step_condition(
            normal_step(res.fac, c), sigma, params.beta1, params.beta2, params.beta3
        ):
            return None
        return res

    AtA_norm = float(np.linalg.norm(A, 2) ** 2)
    nu = 0.0
    inner = 0
    tried_full = False
    while True:
        if h_target_met(h, A, c):
            res, msg = finish(x, c, A, RESTORED, inner)
            if res is not None:
                return res
            return RestorationResult(BUDGET_EXHAUSTED, x, inner, h, c=c, A=A, trace=trace, message=msg)
        grad = A.T @ c
        if np.linalg.norm(grad) <= 1e-10 * (1.0 + h) or h <= 1e-3 * eps:
            if not tried_full:
                tried_full = True
                res = full_check(x, c, A, inner)
                if res is not None:
                    return res
            if h > eps and np.linalg.norm(grad) <= 1e-10 * (1.0 + h):
                return RestorationResult(INFEASIBLE_STATIONARY, x, inner, h, c=c, A=A, trace=trace)
        if inner >= params.restoration_max_iter:
            return RestorationResult(BUDGET_EXHAUSTED, x, inner, h, c=c, A=A, trace=trace,
                                     message="restoration iteration budget exhausted")

        accepted = False
        for _ in range(_MAX_DAMPING_TRIES):
            p = _lm_step(A, c, nu)
            pred = h**2 - float(np.linalg.norm(c + A @ p) ** 2)
            try:
                c_new = evaluate(problem, x + p, {"C"}, counters).c
            except EvaluationError:
                c_new = None
            if c_new is not None:
                h_new = float(np.linalg.norm(c_new))
                if h_new < h and h**2 - h_new**2 >= 1e-4 * pred:
                    accepted = True
                    break
            nu = max(2.0 * nu, 1e-3 * AtA_norm, np.finfo(float).tiny)
        if not accepted:
            # h cannot drop in floating point: numerically stationary if the gradient is at rounding level
            if h > eps and np.linalg.norm(grad) <= np.sqrt(np.finfo(float).eps) * (1.0 + h) * max(1.0, np.linalg.norm(A, 2)):
                return RestorationResult(INFEASIBLE_STATIONARY, x, inner, h, c=c, A=A, trace=trace,
                                         message="no representable decrease of h near a stationary point")
            return RestorationResult(BUDGET_EXHAUSTED, x, inner, h, c=c, A=A, trace=trace,
                                     message="no decrease of h at any damping level")
        x = x + p
        try:
            A = evaluate(problem, x, {"A"}, counters).A
        except EvaluationError as exc:
            return RestorationResult(BUDGET_EXHAUSTED, x, inner + 1, h_new, c=c_new, trace=trace, message=str(exc))
        c, h = c_new, h_new
        inner += 1
        trace.append((inner, h, nu))
        _log.debug("restoration %d: h=%.3e nu=%.3e", inner, h, nu)
        nu /= 3.0
        tried_full = False
