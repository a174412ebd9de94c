"""Backtracking line search with filter, switching and sufficient-decrease tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernels import RankDeficientError, factorize_jacobian, multipliers
from .problem import EvaluationError, evaluate

__all__ = [
    "SearchContext",
    "TrialPoint",
    "LineSearchOutcome",
    "model_m",
    "switching_holds",
    "sufficient_decrease_holds",
    "compute_alpha_min",
    "backtracking_search",
    "F_TYPE",
    "H_TYPE",
    "RESTORATION",
]

F_TYPE = "accepted-f-type"
H_TYPE = "accepted-h-type"
RESTORATION = "restoration"

REJECT_FILTER = "F-REJECT-FILTER"
REJECT_ARMIJO = "F-REJECT-ARMIJO"
REJECT_H = "H-REJECT"
EVAL_FAIL = "EVAL-FAIL"


@dataclass
class SearchContext:
    """Data at ``x_k`` needed to test trial points ``x_k + alpha d``.

    ``dlam_d`` is the directional derivative of the multiplier function
    along ``d``.
    """

    x: np.ndarray
    g: np.ndarray
    t: np.ndarray
    d: np.ndarray
    H: np.ndarray
    sigma: float
    c: np.ndarray
    h: float
    l: float
    dlam_d: np.ndarray
    f0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        self.gt = float(self.g @ self.t)
        self.tHt = float(self.t @ (self.H @ self.t))
        self.cubic = float(self.sigma * np.linalg.norm(self.t) ** 3)
        self.dlam_c = float(np.asarray(self.dlam_d) @ np.asarray(self.c))

    @property
    def delta(self):
        """``-g.T t + (grad(lam).T d).T c``, the negated slope of the model at zero."""
        return -self.gt + self.dlam_c


@dataclass
class TrialPoint:
    alpha: float
    x: np.ndarray
    f: float
    c: np.ndarray
    g: np.ndarray
    A: np.ndarray
    fac: object
    lam: np.ndarray
    h: float
    l: float


@dataclass
class LineSearchOutcome:
    kind: str
    alpha: Optional[float]
    trials: int
    trial_log: list = field(default_factory=list)
    alpha_min: float = 0.0
    m_alpha: Optional[float] = None
    trial: Optional[TrialPoint] = None
    last_alpha: Optional[float] = None


def model_m(alpha, ctx):
    """``alpha g.T t + alpha^2/2 t.T H t + alpha^3/3 sigma ||t||^3 - alpha (grad(lam).T d).T c``."""
    if alpha == 0:
        return 0.0
    return alpha * ctx.gt + 0.5 * alpha**2 * ctx.tHt + alpha**3 / 3.0 * ctx.cubic - alpha * ctx.dlam_c


def switching_holds(m_alpha, alpha, sigma, h, params):
    if not m_alpha < 0:
        return False
    lhs = (-m_alpha) ** params.omega * (alpha * np.sqrt(sigma)) ** (params.omega - 1.0)
    return bool(lhs > params.kappa_h * h**params.varsigma)


def sufficient_decrease_holds(l_trial, l_current, m_alpha, mu):
    return bool(l_trial <= l_current + mu * m_alpha)


def compute_alpha_min(ctx, params):
    delta = ctx.delta
    if delta > 0:
        h = ctx.h
        return params.mu_alpha * min(
            params.gamma_h,
            params.gamma_l * h / delta,
            params.kappa_h * h**params.phi * ctx.sigma ** (1.0 - params.tau) / delta**params.tau,
        )
    return params.mu_alpha * params.gamma_h


def _trial_point(problem, x, alpha, counters, rank_tol):
    ev = evaluate(problem, x, {"F", "C", "G", "A"}, counters)
    fac = factorize_jacobian(ev.A, rank_tol)
    lam = multipliers(fac, ev.g)
    return TrialPoint(
        alpha=alpha,
        x=x,
        f=ev.f,
        c=ev.c,
        g=ev.g,
        A=ev.A,
        fac=fac,
        lam=lam,
        h=float(np.linalg.norm(ev.c)),
        l=float(ev.f - lam @ ev.c),
    )


def backtracking_search(ctx, filt, problem, counters, params, alpha_min=None):
    """Backtrack from ``alpha = 1`` until a trial point is accepted.

    Non-finite evaluations or a rank-deficient Jacobian at the trial point
    reject that step size. Returns a restoration outcome once ``alpha`` drops
    below ``alpha_min`` (or ``params.min_step``). An h-type outcome obliges
    the caller to add the current iterate to the filter.
    """
    if alpha_min is None:
        alpha_min = compute_alpha_min(ctx, params)
    threshold = max(alpha_min, params.min_step)
    alpha = 1.0
    log = []
    trials = 0
    while True:
        if alpha < threshold:
            return LineSearchOutcome(RESTORATION, None, trials, log, alpha_min, last_alpha=alpha)
        trials += 1
        x_trial = ctx.x + alpha * ctx.d
        try:
            trial = _trial_point(problem, x_trial, alpha, counters, params.rank_tol)
        except (EvaluationError, RankDeficientError):
            trial = None
        if trial is None:
            log.append((alpha, EVAL_FAIL))
        elif filt.contains(trial.h, trial.l):
            log.append((alpha, REJECT_FILTER))
        else:
            m_alpha = model_m(alpha, ctx)
            if switching_holds(m_alpha, alpha, ctx.sigma, ctx.h, params):
                if sufficient_decrease_holds(trial.l, ctx.l, m_alpha, params.mu):
                    return LineSearchOutcome(F_TYPE, alpha, trials, log, alpha_min, m_alpha, trial, alpha)
                log.append((alpha, REJECT_ARMIJO))
            elif filt.margins_hold(trial.h, trial.l):
                return LineSearchOutcome(H_TYPE, alpha, trials, log, alpha_min, m_alpha, trial, alpha)
            else:
                log.append((alpha, REJECT_H))
        alpha *= params.omega2
