"""Main iteration: composite normal/tangential steps, filter line search, restoration."""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import ConfigError, SolverConfig
from .cubic import TangentialModel, cauchy_decrease_bound, solve_reduced_arc
from .filter import Filter
from .kernels import (
    RankDeficientError,
    directional_multiplier_derivative,
    factorize_jacobian,
    kkt_quantities,
    multipliers,
    normal_step,
    normal_step_condition,
)
from .line_search import F_TYPE, H_TYPE, RESTORATION, SearchContext, backtracking_search, compute_alpha_min
from .problem import EvalCounters, EvaluationError, evaluate, fd_lagrangian_hessian
from .restoration import RESTORED, restore

__all__ = [
    "InvariantViolation",
    "IterationRecord",
    "SolverReport",
    "BfgsState",
    "rho_ratio",
    "update_sigma",
    "lagrangian_hessian",
    "solve",
    "CONVERGED",
    "MAX_ITER",
    "RESTORATION_FAILED",
    "RANK_DEFICIENT",
]

_log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITER = "max-iter"
RESTORATION_FAILED = "restoration-failed"
RANK_DEFICIENT = "rank-deficient-unrecoverable"


class InvariantViolation(AssertionError):
    pass


@dataclass
class IterationRecord:
    """One pass through the main loop.

    ``step_type`` is ``"f"``, ``"h"`` or ``"restoration"``. The remaining
    fields are the live quantities the convergence theory makes claims about;
    fields that do not apply to a restoration step are left as ``None``.
    """

    k: int
    h: float
    l: float
    sigma: float
    alpha: Optional[float]
    step_type: str
    res: float
    f: float = math.nan
    pg_norm: Optional[float] = None
    n_norm: Optional[float] = None
    t_norm: Optional[float] = None
    hess_norm: Optional[float] = None
    model_decrease: Optional[float] = None
    cauchy_decrease: Optional[float] = None
    cauchy_bound: Optional[float] = None
    reduced_min_eig: Optional[float] = None
    reduced_psd: Optional[bool] = None
    lin_residual: Optional[float] = None
    c_norm: Optional[float] = None
    subproblem_status: Optional[str] = None
    alpha_min: Optional[float] = None
    m_alpha: Optional[float] = None
    rho: Optional[float] = None
    trials: int = 0
    trial_log: list = field(default_factory=list)
    restoration_trigger: Optional[str] = None
    restoration_inner: Optional[int] = None
    filter_before: Optional[tuple] = None
    accepted_pair: Optional[tuple] = None

    def as_dict(self):
        out = {}
        for key, value in self.__dict__.items():
            if key == "filter_before":
                value = None if value is None else [[e.h, e.l] for e in value]
            elif key == "trial_log":
                value = [[a, r] for a, r in value]
            elif isinstance(value, tuple):
                value = list(value)
            out[key] = value
        return out


@dataclass
class SolverReport:
    problem: str
    n: int
    m: int
    status: str
    x_final: np.ndarray
    f_final: float
    h_final: float
    res: float
    nit: int
    nf: int
    nc: int
    ng: int
    nj: int
    nh: int
    wall_time: float
    history: list
    hessian_strategy: str
    fd_gradient: bool = False
    fd_jacobian: bool = False
    message: str = ""
    filter: Optional[Filter] = None

    @property
    def converged(self):
        return self.status == CONVERGED

    def summary(self):
        return f"{self.problem} {self.status} nit={self.nit} res={self.res:.4e}"

    def as_dict(self, history=True):
        out = {
            "problem": self.problem,
            "n": self.n,
            "m": self.m,
            "status": self.status,
            "nit": self.nit,
            "nf": self.nf,
            "nc": self.nc,
            "ng": self.ng,
            "nj": self.nj,
            "nh": self.nh,
            "res": self.res,
            "f_final": self.f_final,
            "h_final": self.h_final,
            "x_final": [float(v) for v in self.x_final],
            "wall_time": self.wall_time,
            "hessian_strategy": self.hessian_strategy,
            "fd_gradient": self.fd_gradient,
            "fd_jacobian": self.fd_jacobian,
            "message": self.message,
        }
        if history:
            out["history"] = [rec.as_dict() for rec in self.history]
        return out

    def to_json(self, history=True, **kwargs):
        return json.dumps(self.as_dict(history), **kwargs)

    def to_text(self):
        """Flat ``key: value`` document."""
        lines = []
        for key, value in self.as_dict(history=False).items():
            if isinstance(value, float):
                value = repr(value)
            elif isinstance(value, list):
                value = " ".join(repr(v) for v in value)
            lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"

    def csv_row(self):
        return {
            "problem": self.problem,
            "n": self.n,
            "m": self.m,
            "status": self.status,
            "nit": self.nit,
            "nf": self.nf,
            "nc": self.nc,
            "ng": self.ng,
            "res": self.res,
            "time_s": self.wall_time,
        }


def rho_ratio(l_new, l_old, m_alpha):
    """Achieved over predicted change of the Lagrangian; requires ``m_alpha < 0``."""
    if not m_alpha < 0:
        raise ValueError(f"rho is only defined for a negative model value, got {m_alpha}")
    return (l_new - l_old) / m_alpha


def update_sigma(rho, sigma, params):
    """New regularization weight; ``rho=None`` means the model did not predict decrease."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if rho is None or rho < params.eta1:
        return params.gamma2 * sigma
    if rho < params.eta2:
        return params.gamma1 * sigma
    return max(params.sigma_min, 0.5 * sigma)


@dataclass
class BfgsState:
    B: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None


def _damped_bfgs(B, s, y):
    Bs = B @ s
    sBs = float(s @ Bs)
    if sBs <= 0.0:
        return B
    sy = float(s @ y)
    theta = 1.0 if sy >= 0.2 * sBs else 0.8 * sBs / (sBs - sy)
    r = theta * y + (1.0 - theta) * Bs
    B = B - np.outer(Bs, Bs) / sBs + np.outer(r, r) / float(s @ r)
    return 0.5 * (B + B.T)


def resolve_strategy(problem, strategy):
    if strategy == "auto":
        return "exact" if problem.lagrangian_hessian is not None else "fd"
    if strategy == "exact" and problem.lagrangian_hessian is None:
        raise ConfigError(f"{problem.name}: exact Hessian requested but the problem provides none")
    return strategy


def lagrangian_hessian(problem, x, lam, strategy, state=None, counters=None, g=None, A=None):
    """Hessian of ``f - lam @ c`` (or an approximation) at ``x``.

    ``bfgs`` needs ``state`` (a :class:`BfgsState` owned by the solve) plus the
    current ``g`` and ``A``; the first call returns the identity.
    """
    counters = EvalCounters() if counters is None else counters
    strategy = resolve_strategy(problem, strategy)
    if strategy == "exact":
        counters.nh += 1
        H = np.asarray(problem.lagrangian_hessian(x, lam), dtype=float)
        if not np.all(np.isfinite(H)):
            raise EvaluationError("H", x)
        return 0.5 * (H + H.T)
    if strategy == "fd":
        return fd_lagrangian_hessian(problem, x, lam, counters)
    if strategy == "bfgs":
        if state is None or g is None or A is None:
            raise ValueError("bfgs strategy needs state, g and A")
        if state.B is None:
            state.B = np.eye(problem.n)
        elif state.x is not None:
            s = x - state.x
            y = (g - A.T @ lam) - (state.g - state.A.T @ lam)
            state.B = _damped_bfgs(state.B, s, y)
        state.x, state.g, state.A = np.array(x), np.array(g), np.array(A)
        return state.B.copy()
    raise ConfigError(f"unknown Hessian strategy {strategy!r}")


@dataclass
class _Point:
    x: np.ndarray
    f: float
    c: np.ndarray
    g: np.ndarray
    A: np.ndarray
    fac: object


def _point_at(problem, x, counters, rank_tol):
    ev = evaluate(problem, x, {"F", "C", "G", "A"}, counters)
    try:
        fac = factorize_jacobian(ev.A, rank_tol)
    except RankDeficientError:
        fac = None
    return _Point(np.asarray(x, dtype=float), ev.f, ev.c, ev.g, ev.A, fac)


def _check(cfg, ok, message):
    if not ok and cfg.check_invariants:
        raise InvariantViolation(message)
    return ok


def solve(problem, config=None):
    """Minimize ``problem`` from its start point.

    Parameters
    ----------
    problem : ProblemDef
    config : SolverConfig, optional

    Returns
    -------
    SolverReport
        Numerical trouble is reported through ``status``; only an invalid
        configuration or a non-finite start point raises.
    """
    cfg = SolverConfig() if config is None else config
    strategy = resolve_strategy(problem, cfg.hessian_strategy)
    counters = EvalCounters()
    start = time.perf_counter()

    pt = _point_at(problem, problem.x0, counters, cfg.rank_tol)
    h0 = float(np.linalg.norm(pt.c))
    h_max = cfg.h_max if cfg.h_max is not None else cfg.h_max_factor * max(1.0, h0)
    if not h_max > h0:
        raise ConfigError(f"h_max={h_max} must exceed the initial violation {h0}")
    filt = Filter(h_max, cfg.gamma_h, cfg.gamma_l)
    sigma = cfg.sigma0
    bfgs = BfgsState()
    history = []
    status = None
    message = ""
    stalls = 0
    k = 0

    def new_point(r):
        return _Point(r.x_new, r.f, r.c, r.g, r.A, r.fac)

    while True:
        h = float(np.linalg.norm(pt.c))

        if pt.fac is None:
            # full row rank fails at the current point: only restoration can move
            if k >= cfg.max_iter:
                status, message = RANK_DEFICIENT, "iteration budget exhausted at a rank-deficient point"
                res, l = math.nan, math.nan
                break
            r = restore(problem, pt.x, filt, counters, cfg)
            history.append(IterationRecord(k, h, math.nan, sigma, None, "restoration", math.nan, pt.f,
                                           restoration_trigger="rank", restoration_inner=r.inner_iterations))
            if r.status != RESTORED:
                status = RANK_DEFICIENT if r.rank_deficient else RESTORATION_FAILED
                message = f"restoration from a rank-deficient point: {r.status} {r.message}".strip()
                res, l = math.nan, math.nan
                break
            pt = new_point(r)
            k += 1
            continue

        kkt = kkt_quantities(pt.f, pt.g, pt.c, pt.fac)
        res, l = kkt.res, kkt.lagrangian_value
        if res <= cfg.epsilon:
            status = CONVERGED
            break
        if k >= cfg.max_iter:
            status = MAX_ITER
            break

        n_step = normal_step(pt.fac, pt.c)
        if not normal_step_condition(n_step, sigma, cfg.beta1, cfg.beta2, cfg.beta3):
            r = restore(problem, pt.x, filt, counters, cfg, sigma=sigma, require_normal_bound=True)
            history.append(IterationRecord(k, h, l, sigma, None, "restoration", res, pt.f,
                                           n_norm=float(np.linalg.norm(n_step)), restoration_trigger="normal-step",
                                           restoration_inner=r.inner_iterations))
            if r.status != RESTORED:
                status = RANK_DEFICIENT if r.rank_deficient else RESTORATION_FAILED
                message = f"{r.status} {r.message}".strip()
                break
            pt = new_point(r)
            k += 1
            continue

        try:
            H = lagrangian_hessian(problem, pt.x, kkt.lam, strategy, bfgs, counters, pt.g, pt.A)
        except EvaluationError as exc:
            status, message = RESTORATION_FAILED, f"Hessian evaluation failed: {exc}"
            break
        model = TangentialModel(pt.f, pt.g, H, sigma, pt.fac)
        sol = solve_reduced_arc(model)
        t = sol.t
        d = n_step + t

        if h > 0.0:
            try:
                dlam_d = directional_multiplier_derivative(problem, pt.x, d, kkt.lam, counters, cfg.rank_tol)
            except (RankDeficientError, EvaluationError) as exc:
                _log.debug("k=%d: multiplier derivative unavailable (%s), using zero", k, exc)
                dlam_d = np.zeros(problem.m)
        else:
            dlam_d = np.zeros(problem.m)

        # live checks of the step-computation guarantees
        H_norm = float(np.linalg.norm(H, 2))
        Z = pt.fac.Z
        min_eig = float(np.linalg.eigvalsh(Z.T @ H @ Z)[0]) if Z.shape[1] else math.inf
        psd = min_eig >= -1e-12 * max(1.0, H_norm)
        bound = cauchy_decrease_bound(kkt.pg_norm, H_norm, sigma)
        t_norm = float(np.linalg.norm(t))
        lin_res = float(np.linalg.norm(pt.A @ d + pt.c))
        _check(cfg, sol.decrease >= bound - 1e-12, f"k={k}: Cauchy decrease {sol.decrease} below bound {bound}")
        if psd:
            _check(cfg, t_norm <= np.sqrt(3.0 * kkt.pg_norm / sigma) + 1e-10, f"k={k}: tangential step too long")
        _check(cfg, lin_res <= 1e-9 * (1.0 + h), f"k={k}: A d + c = {lin_res}")

        ctx = SearchContext(pt.x, pt.g, t, d, H, sigma, pt.c, h, l, dlam_d, pt.f)
        alpha_min = compute_alpha_min(ctx, cfg)
        before = filt.snapshot()
        out = backtracking_search(ctx, filt, problem, counters, cfg, alpha_min)
        rec = IterationRecord(
            k, h, l, sigma, out.alpha, "", res, pt.f,
            pg_norm=kkt.pg_norm, n_norm=float(np.linalg.norm(n_step)), t_norm=t_norm, hess_norm=H_norm,
            model_decrease=sol.decrease, cauchy_decrease=sol.cauchy_decrease, cauchy_bound=bound,
            reduced_min_eig=min_eig, reduced_psd=psd, lin_residual=lin_res, c_norm=h,
            subproblem_status=sol.status, alpha_min=alpha_min, m_alpha=out.m_alpha,
            trials=out.trials, trial_log=out.trial_log,
        )
        history.append(rec)

        if out.kind == RESTORATION:
            rec.step_type = "restoration"
            rec.restoration_trigger = "alpha-min"
            filt.add(h, l)
            r = restore(problem, pt.x, filt, counters, cfg)
            rec.restoration_inner = r.inner_iterations
            if r.status != RESTORED:
                status = RANK_DEFICIENT if r.rank_deficient else RESTORATION_FAILED
                message = f"{r.status} {r.message}".strip()
                break
            if r.inner_iterations == 0:
                # restoration could not move; the step model was too optimistic
                sigma = cfg.gamma2 * sigma
            pt = new_point(r)
            k += 1
            continue

        trial = out.trial
        if out.kind == H_TYPE:
            rec.step_type = "h"
            rec.filter_before = before
            rec.accepted_pair = (trial.h, trial.l)
            filt.add(h, l)
            _check(cfg, h == 0.0 or filt.contains(h, l), f"k={k}: filter did not grow")
        else:
            rec.step_type = "f"
            _check(cfg, out.m_alpha < 0, f"k={k}: f-type step with non-negative model")

        if out.m_alpha < 0:
            rec.rho = rho_ratio(trial.l, l, out.m_alpha)
            sigma = update_sigma(rec.rho, sigma, cfg)
        else:
            sigma = update_sigma(None, sigma, cfg)

        step_norm = out.alpha * float(np.linalg.norm(d))
        stalls = stalls + 1 if step_norm <= 1e-15 * (1.0 + float(np.linalg.norm(pt.x))) else 0
        pt = _Point(trial.x, trial.f, trial.c, trial.g, trial.A, trial.fac)
        k += 1
        if stalls >= 2:
            status, message = MAX_ITER, "step length stagnated"
            h = float(np.linalg.norm(pt.c))
            kkt = kkt_quantities(pt.f, pt.g, pt.c, pt.fac)
            res = kkt.res
            break

    wall = time.perf_counter() - start
    return SolverReport(
        problem=problem.name,
        n=problem.n,
        m=problem.m,
        status=status,
        x_final=np.array(pt.x),
        f_final=float(pt.f),
        h_final=float(np.linalg.norm(pt.c)),
        res=float(res),
        nit=k,
        nf=counters.nf,
        nc=counters.nc,
        ng=counters.ng,
        nj=counters.nj,
        nh=counters.nh,
        wall_time=wall,
        history=history,
        hessian_strategy=strategy,
        fd_gradient=problem.gradient is None,
        fd_jacobian=problem.jacobian is None,
        message=message,
        filter=filt,
    )
