"""Equality-constrained NLP definition, counted evaluation and finite differences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

EPS = np.finfo(float).eps
SQRT_EPS = np.sqrt(EPS)
CBRT_EPS = np.cbrt(EPS)
QUART_EPS = EPS**0.25

__all__ = [
    "ProblemDef",
    "EvalCounters",
    "Evaluation",
    "EvaluationError",
    "DerivativeReport",
    "evaluate",
    "check_derivatives",
    "fd_gradient",
    "fd_jacobian",
    "fd_lagrangian_hessian",
]


class EvaluationError(ArithmeticError):
    """A problem function returned NaN or Inf.

    Attributes
    ----------
    member : str
        Which quantity failed: ``"F"``, ``"C"``, ``"G"``, ``"A"`` or ``"H"``.
    """

    def __init__(self, member, x=None):
        self.member = member
        self.x = None if x is None else np.array(x, dtype=float)
        super().__init__(f"non-finite value in {member}")


@dataclass(frozen=True)
class ProblemDef:
    """Minimize ``objective(x)`` subject to ``constraints(x) = 0``.

    ``gradient``, ``jacobian`` and ``lagrangian_hessian`` are optional; missing
    first derivatives are replaced by central differences. The Hessian map
    takes ``(x, lam)`` and returns the Hessian of ``f - lam @ c``.
    """

    name: str
    n: int
    m: int
    x0: np.ndarray
    objective: Callable
    constraints: Callable
    gradient: Optional[Callable] = None
    jacobian: Optional[Callable] = None
    lagrangian_hessian: Optional[Callable] = None

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float).reshape(-1)
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if self.n < 1:
            raise ValueError(f"{self.name}: n must be positive, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"{self.name}: need 1 <= m <= n, got m={self.m}, n={self.n}")
        if x0.shape != (self.n,):
            raise ValueError(f"{self.name}: x0 has length {x0.size}, expected {self.n}")

    @property
    def fd_gradient(self):
        return self.gradient is None

    @property
    def fd_jacobian(self):
        return self.jacobian is None


@dataclass
class EvalCounters:
    """Per-solve evaluation counts. Never share between solves."""

    nf: int = 0
    nc: int = 0
    ng: int = 0
    nj: int = 0
    nh: int = 0

    def as_dict(self):
        return {"nf": self.nf, "nc": self.nc, "ng": self.ng, "nj": self.nj, "nh": self.nh}


@dataclass
class Evaluation:
    f: Optional[float] = None
    c: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None


def _finite(value, member, x):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(member, x)
    return arr


def _fd_steps(x):
    return SQRT_EPS * (1.0 + np.abs(x))


def _call_f(problem, x, counters):
    counters.nf += 1
    return float(_finite(problem.objective(x), "F", x))


def _call_c(problem, x, counters):
    counters.nc += 1
    c = _finite(problem.constraints(x), "C", x).reshape(-1)
    if c.shape != (problem.m,):
        raise ValueError(f"{problem.name}: constraints returned shape {c.shape}, expected ({problem.m},)")
    return c


def fd_gradient(fun, x, steps=None):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    steps = _fd_steps(x) if steps is None else steps
    g = np.empty(x.size)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += steps[i]
        xm[i] -= steps[i]
        # the realized step, not the requested one
        g[i] = (fun(xp) - fun(xm)) / (xp[i] - xm[i])
    return g


def fd_jacobian(fun, x, steps=None):
    """Central-difference Jacobian of a vector function, rows are components."""
    x = np.asarray(x, dtype=float)
    steps = _fd_steps(x) if steps is None else steps
    cols = []
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += steps[i]
        xm[i] -= steps[i]
        cols.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (xp[i] - xm[i]))
    return np.column_stack(cols)


def _gradient(problem, x, counters):
    counters.ng += 1
    if problem.gradient is not None:
        g = problem.gradient(x)
    else:
        g = fd_gradient(lambda z: _call_f(problem, z, counters), x)
    g = _finite(g, "G", x).reshape(-1)
    if g.shape != (problem.n,):
        raise ValueError(f"{problem.name}: gradient has shape {g.shape}, expected ({problem.n},)")
    return g


def _jacobian(problem, x, counters):
    counters.nj += 1
    if problem.jacobian is not None:
        A = problem.jacobian(x)
    else:
        A = fd_jacobian(lambda z: _call_c(problem, z, counters), x)
    A = _finite(A, "A", x)
    A = A.reshape(problem.m, problem.n) if A.size == problem.m * problem.n else A
    if A.shape != (problem.m, problem.n):
        raise ValueError(f"{problem.name}: jacobian has shape {A.shape}, expected ({problem.m}, {problem.n})")
    return A


def evaluate(problem, x, request, counters):
    """Evaluate the requested members at ``x``.

    Parameters
    ----------
    problem : ProblemDef
    x : array_like, shape (n,)
    request : iterable of {"F", "C", "G", "A"}
    counters : EvalCounters
        Incremented once per requested member; finite-difference substitutes
        additionally charge the ``f``/``c`` calls they consume.

    Returns
    -------
    Evaluation

    Raises
    ------
    EvaluationError
        If any requested value is NaN or Inf.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({problem.n},)")
    request = set(request)
    if not request:
        raise ValueError("empty evaluation request")
    unknown = request - {"F", "C", "G", "A"}
    if unknown:
        raise ValueError(f"unknown evaluation members {sorted(unknown)}")
    out = Evaluation()
    if "F" in request:
        out.f = _call_f(problem, x, counters)
    if "C" in request:
        out.c = _call_c(problem, x, counters)
    if "G" in request:
        out.g = _gradient(problem, x, counters)
    if "A" in request:
        out.A = _jacobian(problem, x, counters)
    return out


@dataclass
class DerivativeReport:
    gradient_error: Optional[float]
    jacobian_error: Optional[float]
    tol: float
    gradient_entry_errors: Optional[np.ndarray] = field(default=None, repr=False)
    jacobian_entry_errors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def passed(self):
        errs = [e for e in (self.gradient_error, self.jacobian_error) if e is not None]
        return all(e <= self.tol for e in errs)


def _relative_errors(analytic, approx):
    # relative to the difference value, absolute below magnitude one
    return np.abs(analytic - approx) / np.maximum(1.0, np.abs(approx))


def check_derivatives(problem, x, tol=1e-5):
    """Compare analytic gradient/Jacobian against central differences.

    The relative error of each entry is ``|a - d| / max(1, |d|)``. Passes
    iff the largest error is at most ``tol``.
    """
    if problem.gradient is None and problem.jacobian is None:
        raise ValueError(f"{problem.name}: no analytic derivatives to check")
    x = np.asarray(x, dtype=float)
    f = lambda z: float(_finite(problem.objective(z), "F", z))
    c = lambda z: _finite(problem.constraints(z), "C", z).reshape(-1)
    steps = CBRT_EPS * (1.0 + np.abs(x))
    g_err = A_err = None
    g_entries = A_entries = None
    if problem.gradient is not None:
        g_entries = _relative_errors(_finite(problem.gradient(x), "G", x).reshape(-1), fd_gradient(f, x, steps))
        g_err = float(g_entries.max())
    if problem.jacobian is not None:
        A = _finite(problem.jacobian(x), "A", x).reshape(problem.m, problem.n)
        A_entries = _relative_errors(A, fd_jacobian(c, x, steps))
        A_err = float(A_entries.max())
    return DerivativeReport(g_err, A_err, tol, g_entries, A_entries)


def _second_differences(fun, x, steps):
    """Central second differences of a scalar function."""
    n = x.size
    E = np.diag(steps)
    f0 = fun(x)
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = (fun(x + E[i]) - 2.0 * f0 + fun(x - E[i])) / steps[i] ** 2
        for j in range(i):
            num = fun(x + E[i] + E[j]) - fun(x + E[i] - E[j]) - fun(x - E[i] + E[j]) + fun(x - E[i] - E[j])
            H[i, j] = H[j, i] = num / (4.0 * steps[i] * steps[j])
    return H


def fd_lagrangian_hessian(problem, x, lam, counters=None):
    """Symmetrized central-difference Hessian of ``f - lam @ c`` with ``lam`` fixed.

    With analytic first derivatives this differences the Lagrangian gradient
    ``g - A.T @ lam`` (``2n`` gradient and Jacobian evaluations). Otherwise it
    takes second differences of the Lagrangian value, since differencing a
    differenced gradient loses about half the remaining digits.
    """
    counters = EvalCounters() if counters is None else counters
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    counters.nh += 1

    if problem.gradient is None or problem.jacobian is None:

        def lagrangian(z):
            ev = evaluate(problem, z, {"F", "C"}, counters)
            return ev.f - lam @ ev.c

        H = _second_differences(lagrangian, x, QUART_EPS * (1.0 + np.abs(x)))
        return _finite(H, "H", x)

    def grad_lagrangian(z):
        ev = evaluate(problem, z, {"G", "A"}, counters)
        return ev.g - ev.A.T @ lam

    # cube-root step balances truncation and cancellation for first derivatives
    steps = CBRT_EPS * (1.0 + np.abs(x))
    M = fd_jacobian(grad_lagrangian, x, steps)
    H = 0.5 * (M + M.T)
    return _finite(H, "H", x)
