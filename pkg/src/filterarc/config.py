"""Solver constants."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Optional

__all__ = ["ConfigError", "SolverConfig", "HESSIAN_STRATEGIES"]

HESSIAN_STRATEGIES = ("auto", "exact", "fd", "bfgs")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm constants with their defaults.

    ``epsilon``, ``beta1..3``, ``gamma_h``, ``kappa_h`` and ``eta1/eta2`` are
    the values used in the published experiments; the rest are free choices
    inside the admissible ranges checked in ``__post_init__``.
    """

    epsilon: float = 1e-6
    beta1: float = 0.1
    beta2: float = 100.0
    beta3: float = 0.01
    gamma_h: float = 1e-5
    gamma_l: float = 1e-5
    kappa_h: float = 1e-4
    eta1: float = 0.01
    eta2: float = 0.9
    varsigma: float = 2.01
    phi: float = 2.01
    omega: float = 1.0
    tau: float = 1.0
    mu: float = 1e-4
    mu_alpha: float = 1.0
    omega1: float = 0.5
    omega2: float = 0.5
    gamma1: float = 2.0
    gamma2: float = 5.0
    sigma0: float = 1.0
    sigma_min: float = 1e-8
    h_max_factor: float = 1e4
    h_max: Optional[float] = None
    max_iter: int = 500
    restoration_max_iter: int = 100
    hessian_strategy: str = "auto"
    rank_tol: float = 1e-10
    # backtracking never tries steps shorter than this, even when alpha_min is 0
    min_step: float = 1e-14
    check_invariants: bool = False

    def __post_init__(self):
        checks = [
            (1 < self.gamma1 <= self.gamma2, "1 < gamma1 <= gamma2"),
            (0 < self.eta1 < self.eta2 < 1, "0 < eta1 < eta2 < 1"),
            (0 < self.beta1 <= 1, "beta1 in (0, 1]"),
            (self.beta2 > 0, "beta2 > 0"),
            (0 < self.beta3 < 1, "beta3 in (0, 1)"),
            (self.varsigma > 2, "varsigma > 2"),
            (self.phi > 2, "phi > 2"),
            (self.omega >= 1, "omega >= 1"),
            (self.tau >= 1, "tau >= 1"),
            (0 < self.gamma_h < 1, "gamma_h in (0, 1)"),
            (0 < self.gamma_l < 1, "gamma_l in (0, 1)"),
            (0 < self.mu < 1, "mu in (0, 1)"),
            (0 < self.mu_alpha <= 1, "mu_alpha in (0, 1]"),
            (self.kappa_h > 0, "kappa_h > 0"),
            (0 < self.omega1 <= self.omega2 < 1, "0 < omega1 <= omega2 < 1"),
            (0 < self.sigma_min <= self.sigma0, "0 < sigma_min <= sigma0"),
            (self.epsilon > 0, "epsilon > 0"),
            (self.h_max_factor > 1, "h_max_factor > 1"),
            (self.h_max is None or self.h_max > 0, "h_max > 0"),
            (self.max_iter >= 0, "max_iter >= 0"),
            (self.restoration_max_iter >= 0, "restoration_max_iter >= 0"),
            (self.hessian_strategy in HESSIAN_STRATEGIES, f"hessian_strategy in {HESSIAN_STRATEGIES}"),
            (self.rank_tol > 0, "rank_tol > 0"),
            (self.min_step >= 0, "min_step >= 0"),
        ]
        failed = [msg for ok, msg in checks if not ok]
        if failed:
            raise ConfigError("invalid solver configuration: " + "; ".join(failed))

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)
