import numpy as np
import pytest

from filterarc.config import SolverConfig
from filterarc.filter import Filter
from filterarc.kernels import factorize_jacobian, normal_step, normal_step_condition
from filterarc.problem import EvalCounters, ProblemDef
from filterarc.restoration import BUDGET_EXHAUSTED, INFEASIBLE_STATIONARY, RESTORED, restore

CFG = SolverConfig()


def linear_problem():
    B = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0]])
    b = np.array([3.0, 1.0])
    return ProblemDef("lin", 3, 2, [5.0, -2.0, 4.0], lambda x: x @ x, lambda x: B @ x - b,
                      gradient=lambda x: 2 * x, jacobian=lambda x: B)


def no_root_problem():
    return ProblemDef("noroot", 1, 1, [0.5], lambda x: float(x[0]), lambda x: np.array([x[0] ** 2 + 1.0]),
                      gradient=lambda x: np.ones(1), jacobian=lambda x: np.array([[2 * x[0]]]))


def circle_problem(x0):
    return ProblemDef("circle", 2, 1, x0, lambda x: x[0] + x[1], lambda x: np.array([x @ x - 1.0]),
                      gradient=lambda x: np.ones(2), jacobian=lambda x: 2.0 * x[None, :])


def seeded_filter(problem, x):
    h = float(np.linalg.norm(problem.constraints(np.asarray(x, dtype=float))))
    filt = Filter(1e4 * max(1.0, h))
    filt.add(h, problem.objective(np.asarray(x, dtype=float)))
    return filt


class TestRestore:
    def test_linear_one_gauss_newton_step(self):
        p = linear_problem()
        filt = seeded_filter(p, p.x0)
        res = restore(p, p.x0, filt, EvalCounters(), CFG)
        assert res.status == RESTORED
        assert res.inner_iterations == 1
        assert res.h_final <= 1e-12
        np.testing.assert_allclose(p.constraints(res.x_new), 0.0, atol=1e-12)

    def test_no_real_root(self):
        p = no_root_problem()
        filt = Filter(10.0)
        filt.add(1.0, -100.0)  # h >= 1 everywhere, so no point clears this entry
        res = restore(p, p.x0, filt, EvalCounters(), CFG)
        assert res.status == INFEASIBLE_STATIONARY
        assert res.h_final == pytest.approx(1.0, abs=1e-8)
        assert abs(res.x_new[0]) <= 1e-4

    def test_no_real_root_from_stationary_start(self):
        p = no_root_problem()
        res = restore(p, [0.0], seeded_filter(p, [0.0]), EvalCounters(), CFG)
        assert res.status == INFEASIBLE_STATIONARY
        assert res.inner_iterations == 0

    def test_already_acceptable(self):
        p = circle_problem([1.0, 0.0])
        cnt = EvalCounters()
        res = restore(p, p.x0, Filter(10.0), cnt, CFG)
        assert res.status == RESTORED
        assert res.inner_iterations == 0
        np.testing.assert_array_equal(res.x_new, p.x0)
        assert cnt.nf == 1

    def test_invariants_on_nonlinear_problem(self):
        p = circle_problem([2.0, 1.5])
        filt = seeded_filter(p, p.x0)
        filt.add(0.5, 100.0)
        cnt = EvalCounters()
        res = restore(p, p.x0, filt, cnt, CFG)
        assert res.status == RESTORED
        assert cnt.nf == 1  # objective only at the returned point
        assert res.h_final == pytest.approx(np.linalg.norm(p.constraints(res.x_new)), rel=1e-15)
        assert filt.acceptable(res.h_final, res.l)
        assert filt.margins_hold(res.h_final, res.l)
        hs = [h for _, h, _ in res.trace]
        assert all(b < a for a, b in zip(hs, hs[1:]))

    def test_normal_bound_enforced(self):
        p = circle_problem([2.0, 1.5])
        sigma = 1e4
        res = restore(p, p.x0, seeded_filter(p, p.x0), EvalCounters(), CFG, sigma=sigma, require_normal_bound=True)
        assert res.status == RESTORED
        fac = factorize_jacobian(p.jacobian(res.x_new))
        n = normal_step(fac, p.constraints(res.x_new))
        assert normal_step_condition(n, sigma, CFG.beta1, CFG.beta2, CFG.beta3)

    def test_normal_bound_needs_sigma(self):
        p = circle_problem([2.0, 1.5])
        with pytest.raises(ValueError):
            restore(p, p.x0, Filter(10.0), EvalCounters(), CFG, require_normal_bound=True)

    def test_budget(self):
        p = circle_problem([30.0, 20.0])
        res = restore(p, p.x0, seeded_filter(p, p.x0), EvalCounters(), CFG.replace(restoration_max_iter=1))
        # one Gauss-Newton step cannot reach the filter margin from this far out
        assert res.status in (RESTORED, BUDGET_EXHAUSTED)
        assert res.inner_iterations <= 1

    def test_nonfinite_start(self):
        p = circle_problem([1.0, 0.0])
        with pytest.raises(ValueError):
            restore(p, [np.nan, 0.0], Filter(10.0), EvalCounters(), CFG)
