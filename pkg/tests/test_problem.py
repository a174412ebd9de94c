import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterarc.problem import (
    EvalCounters,
    EvaluationError,
    ProblemDef,
    check_derivatives,
    evaluate,
    fd_gradient,
    fd_lagrangian_hessian,
)


def make(objective, constraints, n, m, **kw):
    return ProblemDef("T", n, m, np.zeros(n), objective, constraints, **kw)


class TestProblemDef:
    def test_rejects_more_constraints_than_variables(self):
        with pytest.raises(ValueError):
            ProblemDef("T", 1, 2, [0.0], lambda x: 0.0, lambda x: x)

    def test_rejects_bad_start(self):
        with pytest.raises(ValueError):
            ProblemDef("T", 2, 1, [0.0], lambda x: 0.0, lambda x: x[:1])

    def test_start_is_read_only(self):
        p = make(lambda x: 0.0, lambda x: x[:1], 2, 1)
        with pytest.raises(ValueError):
            p.x0[0] = 1.0

    def test_fd_flags(self):
        p = make(lambda x: 0.0, lambda x: x[:1], 2, 1, gradient=lambda x: np.zeros(2))
        assert not p.fd_gradient
        assert p.fd_jacobian


class TestEvaluate:
    def test_objective(self):
        p = make(lambda x: x[0] ** 2 + x[1] ** 2, lambda x: x[:1], 2, 1)
        cnt = EvalCounters()
        ev = evaluate(p, [1.0, 2.0], {"F"}, cnt)
        assert ev.f == 5.0
        assert cnt.as_dict() == {"nf": 1, "nc": 0, "ng": 0, "nj": 0, "nh": 0}
        assert ev.c is None and ev.g is None

    def test_constraints(self):
        p = make(lambda x: 0.0, lambda x: np.array([x[0] + x[1] - 2.0]), 2, 1)
        cnt = EvalCounters()
        ev = evaluate(p, [0.0, 0.0], {"C"}, cnt)
        np.testing.assert_array_equal(ev.c, [-2.0])
        assert cnt.nc == 1

    def test_fd_gradient_fallback(self):
        p = make(lambda x: x[0] ** 2, lambda x: x[:1], 2, 1)
        cnt = EvalCounters()
        ev = evaluate(p, [3.0, 0.0], {"G"}, cnt)
        np.testing.assert_allclose(ev.g, [6.0, 0.0], atol=1e-6)
        assert cnt.ng == 1
        assert cnt.nf == 4  # two calls per coordinate

    def test_fd_jacobian_fallback(self):
        p = make(lambda x: 0.0, lambda x: np.array([x[0] * x[1]]), 2, 1)
        cnt = EvalCounters()
        ev = evaluate(p, [2.0, 3.0], {"A"}, cnt)
        np.testing.assert_allclose(ev.A, [[3.0, 2.0]], atol=1e-6)
        assert (cnt.nj, cnt.nc) == (1, 4)

    def test_nonfinite_is_error(self):
        p = make(lambda x: np.nan, lambda x: x[:1], 2, 1)
        with pytest.raises(EvaluationError) as info:
            evaluate(p, [0.0, 0.0], {"C", "F"}, EvalCounters())
        assert info.value.member == "F"

    def test_empty_request(self):
        p = make(lambda x: 0.0, lambda x: x[:1], 2, 1)
        with pytest.raises(ValueError):
            evaluate(p, [0.0, 0.0], set(), EvalCounters())

    def test_central_difference_oracle(self):
        f = lambda x: np.sin(x[0]) * np.exp(x[1])
        x = np.array([0.3, -0.2])
        h = 1e-5
        oracle = [(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)]
        np.testing.assert_allclose(fd_gradient(f, x), oracle, rtol=1e-6)


class TestCheckDerivatives:
    def test_correct_gradient_passes(self):
        p = make(lambda x: x[0] * x[1], lambda x: x[:1], 2, 1, gradient=lambda x: np.array([x[1], x[0]]))
        rep = check_derivatives(p, [2.0, 3.0], tol=1e-5)
        assert rep.passed
        assert rep.gradient_error <= 1e-7

    def test_doubled_gradient_fails(self):
        p = make(lambda x: x[0] * x[1], lambda x: x[:1], 2, 1, gradient=lambda x: 2 * np.array([x[1], x[0]]))
        rep = check_derivatives(p, [2.0, 3.0], tol=1e-5)
        assert not rep.passed
        assert rep.gradient_error == pytest.approx(1.0, abs=1e-6)

    def test_linear_jacobian_exact(self):
        B = np.array([[1.0, -2.0, 0.5], [3.0, 0.0, 1.0]])
        b = np.array([1.0, 2.0])
        p = make(lambda x: 0.0, lambda x: B @ x - b, 3, 2, jacobian=lambda x: B)
        rep = check_derivatives(p, [0.4, -1.0, 2.0])
        assert rep.jacobian_error <= 1e-9
        assert rep.gradient_error is None

    def test_needs_some_derivative(self):
        p = make(lambda x: 0.0, lambda x: x[:1], 2, 1)
        with pytest.raises(ValueError):
            check_derivatives(p, [0.0, 0.0])


class TestFdLagrangianHessian:
    def test_quadratic(self):
        D = np.diag([2.0, 4.0])
        p = make(lambda x: 0.5 * x @ D @ x, lambda x: np.array([x[0] + x[1]]), 2, 1,
                 gradient=lambda x: D @ x, jacobian=lambda x: np.array([[1.0, 1.0]]))
        H = fd_lagrangian_hessian(p, [0.7, -1.3], [2.5])
        np.testing.assert_allclose(H, D, atol=1e-5)

    def test_linear_vanishes(self):
        p = make(lambda x: x[0] - x[1], lambda x: np.array([2 * x[0] + x[1]]), 2, 1)
        H = fd_lagrangian_hessian(p, [1.0, 2.0], [3.0])
        np.testing.assert_allclose(H, 0.0, atol=1e-6)

    def test_cancellation_entry(self):
        # d2/dx1^2 of x1^2 x2 - (x1^2 - 1) at (1, 1) is 2 x2 - 2 = 0
        p = make(lambda x: x[0] ** 2 * x[1], lambda x: np.array([x[0] ** 2 - 1.0]), 2, 1,
                 gradient=lambda x: np.array([2 * x[0] * x[1], x[0] ** 2]),
                 jacobian=lambda x: np.array([[2 * x[0], 0.0]]))
        cnt = EvalCounters()
        H = fd_lagrangian_hessian(p, [1.0, 1.0], [1.0], cnt)
        np.testing.assert_allclose(H, [[0.0, 2.0], [2.0, 0.0]], atol=1e-6)
        np.testing.assert_array_equal(H, H.T)
        assert cnt.nh == 1

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=3, max_size=3))
    def test_matches_analytic_cubic(self, x):
        x = np.array(x)
        f = lambda z: z[0] ** 3 + z[0] * z[1] * z[2]
        g = lambda z: np.array([3 * z[0] ** 2 + z[1] * z[2], z[0] * z[2], z[0] * z[1]])
        p = ProblemDef("T", 3, 1, np.zeros(3), f, lambda z: np.array([z.sum()]), gradient=g,
                       jacobian=lambda z: np.ones((1, 3)))
        exact = np.array([[6 * x[0], x[2], x[1]], [x[2], 0, x[0]], [x[1], x[0], 0]])
        np.testing.assert_allclose(fd_lagrangian_hessian(p, x, [1.0]), exact, atol=1e-5 * (1 + np.abs(x).max()) ** 2)
