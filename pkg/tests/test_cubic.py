import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterarc.cubic import (
    CAUCHY_ONLY,
    HARD_CASE,
    SECULAR,
    TangentialModel,
    cauchy_decrease_bound,
    cauchy_step,
    reduced_model_value,
    solve_reduced_arc,
    solve_reduced_cubic,
    tangential_model_value,
)
from filterarc.kernels import factorize_jacobian, project

from oracles import grid_cubic_minimum, random_full_rank


def model_with_pg(pg, H, sigma, f0=0.0):
    # the last coordinate is the constrained direction
    n = len(pg) + 1
    A = np.zeros((1, n))
    A[0, -1] = 1.0
    g = np.append(pg, 7.0)
    Hn = np.zeros((n, n))
    Hn[:-1, :-1] = H
    return TangentialModel(f0, g, Hn, sigma, factorize_jacobian(A))


def random_model(rng, p_max=8):
    p = int(rng.integers(1, p_max + 1))
    m = int(rng.integers(1, 4))
    A, fac = random_full_rank(rng, m, p + m)
    M = rng.standard_normal((p + m, p + m))
    H = 0.5 * (M + M.T) * rng.uniform(0.1, 5)
    g = rng.standard_normal(p + m) * rng.uniform(1e-3, 10)
    sigma = float(10 ** rng.uniform(-3, 3))
    return TangentialModel(float(rng.standard_normal()), g, H, sigma, fac)


def secular_residuals(g, H, sigma, red):
    w, nu = red.w, red.nu
    stat = np.linalg.norm((H + nu * np.eye(len(g))) @ w + g)
    return stat, abs(nu - sigma * np.linalg.norm(w))


class TestModelValue:
    def test_origin(self):
        assert tangential_model_value(np.zeros(2), 3.5, np.ones(2), np.eye(2), 2.0) == 3.5

    def test_arithmetic(self):
        val = tangential_model_value([-1.0, 0.0], 1.0, np.array([1.0, 0.0]), np.zeros((2, 2)), 1.0)
        assert val == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_zero_scaling(self):
        rng = np.random.default_rng(1)
        t = rng.standard_normal(4)
        H = rng.standard_normal((4, 4))
        assert tangential_model_value(0 * t, -2.0, rng.standard_normal(4), H + H.T, 0.3) == -2.0


class TestCauchyStep:
    def test_unit(self):
        model = model_with_pg([1.0, 0.0], np.zeros((2, 2)), 1.0)
        t_c, dec = cauchy_step(model)
        np.testing.assert_allclose(t_c, [-1.0, 0.0, 0.0], atol=1e-15)
        assert dec == pytest.approx(2.0 / 3.0, rel=1e-14)
        bound = cauchy_decrease_bound(1.0, 0.0, 1.0)
        assert bound == pytest.approx(0.5 / (6 * np.sqrt(2)), rel=1e-14)
        assert bound <= dec

    def test_zero_gradient(self):
        model = model_with_pg([0.0, 0.0], np.eye(2), 1.0)
        t_c, dec = cauchy_step(model)
        np.testing.assert_array_equal(t_c, 0.0)
        assert dec == 0.0

    def test_quadratic_formula(self):
        model = model_with_pg([2.0, 0.0], np.eye(2), 1.5)
        t_c, _ = cauchy_step(model)
        beta = (-4 + np.sqrt(208)) / 24
        np.testing.assert_allclose(t_c, [-2 * beta, 0.0, 0.0], rtol=1e-14)
        assert beta == pytest.approx(0.43426, abs=1e-5)

    def test_negative_curvature(self):
        model = model_with_pg([1.0], -np.ones((1, 1)) * 3.0, 0.5)
        t_c, dec = cauchy_step(model)
        betas = np.linspace(0, 20, 200001)
        phi = -betas + 0.5 * betas**2 * (-3.0) + 0.5 / 3 * betas**3
        assert dec == pytest.approx(-phi.min(), rel=1e-8)

    def test_decrease_bound_random(self):
        # 500 random models of reduced dimension at most 8
        rng = np.random.default_rng(2024)
        worst = np.inf
        for _ in range(500):
            model = random_model(rng)
            pg_norm = np.linalg.norm(model.pg)
            _, dec = cauchy_step(model)
            bound = cauchy_decrease_bound(pg_norm, np.linalg.norm(model.H, 2), model.sigma)
            worst = min(worst, dec - bound)
        assert worst >= -1e-12


class TestReducedSolver:
    def test_scalar(self):
        red = solve_reduced_cubic(np.array([-4.0]), np.array([[2.0]]), 3.0)
        w_star = (-2 + np.sqrt(4 + 48)) / 6
        assert w_star == pytest.approx(0.86852, abs=1e-5)
        np.testing.assert_allclose(red.w, [w_star], rtol=1e-12)
        assert red.nu == pytest.approx(3 * w_star, rel=1e-12)
        stat, coupling = secular_residuals(np.array([-4.0]), np.array([[2.0]]), 3.0, red)
        assert stat <= 1e-8 and coupling <= 1e-8
        assert red.status == SECULAR

    def test_zero_gradient_psd(self):
        red = solve_reduced_cubic(np.zeros(2), np.diag([1.0, 0.0]), 2.0)
        np.testing.assert_array_equal(red.w, 0.0)
        assert red.nu == 0.0

    def test_hard_case(self):
        g, H = np.array([0.0, 1.0]), np.diag([-1.0, 1.0])
        red = solve_reduced_cubic(g, H, 1.0)
        assert red.status == HARD_CASE
        assert red.nu == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(red.w) == pytest.approx(1.0, abs=1e-8)
        # positive first component is the deterministic tie-break
        np.testing.assert_allclose(red.w, [np.sqrt(3) / 2, -0.5], atol=1e-12)
        oracle, _ = grid_cubic_minimum(g, H, 1.0)
        assert reduced_model_value(red.w, g, H, 1.0) <= oracle + 1e-8

    def test_interior_root_is_not_the_solution(self):
        # the positive root of psi on nu < 1 would give an indefinite H + nu I
        nu_bad = (-1 + np.sqrt(5)) / 2
        assert nu_bad < 1.0
        red = solve_reduced_cubic(np.array([0.0, 1.0]), np.diag([-1.0, 1.0]), 1.0)
        assert red.nu > nu_bad

    def test_negative_definite_zero_gradient(self):
        red = solve_reduced_cubic(np.zeros(2), np.diag([-2.0, -1.0]), 4.0)
        assert red.nu == pytest.approx(2.0)
        assert np.linalg.norm(red.w) == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(100))
    def test_grid_oracle_2d(self, seed):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((2, 2))
        H = M + M.T
        g = rng.standard_normal(2)
        sigma = float(10 ** rng.uniform(-1, 1))
        red = solve_reduced_cubic(g, H, sigma)
        oracle, _ = grid_cubic_minimum(g, H, sigma)
        assert abs(reduced_model_value(red.w, g, H, sigma) - oracle) <= 1e-5
        stat, coupling = secular_residuals(g, H, sigma, red)
        assert stat <= 1e-8 * (1 + np.linalg.norm(g))
        assert coupling <= 1e-8 * (1 + red.nu)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**31 - 1), st.booleans())
    def test_optimality_conditions(self, p, seed, hard):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((p, p))
        H = M + M.T
        g = rng.standard_normal(p)
        if hard:
            lam, Q = np.linalg.eigh(H)
            g = g - Q[:, 0] * (Q[:, 0] @ g)
        sigma = float(10 ** rng.uniform(-2, 2))
        red = solve_reduced_cubic(g, H, sigma)
        tol = 1e-8
        stat, coupling = secular_residuals(g, H, sigma, red)
        assert stat <= tol * (1 + np.linalg.norm(g)) * max(1, np.abs(H).max())
        assert coupling <= tol * (1 + red.nu)
        assert red.nu >= max(0.0, -np.linalg.eigvalsh(H)[0]) - tol


class TestTangentialSolve:
    def test_square_jacobian(self):
        model = TangentialModel(2.0, np.array([1.0, 2.0]), np.eye(2), 1.0, factorize_jacobian(np.eye(2)))
        sol = solve_reduced_arc(model)
        np.testing.assert_array_equal(sol.t, 0.0)
        assert (sol.status, sol.decrease, sol.model_value) == (CAUCHY_ONLY, 0.0, 2.0)

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            TangentialModel(0.0, np.ones(2), np.eye(2), 0.0, factorize_jacobian(np.array([[1.0, 0.0]])))

    def test_random_invariants(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            model = random_model(rng)
            sol = solve_reduced_arc(model)
            _, dec_c = cauchy_step(model)
            A = model.fac.A
            assert np.linalg.norm(A @ sol.t) <= 1e-9 * max(np.linalg.norm(sol.t), 1e-300) * np.linalg.norm(A)
            assert sol.decrease >= dec_c - 1e-12 * (1 + abs(model.f0))
            assert sol.model_value <= model.f0
            direct = tangential_model_value(sol.t, model.f0, model.g, model.H, model.sigma)
            assert sol.model_value == pytest.approx(direct, abs=1e-10 * (1 + abs(direct)))

    def test_step_bound_when_reduced_hessian_psd(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(300):
            model = random_model(rng)
            Z = model.fac.Z
            if np.linalg.eigvalsh(Z.T @ model.H @ Z)[0] < 0:
                # shift into the PSD regime on the null space
                shift = -np.linalg.eigvalsh(Z.T @ model.H @ Z)[0] + rng.uniform(0, 1)
                model = TangentialModel(model.f0, model.g, model.H + shift * np.eye(len(model.g)), model.sigma, model.fac)
            sol = solve_reduced_arc(model)
            pg_norm = np.linalg.norm(project(model.fac, model.g))
            assert np.linalg.norm(sol.t) <= np.sqrt(3 * pg_norm / model.sigma) + 1e-10
            checked += 1
        assert checked == 300
