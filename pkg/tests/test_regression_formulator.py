"""Unit tests for the regression QUBO formulation."""
import numpy as np
import pytest

from errors import DimensionMismatchError
from precision_encoder import parse_precision, representable_values
from qubo import evaluate, evaluate_many, index_to_bits
from qubo_solver import solve_exact
from regression_formulator import (
    RegressionProblem,
    decode_regression,
    formulate_regression,
    is_representable,
    regression_precision_matrix,
    regression_summation_energy,
    solve_regression_analytic,
    within_representable_range,
)


class TestRegressionProblem:
    """Test cases for RegressionProblem."""

    def test_intercept_column_last(self):
        prob = RegressionProblem(np.array([[2.0], [3.0]]), np.array([1.0, 1.0]))
        np.testing.assert_array_equal(prob.x_aug, [[2.0, 1.0], [3.0, 1.0]])
        assert prob.parameter_names() == ["w[0]", "w[1]"]

    def test_row_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            RegressionProblem(np.ones((3, 1)), np.ones(2))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            RegressionProblem(np.array([[np.nan]]), np.array([1.0]))


class TestFormulateRegression:
    """Test cases for formulate_regression."""

    def test_zero_data(self):
        prob = RegressionProblem(np.array([[0.0]]), np.array([0.0]))
        q = formulate_regression(prob, parse_precision("1"))

        np.testing.assert_array_equal(q.a, [[0.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(q.b, [0.0, 0.0])
        report = solve_exact(q)
        assert report.energy == 0.0
        assert report.all_optima == [[0, 0], [1, 0]]

    def test_toy_line_through_origin(self):
        prob = RegressionProblem(np.array([[1.0], [2.0]]), np.array([1.0, 2.0]))
        p = parse_precision("0.5,1")
        report = solve_exact(formulate_regression(prob, p))
        sol = decode_regression(prob, p, report.best)

        # Assertions
        np.testing.assert_array_equal(sol.w, [1.0, 0.0])
        assert sol.sse == 0.0
        assert report.best == [0, 1, 0, 0]

    def test_variable_count(self):
        prob = RegressionProblem(np.ones((5, 3)), np.ones(5))
        assert formulate_regression(prob, parse_precision("-2,-1,-0.5,0.5,1,2")).m == 24

    def test_encoding_equivalence_random_problems(self):
        """Test energy + Y^T Y equals the decoded SSE for every bit pattern of 50 problems."""
        rng = np.random.default_rng(123)
        vectors = ["1", "0.5,1", "-1,0.5,1", "-1,-0.5,0.5,1"]
        for trial in range(50):
            n = int(rng.integers(1, 11))
            d = int(rng.integers(1, 3))
            p = parse_precision(vectors[trial % len(vectors)])
            prob = RegressionProblem(rng.normal(size=(n, d)), rng.normal(size=n))
            q = formulate_regression(prob, p)
            pm = regression_precision_matrix(prob, p)

            bits = index_to_bits(np.arange(1 << q.m), q.m)
            energies = evaluate_many(q, bits)
            weights = bits.astype(float) @ pm.dense.T
            residuals = weights @ prob.x_aug.T - prob.y[None, :]
            sse = np.sum(residuals ** 2, axis=1)
            yty = float(prob.y @ prob.y)
            assert np.all(np.abs(energies + yty - sse) <= 1e-8 * (1.0 + abs(yty)))

    def test_summation_form_matches_matrix_form(self):
        rng = np.random.default_rng(5)
        prob = RegressionProblem(rng.normal(size=(4, 2)), rng.normal(size=4))
        p = parse_precision("-1,0.5,1")
        q = formulate_regression(prob, p)
        for _ in range(25):
            bits = rng.integers(0, 2, size=q.m)
            assert regression_summation_energy(prob, p, bits) == pytest.approx(evaluate(q, bits), abs=1e-9)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(7, 2))
        y = rng.normal(size=7)
        p = parse_precision("-1,-0.5,0.5,1")
        order = rng.permutation(7)
        q = formulate_regression(RegressionProblem(x, y), p)
        shuffled = formulate_regression(RegressionProblem(x[order], y[order]), p)
        np.testing.assert_allclose(shuffled.a, q.a, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(shuffled.b, q.b, rtol=1e-12, atol=1e-12)


class TestDecodeRegression:
    """Test cases for decode_regression."""

    def test_sse_equals_energy_plus_constant(self):
        rng = np.random.default_rng(2)
        prob = RegressionProblem(rng.normal(size=(6, 2)), rng.normal(size=6))
        p = parse_precision("-1,-0.5,0.5,1")
        q = formulate_regression(prob, p)
        bits = rng.integers(0, 2, size=q.m)
        sol = decode_regression(prob, p, bits, q)

        yty = float(prob.y @ prob.y)
        assert sol.sse == pytest.approx(sol.qubo_energy + yty, rel=1e-8, abs=1e-8)
        assert sol.to_dict()["intercept"] == sol.w[-1]

    def test_representable_analytic_solution_is_recovered(self):
        """Test 20 noise-free problems with representable weights reach the analytic SSE."""
        rng = np.random.default_rng(31)
        p = parse_precision("-1,-0.5,0.5,1")
        values = representable_values(p)
        for _ in range(20):
            d = int(rng.integers(1, 3))
            w_true = rng.choice(values, size=d + 1)
            x = rng.normal(size=(6, d))
            y = x @ w_true[:-1] + w_true[-1]
            prob = RegressionProblem(x, y)

            analytic = solve_regression_analytic(prob)
            report = solve_exact(formulate_regression(prob, p))
            sol = decode_regression(prob, p, report.best)
            assert sol.sse == pytest.approx(prob.sse(analytic), abs=1e-8)
            np.testing.assert_allclose(sol.w, w_true, atol=1e-12)


class TestAnalyticSolution:
    """Test cases for solve_regression_analytic."""

    def test_exact_line(self):
        prob = RegressionProblem(np.array([[1.0], [2.0]]), np.array([2.0, 4.0]))
        np.testing.assert_allclose(solve_regression_analytic(prob), [2.0, 0.0], atol=1e-12)

    def test_collinear_columns_use_minimum_norm(self):
        prob = RegressionProblem(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        w = solve_regression_analytic(prob)
        np.testing.assert_allclose(prob.x_aug @ w, [2.0, 2.0], atol=1e-10)
        np.testing.assert_allclose(w, [1.0, 1.0], atol=1e-10)

    def test_normal_equation_residual(self):
        rng = np.random.default_rng(0)
        prob = RegressionProblem(rng.normal(size=(20, 3)), rng.normal(size=20))
        w = solve_regression_analytic(prob)
        residual = prob.x_aug.T @ (prob.x_aug @ w - prob.y)
        assert np.max(np.abs(residual)) <= 1e-8


class TestRepresentability:
    """Test cases for the representability helpers."""

    def test_is_representable(self):
        p = parse_precision("-1,-0.5,0.5,1")
        assert is_representable([0.5, -1.5], p)
        assert not is_representable([0.6], p)

    def test_within_range(self):
        p = parse_precision("0.5,1")
        assert within_representable_range([0.2, 1.5], p)
        assert not within_representable_range([-0.1], p)
