"""Dense simplex solver for max c^T x s.t. Ax <= b, x >= 0."""

import numpy as np
import pytest

from erlab.lp import LPUnboundedError, simplex_max


class TestWorkedProblems:
    def test_two_variable_textbook(self):
        # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        res = simplex_max(
            np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]]),
            np.array([4.0, 12.0, 18.0]),
            np.array([3.0, 5.0]),
        )
        np.testing.assert_allclose(res.x, [2.0, 6.0], atol=1e-10)
        np.testing.assert_allclose(res.objective, 36.0, atol=1e-10)

    def test_degenerate_vertex_terminates(self):
        # redundant constraint through the optimum
        res = simplex_max(
            np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 0.0]]),
            np.array([1.0, 1.0, 1.0]),
            np.array([1.0, 1.0]),
        )
        np.testing.assert_allclose(res.objective, 1.0, atol=1e-10)

    def test_zero_objective(self):
        res = simplex_max(np.eye(2), np.ones(2), np.zeros(2))
        np.testing.assert_allclose(res.objective, 0.0)

    def test_unbounded_raises(self):
        with pytest.raises(LPUnboundedError):
            simplex_max(np.array([[-1.0]]), np.array([1.0]), np.array([1.0]))


class TestDuality:
    def test_duals_price_the_constraints(self):
        a = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]])
        b = np.array([4.0, 12.0, 18.0])
        c = np.array([3.0, 5.0])
        res = simplex_max(a, b, c)
        # strong duality: b^T y == c^T x, and y is dual feasible
        np.testing.assert_allclose(b @ res.duals, res.objective, atol=1e-10)
        assert np.all(res.duals >= -1e-10)
        assert np.all(a.T @ res.duals >= c - 1e-10)

    def test_random_problems_satisfy_strong_duality(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            m, n = int(rng.integers(2, 7)), int(rng.integers(2, 7))
            a = rng.uniform(0.1, 2.0, size=(m, n))
            b = rng.uniform(0.5, 3.0, size=m)
            c = rng.uniform(0.1, 1.5, size=n)
            res = simplex_max(a, b, c)
            assert np.all(a @ res.x <= b + 1e-9)
            assert np.all(res.x >= -1e-12)
            np.testing.assert_allclose(b @ res.duals, res.objective, atol=1e-9)
            assert np.all(a.T @ res.duals >= c - 1e-9)
