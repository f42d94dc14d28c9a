import numpy as np
import pytest

from cqksolve import (
    Status,
    eval_x,
    oracle_lambda,
    oracle_simplex,
    simplex_as_cqk,
)

from test_core import box, random_instance


class TestOracleLambda:
    def test_two_var_hand_solution(self):
        inst = box([1, 2], [0, 0], [1, 1], [0, 0], [1, 1], 1.0)
        st, lam, x = oracle_lambda(inst)
        assert st is Status.SOLVED
        assert lam == pytest.approx(2 / 3, abs=1e-15)

    def test_pinned_infeasible(self):
        inst = box([1, 1], [0, 0], [1, 1], [0, 0], [0, 0], 1.0)
        st, lam, x = oracle_lambda(inst)
        assert st is Status.INFEASIBLE and lam is None and x is None

    def test_simplex_hand_solution(self):
        inst = simplex_as_cqk(np.array([0.5, 0.2, 0.9]), 1.0)
        st, lam, x = oracle_lambda(inst)
        assert lam == pytest.approx(-0.2, abs=1e-15)

    def test_unbounded_above(self):
        # all u = inf, root beyond the largest breakpoint
        inst = simplex_as_cqk(np.array([1.0, 2.0]), 10.0)
        st, lam, x = oracle_lambda(inst)
        assert st is Status.SOLVED
        assert float(x.sum()) == pytest.approx(10.0, abs=1e-12)

    def test_no_bounds_at_all(self):
        inst = box([1, 2], [1, 1], [1, 1], [-np.inf] * 2, [np.inf] * 2, 4.0)
        st, lam, x = oracle_lambda(inst)
        assert st is Status.SOLVED
        assert float(inst.b @ x) == pytest.approx(4.0, abs=1e-12)

    def test_plateau_returns_left_endpoint(self):
        # phi flat at value 3 on [1, 2] (var 0 saturated, var 1 not started)
        inst = box([1, 1], [0, 0], [1, 1], [0, 2], [1, 3], 3.0)
        st, lam, x = oracle_lambda(inst)
        assert st is Status.SOLVED
        assert lam == pytest.approx(1.0, abs=1e-15)

    def test_brute_force_agreement(self):
        rng = np.random.default_rng(0)
        for seed in range(50):
            inst = random_instance(seed, int(rng.integers(1, 15)))
            st, lam, x = oracle_lambda(inst)
            if st is not Status.SOLVED:
                continue
            # dense scan confirms lam solves phi = r to fine tolerance
            val = float(inst.b @ eval_x(inst, lam))
            scale = max(1.0, abs(float(inst.r)))
            assert abs(val - float(inst.r)) <= 1e-9 * scale


class TestOracleSimplex:
    def test_symmetric(self):
        np.testing.assert_allclose(oracle_simplex(np.zeros(3), 1.0),
                                   np.full(3, 1 / 3))

    def test_hand_solutions(self):
        np.testing.assert_allclose(oracle_simplex(np.array([2.0, 1.0]), 1.0),
                                   [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(
            oracle_simplex(np.array([0.5, 0.2, 0.9]), 1.0),
            [0.3, 0.0, 0.7], atol=1e-15)

    def test_self_consistency_with_cqk_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            y = rng.normal(0, 1, n)
            r = float(rng.uniform(0.1, 3))
            xs = oracle_simplex(y, r)
            st, lam, x = oracle_lambda(simplex_as_cqk(y, r))
            assert st is Status.SOLVED
            assert np.abs(xs - x).max() <= 1e-12 * max(1, np.abs(y).max())

    def test_kkt(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            y = rng.normal(0, 1, n)
            r = float(rng.uniform(0.1, 3))
            x = oracle_simplex(y, r)
            pos = x > 0
            i = int(np.argmax(x))
            lam = float(x[i] - y[i])
            scale = max(1.0, float(np.abs(y).max()))
            assert np.abs(x[pos] - (y[pos] + lam)).max() <= 1e-12 * scale
            assert np.all(y[~pos] + lam <= 1e-12 * scale)
