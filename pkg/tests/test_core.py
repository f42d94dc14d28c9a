import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqksolve import (
    CqkInstance,
    DomainError,
    breakpoints,
    eval_phi,
    eval_x,
    initial_multiplier,
    simplex_as_cqk,
    validate,
)


def box(d, a, b, l, u, r):
    return CqkInstance(d=np.array(d, float), a=np.array(a, float),
                       b=np.array(b, float), l=np.array(l, float),
                       u=np.array(u, float), r=r)


TWO_VAR = box([1, 2], [0, 0], [1, 1], [0, 0], [1, 1], 1.0)


class TestValidate:
    def test_valid_instance_passes(self):
        validate(box([1, 1], [0, 0], [1, 1], [0, 0], [1, 1], 1.0))

    def test_negative_d(self):
        with pytest.raises(DomainError) as e:
            validate(box([1, -1], [0, 0], [1, 1], [0, 0], [1, 1], 1.0))
        assert e.value.field == "d" and e.value.index == 1

    def test_crossed_bounds(self):
        with pytest.raises(DomainError) as e:
            validate(box([1], [0], [1], [2], [1], 1.0))
        assert e.value.field == "bounds" and e.value.index == 0

    def test_nonpositive_b(self):
        with pytest.raises(DomainError):
            validate(box([1], [0], [0], [0], [1], 1.0))

    def test_infinite_r(self):
        with pytest.raises(DomainError):
            validate(box([1], [0], [1], [0], [1], np.inf))


class TestEvalX:
    def test_interior_point(self):
        np.testing.assert_allclose(eval_x(TWO_VAR, 2 / 3), [2 / 3, 1 / 3])

    def test_saturates_at_upper(self):
        assert np.array_equal(eval_x(TWO_VAR, 100.0), TWO_VAR.u)

    def test_simplex_embedding(self):
        inst = simplex_as_cqk(np.array([1.0, 2.0, 3.0]), 1.0)
        np.testing.assert_allclose(eval_x(inst, -2.0), [0, 0, 1])

    def test_subset_indexing(self):
        full = eval_x(TWO_VAR, 0.4)
        part = eval_x(TWO_VAR, 0.4, np.array([1]))
        assert part[0] == full[1]


class TestEvalPhi:
    def test_simplex_at_breakpoint(self):
        inst = simplex_as_cqk(np.array([1.0, 2.0, 3.0]), 1.0)
        ph = eval_phi(inst, -2.0)
        assert ph.value == 1.0
        assert ph.dplus == 2.0
        assert ph.dminus == 1.0

    def test_below_all_breakpoints(self):
        ph = eval_phi(TWO_VAR, -10.0)
        assert ph.value == float(TWO_VAR.b @ TWO_VAR.l)
        assert ph.dplus == 0.0 and ph.dminus == 0.0

    def test_interior_segment(self):
        ph = eval_phi(TWO_VAR, 2 / 3)
        assert ph.value == pytest.approx(1.0, abs=1e-15)
        assert ph.dplus == 1.5 and ph.dminus == 1.5

    def test_degenerate_box_no_derivative(self):
        inst = box([1, 1], [0, 0], [1, 1], [0, 0], [0, 0], 0.0)
        ph = eval_phi(inst, 0.0)
        assert ph.value == 0.0
        assert ph.dplus == 0.0 and ph.dminus == 0.0


class TestBreakpoints:
    def test_two_var(self):
        bp = breakpoints(TWO_VAR)
        np.testing.assert_array_equal(bp.lower, [0, 0])
        np.testing.assert_array_equal(bp.upper, [1, 2])

    def test_simplex_upper_empty(self):
        inst = simplex_as_cqk(np.array([1.0, 2.0]), 1.0)
        np.testing.assert_array_equal(inst.l, [0, 0])
        bp = breakpoints(inst)
        np.testing.assert_array_equal(bp.lower, [-1, -2])
        assert bp.upper.size == 0

    def test_degenerate(self):
        inst = box([1, 1], [0, 0], [1, 1], [0, 0], [0, 0], 0.0)
        bp = breakpoints(inst)
        assert np.all(bp.lower == 0) and np.all(bp.upper == 0)


class TestInitialMultiplier:
    def test_simplex_formula(self):
        inst = simplex_as_cqk(np.array([1.0, 2.0, 3.0]), 1.0)
        assert initial_multiplier(inst) == pytest.approx(-5 / 3)

    def test_symmetric(self):
        n = 7
        inst = box(np.ones(n), np.zeros(n), np.ones(n),
                   np.zeros(n), np.full(n, 10.0), float(n))
        assert initial_multiplier(inst) == pytest.approx(1.0)

    def test_xbar_all_at_bounds_falls_back(self):
        cold = initial_multiplier(TWO_VAR)
        warm = initial_multiplier(TWO_VAR, xbar=np.array([0.0, 1.0]))
        assert warm == cold

    def test_xbar_interior_subset(self):
        # only variable 0 interior: lam = (r - 0)/1 = r
        lam = initial_multiplier(TWO_VAR, xbar=np.array([0.5, 1.0]))
        assert lam == pytest.approx(1.0)


def random_instance(draw_seed, n):
    rng = np.random.default_rng(draw_seed)
    d = rng.uniform(0.5, 3.0, n)
    a = rng.normal(0.0, 2.0, n)
    b = rng.uniform(0.5, 3.0, n)
    lo = rng.normal(0.0, 1.0, n)
    hi = lo + rng.uniform(0.0, 2.0, n)
    r = float(b @ lo + rng.uniform(0, 1) * (b @ hi - b @ lo))
    return box(d, a, b, lo, hi, r)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30),
       lam1=st.floats(-20, 20), lam2=st.floats(-20, 20))
def test_phi_monotone(seed, n, lam1, lam2):
    inst = random_instance(seed, n)
    lo, hi = min(lam1, lam2), max(lam1, lam2)
    assert eval_phi(inst, lo).value <= eval_phi(inst, hi).value + 1e-12


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30),
       lam=st.floats(-20, 20))
def test_phi_equals_b_dot_x(seed, n, lam):
    inst = random_instance(seed, n)
    x = eval_x(inst, lam)
    val = eval_phi(inst, lam).value
    tol = n * 4 * inst.eps * max(1.0, float(np.abs(inst.b * x).sum()))
    assert abs(val - float(inst.b @ x)) <= tol


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30),
       lam=st.floats(-50, 50))
def test_eval_x_in_box(seed, n, lam):
    inst = random_instance(seed, n)
    x = eval_x(inst, lam)
    assert np.all(x >= inst.l) and np.all(x <= inst.u)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 20))
def test_right_derivative_predicts_phi(seed, n):
    inst = random_instance(seed, n)
    bp = breakpoints(inst)
    pts = np.sort(np.concatenate([bp.lower, bp.upper]))
    # probe the middle of each interior segment
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo < 1e-9:
            continue
        lam = 0.5 * (lo + hi)
        h = 0.25 * (hi - lo)
        ph = eval_phi(inst, lam)
        pred = ph.value + h * ph.dplus
        actual = eval_phi(inst, lam + h).value
        tol = n * 8 * inst.eps * max(1.0, abs(actual))
        assert abs(pred - actual) <= tol
        assert ph.dplus == ph.dminus  # no breakpoint at a midpoint


def test_plateau_has_zero_derivatives():
    # between upper bp of var 0 (=1) and lower bp of var 1 (=2)
    inst = box([1, 1], [0, 0], [1, 1], [0, 2], [1, 3], 2.0)
    ph = eval_phi(inst, 1.5)
    assert ph.dplus == 0.0 and ph.dminus == 0.0
    assert ph.value == eval_phi(inst, 1.6).value
