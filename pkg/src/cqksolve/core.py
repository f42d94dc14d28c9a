"""Problem data, the dual map x(lambda), and the dual residual phi(lambda).

The continuous quadratic knapsack problem (CQK) minimizes
``0.5 x'Dx - a'x`` subject to ``b'x = r`` and ``l <= x <= u`` with D a
positive diagonal matrix and b > 0.  Dualizing the single linear
constraint gives a piecewise-linear scalar equation ``phi(lam) = r``
whose root recovers the primal solution; everything in this module
supports evaluating that equation and its lateral derivatives.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "CqkInstance",
    "SimplexInstance",
    "PhiEval",
    "Breakpoints",
    "validate",
    "eval_x",
    "eval_phi",
    "initial_multiplier",
    "breakpoints",
    "simplex_as_cqk",
]


class DomainError(ValueError):
    """Problem data violates an invariant (bad sign, l > u, NaN, ...)."""

    def __init__(self, field, index, message):
        self.field = field
        self.index = index
        super().__init__(message)


@dataclass
class CqkInstance:
    """Data (d, a, b, l, u, r) of one CQK instance.

    Arrays share a common length n and floating dtype.  Infinite
    entries are allowed in l (as -inf) and u (as +inf) only.
    Instances are treated as immutable after construction.
    """

    d: np.ndarray
    a: np.ndarray
    b: np.ndarray
    l: np.ndarray
    u: np.ndarray
    r: float

    def __post_init__(self):
        dt = np.asarray(self.d).dtype
        if dt not in (np.float32, np.float64):
            dt = np.float64
        self.d = np.ascontiguousarray(self.d, dtype=dt)
        self.a = np.ascontiguousarray(self.a, dtype=dt)
        self.b = np.ascontiguousarray(self.b, dtype=dt)
        self.l = np.ascontiguousarray(self.l, dtype=dt)
        self.u = np.ascontiguousarray(self.u, dtype=dt)
        self.r = dt.type(self.r)

    @property
    def n(self):
        return self.d.shape[0]

    @property
    def dtype(self):
        return self.d.dtype

    @property
    def eps(self):
        return float(np.finfo(self.dtype).eps)


@dataclass
class SimplexInstance:
    """A point y to project onto the simplex {x >= 0, sum x = r}."""

    y: np.ndarray
    r: float

    def __post_init__(self):
        self.y = np.ascontiguousarray(self.y)
        if self.y.dtype not in (np.float32, np.float64):
            self.y = self.y.astype(np.float64)
        if self.y.ndim != 1 or self.y.shape[0] < 1:
            raise DomainError("y", None, "y must be a nonempty 1-d array")
        if not np.all(np.isfinite(self.y)):
            idx = int(np.flatnonzero(~np.isfinite(self.y))[0])
            raise DomainError("y", idx, f"y[{idx}] is not finite")
        if not self.r > 0:
            raise DomainError("r", None, f"simplex level r must be positive, got {self.r}")

    @property
    def n(self):
        return self.y.shape[0]


@dataclass
class PhiEval:
    """phi(lam) together with both lateral derivatives at lam."""

    value: float
    dminus: float
    dplus: float


@dataclass
class Breakpoints:
    """Finite slope-change locations of phi, tagged with variable indices.

    lower[i] = (d*l - a)/b for variables with finite l, upper likewise
    for finite u.  lower_idx/upper_idx give the originating variable.
    """

    lower: np.ndarray
    lower_idx: np.ndarray
    upper: np.ndarray
    upper_idx: np.ndarray


def validate(inst):
    """Raise DomainError on the first violated instance invariant."""
    arrays = {"d": inst.d, "a": inst.a, "b": inst.b, "l": inst.l, "u": inst.u}
    n = inst.d.shape[0]
    if n < 1:
        raise DomainError("d", None, "instance must have at least one variable")
    for name, arr in arrays.items():
        if arr.ndim != 1 or arr.shape[0] != n:
            raise DomainError(name, None, f"{name} must be 1-d of length {n}")
    for name in ("d", "a", "b"):
        arr = arrays[name]
        if not np.all(np.isfinite(arr)):
            idx = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DomainError(name, idx, f"{name}[{idx}] is not finite")
    for name, arr in (("l", inst.l), ("u", inst.u)):
        if np.any(np.isnan(arr)):
            idx = int(np.flatnonzero(np.isnan(arr))[0])
            raise DomainError(name, idx, f"{name}[{idx}] is NaN")
    if not np.isfinite(inst.r):
        raise DomainError("r", None, "r must be finite")
    bad = np.flatnonzero(~(inst.d > 0))
    if bad.size:
        i = int(bad[0])
        raise DomainError("d", i, f"d[{i}] = {inst.d[i]} must be positive")
    bad = np.flatnonzero(~(inst.b > 0))
    if bad.size:
        i = int(bad[0])
        raise DomainError("b", i, f"b[{i}] = {inst.b[i]} must be positive")
    bad = np.flatnonzero(~(inst.l <= inst.u))
    if bad.size:
        i = int(bad[0])
        raise DomainError("bounds", i, f"l[{i}] = {inst.l[i]} > u[{i}] = {inst.u[i]}")
    bad = np.flatnonzero(inst.l == np.inf)
    if bad.size:
        i = int(bad[0])
        raise DomainError("l", i, f"l[{i}] must be < +inf")
    bad = np.flatnonzero(inst.u == -np.inf)
    if bad.size:
        i = int(bad[0])
        raise DomainError("u", i, f"u[{i}] must be > -inf")


def eval_x(inst, lam, idx=None):
    """The primal minimizer x(lam), clipped componentwise to [l, u].

    With idx given, evaluates only those components.
    """
    if idx is None:
        d, a, b, l, u = inst.d, inst.a, inst.b, inst.l, inst.u
    else:
        d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
        l, u = inst.l[idx], inst.u[idx]
    t = (b * inst.dtype.type(lam) + a) / d
    return np.clip(t, l, u)


def _phi_scan(inst, lam, idx=None):
    """One pass over the (sub)instance at lam.

    Returns (value, dminus, dplus, abs_bx, at_lower, at_upper) where
    at_lower/at_upper flag components clamped at a bound, including
    exact ties.
    """
    if idx is None:
        d, a, b, l, u = inst.d, inst.a, inst.b, inst.l, inst.u
    else:
        d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
        l, u = inst.l[idx], inst.u[idx]
    lam = inst.dtype.type(lam)
    t = (b * lam + a) / d
    x = np.clip(t, l, u)
    bx = b * x
    value = float(bx.sum())
    abs_bx = float(np.abs(bx).sum())
    # at_lower: lam <= lb  <=>  t <= l (b, d > 0); interior strictly between
    at_lower = t <= l
    at_upper = t >= u
    w = b * b / d
    interior = ~(at_lower | at_upper)
    core = float(w[interior].sum())
    # ties: lam == lb adds to dplus only, lam == ub adds to dminus only;
    # degenerate l == u contributes to neither lateral derivative
    tie_lo = at_lower & (t == l) & (l < u)
    tie_hi = at_upper & (t == u) & (l < u)
    dplus = core + float(w[tie_lo].sum())
    dminus = core + float(w[tie_hi].sum())
    return value, dminus, dplus, abs_bx, at_lower, at_upper


def eval_phi(inst, lam, idx=None):
    """phi(lam) = b'x(lam) plus both lateral derivative sums.

    The derivative index sets follow the strict/non-strict breakpoint
    comparisons exactly: a variable contributes b^2/d to the right
    derivative when lb <= lam < ub and to the left one when
    lb < lam <= ub, where lb, ub are its breakpoints.  No epsilon
    fuzzing is applied at ties.
    """
    value, dminus, dplus, _, _, _ = _phi_scan(inst, lam, idx)
    return PhiEval(value=value, dminus=dminus, dplus=dplus)


def breakpoints(inst):
    """All finite breakpoints (d*bound - a)/b with their variable indices."""
    fin_l = np.flatnonzero(np.isfinite(inst.l))
    fin_u = np.flatnonzero(np.isfinite(inst.u))
    lower = (inst.d[fin_l] * inst.l[fin_l] - inst.a[fin_l]) / inst.b[fin_l]
    upper = (inst.d[fin_u] * inst.u[fin_u] - inst.a[fin_u]) / inst.b[fin_u]
    return Breakpoints(lower=lower, lower_idx=fin_l, upper=upper, upper_idx=fin_u)


def initial_multiplier(inst, xbar=None):
    """Initial multiplier (r - s)/q ignoring all bounds.

    s = sum b*a/d and q = sum b^2/d over a set J of indices: all of
    them by default, or the strictly interior components of the primal
    estimate xbar when one is given.  An empty interior set falls back
    to all indices, discarding xbar.
    """
    if xbar is not None:
        xbar = np.asarray(xbar)
        if xbar.shape != inst.d.shape:
            raise DomainError("xbar", None, "xbar must have length n")
        mask = (inst.l < xbar) & (xbar < inst.u)
        if mask.any():
            d, a, b = inst.d[mask], inst.a[mask], inst.b[mask]
            s = float(b @ (a / d))
            q = float(b @ (b / d))
            return (float(inst.r) - s) / q
    s = float(inst.b @ (inst.a / inst.d))
    q = float(inst.b @ (inst.b / inst.d))
    return (float(inst.r) - s) / q


def simplex_as_cqk(y, r):
    """Embed a simplex projection as a CQK instance (d=b=1, l=0, u=inf)."""
    y = np.ascontiguousarray(y)
    if y.dtype not in (np.float32, np.float64):
        y = y.astype(np.float64)
    n = y.shape[0]
    one = np.ones(n, dtype=y.dtype)
    return CqkInstance(
        d=one,
        a=y,
        b=one.copy(),
        l=np.zeros(n, dtype=y.dtype),
        u=np.full(n, np.inf, dtype=y.dtype),
        r=r,
    )
