"""Slow exact reference solvers, used only by tests and acceptance runs.

Both oracles exploit that the dual residual is piecewise linear with
slope changes only at the breakpoints: sorting the breakpoints and
bisecting with direct residual evaluations localizes the root on one
affine segment, where it is recovered by a single interpolation.  The
residual is evaluated from scratch here, independently of the solver
code paths it is used to check.
"""

import numpy as np

from .newton import Status

__all__ = ["oracle_lambda", "oracle_simplex"]


def _phi_direct(inst, lam):
    t = (inst.b * lam + inst.a) / inst.d
    return float(inst.b @ np.clip(t, inst.l, inst.u))


def oracle_lambda(inst):
    """Exact (status, lambda, x) by sorted-breakpoint bisection."""
    d = np.asarray(inst.d, dtype=np.float64)
    a = np.asarray(inst.a, dtype=np.float64)
    b = np.asarray(inst.b, dtype=np.float64)
    l = np.asarray(inst.l, dtype=np.float64)
    u = np.asarray(inst.u, dtype=np.float64)
    r = float(inst.r)
    w = b * b / d

    def phi(lam):
        return float(b @ np.clip((b * lam + a) / d, l, u))

    def result(lam):
        x = np.clip((b * lam + a) / d, l, u).astype(inst.dtype)
        return Status.SOLVED, float(lam), x

    bps = np.concatenate([
        (d[np.isfinite(l)] * l[np.isfinite(l)] - a[np.isfinite(l)]) / b[np.isfinite(l)],
        (d[np.isfinite(u)] * u[np.isfinite(u)] - a[np.isfinite(u)]) / b[np.isfinite(u)],
    ])
    if bps.size == 0:
        # no bounds at all: phi is globally affine with positive slope
        s = float(b @ (a / d))
        q = float(w.sum())
        return result((r - s) / q)
    bps = np.unique(bps)

    v_last = phi(bps[-1])
    if r > v_last:
        slope = float(w[u == np.inf].sum())
        if slope == 0.0:
            return Status.INFEASIBLE, None, None
        return result(bps[-1] + (r - v_last) / slope)

    v_first = phi(bps[0])
    if r < v_first:
        slope = float(w[l == -np.inf].sum())
        if slope == 0.0:
            return Status.INFEASIBLE, None, None
        return result(bps[0] - (v_first - r) / slope)

    # smallest breakpoint with phi >= r; phi is non-decreasing
    lo_i, hi_i = 0, bps.size - 1
    # invariant: phi(bps[hi_i]) >= r, phi(bps[lo_i - 1]) < r
    if v_first >= r:
        hi_i = 0
    else:
        while hi_i - lo_i > 1:
            mid = (lo_i + hi_i) // 2
            if phi(bps[mid]) >= r:
                hi_i = mid
            else:
                lo_i = mid
    v_hi = phi(bps[hi_i])
    if v_hi == r:
        # walk left over a possible plateau to its left endpoint
        while hi_i > 0 and phi(bps[hi_i - 1]) == r:
            hi_i -= 1
        return result(bps[hi_i])
    t_lo, t_hi = bps[hi_i - 1], bps[hi_i]
    v_lo = phi(t_lo)
    return result(t_lo + (r - v_lo) * (t_hi - t_lo) / (v_hi - v_lo))


def oracle_simplex(y, r):
    """Sort-based simplex projection (largest-k threshold rule)."""
    y = np.asarray(y)
    ys = np.sort(y.astype(np.float64))[::-1]
    csum = np.cumsum(ys)
    k = np.arange(1, y.shape[0] + 1)
    ok = ys + (r - csum) / k > 0
    kk = int(np.max(np.flatnonzero(ok))) + 1
    lam = (r - csum[kk - 1]) / kk
    return np.maximum(y.dtype.type(0), y + y.dtype.type(lam))
