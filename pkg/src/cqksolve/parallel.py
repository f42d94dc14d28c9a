"""Data-parallel execution of the Newton solvers.

Two schemes:

* a chunked fork-join solve: each worker owns a contiguous chunk of the
  variables, computes its partial residual/derivative sums at the
  shared multiplier (the map phase) and applies local variable fixing;
  the partials are combined in a fixed pairwise order (the reduce
  phase) and a single global multiplier update -- bracket, Newton,
  secant safeguard, breakpoint fallback -- runs exactly as in the
  sequential method.  Chunks whose active count falls below a merge
  threshold are coalesced between iterations.

* a fixing-free Jacobi variant: no index lists at all, every residual
  evaluation is a stateless map over all n variables followed by a
  reduction, and the final primal point is one more map.  This is the
  CPU twin of a GPU kernel: per-element work depends only on the
  multiplier and that element's data.

One barrier per iteration (the executor join); the multiplier update
has a single writer.  All reductions use a fixed-order pairwise tree,
so repeated runs with the same chunk layout are bit-identical.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import initial_multiplier, validate
from .newton import (
    MaxIterationsError,
    SolveOutcome,
    SolverOptions,
    Status,
    secant_step,
)
from .simplex import InitResult, _init_lambda_kernel

__all__ = [
    "ChunkState",
    "par_solve_cqk",
    "par_simplex_init",
    "jacobi_solve",
    "resolve_workers",
]

MERGE_THRESHOLD = 1024


def resolve_workers(workers=None):
    """Explicit argument beats the CQK_WORKERS environment variable."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("CQK_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def _tree_sum(values):
    """Pairwise reduction in a fixed order, independent of scheduling."""
    vals = list(values)
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


@dataclass
class ChunkState:
    """Variables owned by one worker and their active subset."""

    active: np.ndarray


def _chunk_ranges(n, workers):
    edges = np.linspace(0, n, workers + 1).astype(np.int64)
    return [(int(edges[k]), int(edges[k + 1]))
            for k in range(workers) if edges[k + 1] > edges[k]]


def _scan_chunk(inst, idx, lam):
    d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
    l, u = inst.l[idx], inst.u[idx]
    t = (b * inst.dtype.type(lam) + a) / d
    x = np.clip(t, l, u)
    bx = b * x
    at_lower = t <= l
    at_upper = t >= u
    w = b * b / d
    interior = ~(at_lower | at_upper)
    tie_lo = at_lower & (t == l) & (l < u)
    tie_hi = at_upper & (t == u) & (l < u)
    core = float(w[interior].sum())
    return (
        float(bx.sum()),
        core + float(w[tie_hi].sum()),   # dminus
        core + float(w[tie_lo].sum()),   # dplus
        float(np.abs(bx).sum()),
        at_lower,
        at_upper,
    )


def _fix_chunk(inst, chunk, lam, direction, mask, x_out):
    """Clamp the chunk's provably bound variables; returns (sum, abs, count)."""
    idx = chunk.active
    if direction == "lower":
        mask = mask & np.isfinite(inst.l[idx])
        bound = inst.l
    else:
        mask = mask & np.isfinite(inst.u[idx])
        bound = inst.u
    if not mask.any():
        return 0.0, 0.0, 0
    newly = idx[mask]
    vals = bound[newly]
    contrib = inst.b[newly] * vals
    chunk.active = idx[~mask]
    x_out[newly] = vals
    return float(contrib.sum()), float(np.abs(contrib).sum()), int(newly.size)


def _nearest_chunk(inst, idx, edge, right):
    d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
    best = None
    for bound in (inst.l[idx], inst.u[idx]):
        fin = np.isfinite(bound)
        if not fin.any():
            continue
        bp = (d[fin] * bound[fin] - a[fin]) / b[fin]
        bp = bp[bp > edge] if right else bp[bp < edge]
        if bp.size:
            cand = float(bp.min()) if right else float(bp.max())
            if best is None:
                best = cand
            else:
                best = min(best, cand) if right else max(best, cand)
    return best


def _parallel_lambda0(inst, chunks, pool, xbar):
    """Formula initializer via per-chunk partial sums."""
    def partial(idx):
        d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
        s_all = float(b @ (a / d))
        q_all = float(b @ (b / d))
        if xbar is None:
            return s_all, q_all, s_all, q_all, idx.size
        m = (inst.l[idx] < xbar[idx]) & (xbar[idx] < inst.u[idx])
        if m.any():
            s_j = float(b[m] @ (a[m] / d[m]))
            q_j = float(b[m] @ (b[m] / d[m]))
            return s_all, q_all, s_j, q_j, int(m.sum())
        return s_all, q_all, 0.0, 0.0, 0

    parts = list(pool.map(partial, [c.active for c in chunks]))
    s_all = _tree_sum(p[0] for p in parts)
    q_all = _tree_sum(p[1] for p in parts)
    count_j = sum(p[4] for p in parts)
    if xbar is not None and count_j > 0:
        s = _tree_sum(p[2] for p in parts)
        q = _tree_sum(p[3] for p in parts)
        return (float(inst.r) - s) / q
    return (float(inst.r) - s_all) / q_all


def par_solve_cqk(inst, opts=None, workers=None, xbar=None, check=True,
                  merge_threshold=MERGE_THRESHOLD):
    """Chunked fork-join variant of solve_cqk; same outcome contract."""
    if opts is None:
        opts = SolverOptions()
    if check:
        validate(inst)
    workers = resolve_workers(workers)
    n = inst.n
    tau = opts.tau(inst.dtype)
    r_orig = float(inst.r)
    if xbar is not None:
        xbar = np.asarray(xbar, dtype=inst.dtype)
    chunks = [ChunkState(active=np.arange(lo, hi))
              for lo, hi in _chunk_ranges(n, workers)]
    x = np.empty(n, dtype=inst.dtype)
    r_res = r_orig
    fixed_abs = 0.0
    fixed_count = 0
    lo = -np.inf
    hi = np.inf
    phi_lo = None
    phi_hi = None
    iterations = 0
    phi_evals = 0

    with ThreadPoolExecutor(max_workers=workers) as pool:
        lam = _parallel_lambda0(inst, chunks, pool, xbar)

        def finish(lam):
            def fill(idx):
                x[idx] = np.clip(
                    (inst.b[idx] * inst.dtype.type(lam) + inst.a[idx]) / inst.d[idx],
                    inst.l[idx], inst.u[idx],
                )
            list(pool.map(fill, [c.active for c in chunks if c.active.size]))
            return SolveOutcome(
                status=Status.SOLVED, lam=lam, x=x,
                iterations=iterations, phi_evals=phi_evals,
                fixed_count=fixed_count,
            )

        while iterations <= opts.max_iterations:
            parts = list(pool.map(
                lambda c: _scan_chunk(inst, c.active, lam), chunks
            ))
            phi_evals += 1
            value = _tree_sum(p[0] for p in parts)
            dminus = _tree_sum(p[1] for p in parts)
            dplus = _tree_sum(p[2] for p in parts)
            abs_bx = _tree_sum(p[3] for p in parts)
            diff = value - r_res
            if abs(diff) < tau * (abs_bx + fixed_abs + abs(r_orig)):
                return finish(lam)

            if diff < 0:
                lo, phi_lo = lam, value
            else:
                hi, phi_hi = lam, value

            if opts.variable_fixing:
                direction = "lower" if diff > 0 else "upper"
                mcol = 4 if diff > 0 else 5
                fixed = list(pool.map(
                    lambda cp: _fix_chunk(inst, cp[0], lam, direction,
                                          cp[1][mcol], x),
                    zip(chunks, parts),
                ))
                total = _tree_sum(f[0] for f in fixed)
                if total != 0.0 or any(f[2] for f in fixed):
                    r_res -= total
                    fixed_abs += _tree_sum(f[1] for f in fixed)
                    fixed_count += sum(f[2] for f in fixed)
                    if phi_lo is not None:
                        phi_lo -= total
                    if phi_hi is not None:
                        phi_hi -= total

            if diff < 0:
                if dplus > 0:
                    step = -diff / dplus
                    if step < tau:
                        return finish(lam + step)
                    tilde = lam + step
                    if tilde < hi:
                        next_lam = tilde
                    else:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r_res)
                else:
                    # zero derivative: breakpoint jump unless it cannot
                    # make progress (rounding hid the tie derivative);
                    # then secant inside the evaluated bracket
                    cands = [c for c in pool.map(
                        lambda ch: _nearest_chunk(inst, ch.active, lo, True),
                        chunks) if c is not None]
                    bp = min(cands) if cands else None
                    if bp is not None and bp < hi:
                        next_lam = bp
                    elif phi_hi is not None:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r_res)
                    else:
                        return SolveOutcome(
                            status=Status.INFEASIBLE, lam=None, x=None,
                            iterations=iterations, phi_evals=phi_evals,
                            fixed_count=fixed_count,
                        )
            else:
                if dminus > 0:
                    step = -diff / dminus
                    if -step < tau:
                        return finish(lam + step)
                    tilde = lam + step
                    if tilde > lo:
                        next_lam = tilde
                    else:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r_res)
                else:
                    cands = [c for c in pool.map(
                        lambda ch: _nearest_chunk(inst, ch.active, hi, False),
                        chunks) if c is not None]
                    bp = max(cands) if cands else None
                    if bp is not None and bp > lo:
                        next_lam = bp
                    elif phi_lo is not None:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r_res)
                    else:
                        return SolveOutcome(
                            status=Status.INFEASIBLE, lam=None, x=None,
                            iterations=iterations, phi_evals=phi_evals,
                            fixed_count=fixed_count,
                        )

            if next_lam == lam:
                return finish(lam)
            if np.isfinite(lo) and np.isfinite(hi):
                if hi - lo < tau * max(abs(hi), abs(lo)):
                    return finish(next_lam)
            lam = next_lam
            iterations += 1

            # coalesce depleted chunks so workers keep meaningful tasks
            if len(chunks) > 1:
                small = [c for c in chunks if c.active.size < merge_threshold]
                if len(small) > 1:
                    keep = [c for c in chunks if c.active.size >= merge_threshold]
                    merged = ChunkState(
                        active=np.concatenate([c.active for c in small])
                    )
                    chunks = keep + [merged]

    raise MaxIterationsError(
        f"no stopping criterion met in {opts.max_iterations} iterations",
        lam=lam, iterations=iterations, phi_evals=phi_evals,
    )


def par_simplex_init(y, r, workers=None):
    """Run the Gauss-Seidel initializer per chunk and merge the results.

    The global multiplier comes from the union of the per-chunk free
    sets using only the partial sums already computed; per-chunk zero
    proofs remain valid globally because the candidate-set estimate is
    an upper bound on the optimal multiplier for any subset.
    """
    y = np.ascontiguousarray(y)
    if y.dtype not in (np.float32, np.float64):
        y = y.astype(np.float64)
    workers = resolve_workers(workers)
    n = y.shape[0]
    r = float(r)
    ranges = _chunk_ranges(n, workers)
    fixed = np.zeros(n, dtype=np.bool_)
    empty = np.empty(0, dtype=y.dtype)

    def run(rg):
        lo, hi = rg
        idx = np.arange(lo, hi, dtype=np.int64)
        J = np.empty(idx.size, dtype=np.int64)
        Jt = np.empty(idx.size, dtype=np.int64)
        lam, nJ, sumJ, _ = _init_lambda_kernel(
            y, r, idx, empty, False, False, J, fixed, Jt
        )
        return J[:nJ], float(sumJ)

    if len(ranges) == 1:
        results = [run(ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, ranges))
    total_sum = _tree_sum(s for _, s in results)
    total_card = sum(j.size for j, _ in results)
    lam = (r - total_sum) / total_card
    free = np.concatenate([j for j, _ in results])
    return InitResult(lambda0=float(lam), free=free,
                      fixed_mask=fixed, sum_free=float(total_sum))


def jacobi_solve(inst, opts=None, workers=None, check=True):
    """Fixing-free Jacobi variant: stateless maps over all n variables."""
    if opts is None:
        opts = SolverOptions()
    opts = SolverOptions(
        variable_fixing=False,
        max_iterations=opts.max_iterations,
        tolerance_scale=opts.tolerance_scale,
    )
    if check:
        validate(inst)
    workers = resolve_workers(workers)
    n = inst.n
    tau = opts.tau(inst.dtype)
    r = float(inst.r)
    ranges = _chunk_ranges(n, workers)
    iterations = 0
    phi_evals = 0

    def scan_range(rg, lam):
        lo_i, hi_i = rg
        sl = slice(lo_i, hi_i)
        d, a, b = inst.d[sl], inst.a[sl], inst.b[sl]
        l, u = inst.l[sl], inst.u[sl]
        t = (b * inst.dtype.type(lam) + a) / d
        x = np.clip(t, l, u)
        bx = b * x
        at_lower = t <= l
        at_upper = t >= u
        w = b * b / d
        interior = ~(at_lower | at_upper)
        core = float(w[interior].sum())
        dmin = core + float(w[at_upper & (t == u) & (l < u)].sum())
        dplu = core + float(w[at_lower & (t == l) & (l < u)].sum())
        return float(bx.sum()), dmin, dplu, float(np.abs(bx).sum())

    with ThreadPoolExecutor(max_workers=workers) as pool:
        lam = initial_multiplier(inst)
        lo = -np.inf
        hi = np.inf
        phi_lo = None
        phi_hi = None

        def finish(lam):
            x = np.empty(n, dtype=inst.dtype)

            def fill(rg):
                sl = slice(*rg)
                x[sl] = np.clip(
                    (inst.b[sl] * inst.dtype.type(lam) + inst.a[sl]) / inst.d[sl],
                    inst.l[sl], inst.u[sl],
                )
            list(pool.map(fill, ranges))
            return SolveOutcome(
                status=Status.SOLVED, lam=lam, x=x,
                iterations=iterations, phi_evals=phi_evals, fixed_count=0,
            )

        while iterations <= opts.max_iterations:
            parts = list(pool.map(lambda rg: scan_range(rg, lam), ranges))
            phi_evals += 1
            value = _tree_sum(p[0] for p in parts)
            dminus = _tree_sum(p[1] for p in parts)
            dplus = _tree_sum(p[2] for p in parts)
            abs_bx = _tree_sum(p[3] for p in parts)
            diff = value - r
            if abs(diff) < tau * (abs_bx + abs(r)):
                return finish(lam)
            if diff < 0:
                lo, phi_lo = lam, value
            else:
                hi, phi_hi = lam, value
            if diff < 0:
                if dplus > 0:
                    step = -diff / dplus
                    if step < tau:
                        return finish(lam + step)
                    tilde = lam + step
                    next_lam = tilde if tilde < hi else secant_step(
                        lo, phi_lo, hi, phi_hi, r)
                else:
                    cands = [c for c in pool.map(
                        lambda rg: _nearest_chunk(
                            inst, np.arange(rg[0], rg[1]), lo, True),
                        ranges) if c is not None]
                    bp = min(cands) if cands else None
                    if bp is not None and bp < hi:
                        next_lam = bp
                    elif phi_hi is not None:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r)
                    else:
                        return SolveOutcome(
                            status=Status.INFEASIBLE, lam=None, x=None,
                            iterations=iterations, phi_evals=phi_evals,
                        )
            else:
                if dminus > 0:
                    step = -diff / dminus
                    if -step < tau:
                        return finish(lam + step)
                    tilde = lam + step
                    next_lam = tilde if tilde > lo else secant_step(
                        lo, phi_lo, hi, phi_hi, r)
                else:
                    cands = [c for c in pool.map(
                        lambda rg: _nearest_chunk(
                            inst, np.arange(rg[0], rg[1]), hi, False),
                        ranges) if c is not None]
                    bp = max(cands) if cands else None
                    if bp is not None and bp > lo:
                        next_lam = bp
                    elif phi_lo is not None:
                        next_lam = secant_step(lo, phi_lo, hi, phi_hi, r)
                    else:
                        return SolveOutcome(
                            status=Status.INFEASIBLE, lam=None, x=None,
                            iterations=iterations, phi_evals=phi_evals,
                        )
            if next_lam == lam:
                return finish(lam)
            if np.isfinite(lo) and np.isfinite(hi):
                if hi - lo < tau * max(abs(hi), abs(lo)):
                    return finish(next_lam)
            lam = next_lam
            iterations += 1

    raise MaxIterationsError(
        f"no stopping criterion met in {opts.max_iterations} iterations",
        lam=lam, iterations=iterations, phi_evals=phi_evals,
    )
