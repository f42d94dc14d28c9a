"""Spectral projected gradient driver and the two demo applications.

The driver is the classic nonmonotone variant: search direction
d = P(x - alpha g) - x with the spectral (Barzilai-Borwein) step
alpha, backtracking on the max of the last M objective values.  It is
deliberately projection-hungry: each iteration calls the projector
once for the direction and the stopping test reuses that projection,
which is exactly the workload the warm-started projection solvers are
meant to speed up.

Constants not pinned elsewhere: memory M = 10, sufficient decrease
1e-4, backtracking factor 1/2, spectral step clamped to
[1e-10, 1e10], initial step 1 / ||g(x0)||_inf.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import CqkInstance, DomainError
from .newton import SolverOptions, solve_cqk
from .simplex import newton_project_simplex

__all__ = [
    "SpgProblem",
    "SpgResult",
    "spg_solve",
    "build_svm_dual",
    "build_basis_pursuit",
]

MEMORY = 10
SUFFICIENT_DECREASE = 1e-4
BACKTRACK = 0.5
STEP_MIN = 1e-10
STEP_MAX = 1e10


@dataclass
class SpgProblem:
    """Objective, gradient, and a projector onto the feasible set.

    project(z, xbar) must return the projection of z; xbar is the
    previous iterate (None on the first call) to be used as a warm
    start when warm_start is set.  last_inner_iterations reports the
    projection subproblem's iteration count after each call.
    """

    n: int
    objective: callable
    gradient: callable
    project: callable
    warm_start: bool = False
    last_inner_iterations: int = 0


@dataclass
class SpgResult:
    x: np.ndarray
    iterations: int
    converged: bool
    pg_norms: list = field(default_factory=list)
    inner_iterations: list = field(default_factory=list)
    objectives: list = field(default_factory=list)


def spg_solve(prob, x0, tol=1e-4, max_iter=1000):
    """Minimize over the projector's feasible set from a feasible x0.

    Stops when the projected-gradient infinity norm drops below tol;
    otherwise returns the last iterate flagged as not converged.
    per-iteration projection statistics are collected in the result.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    f = prob.objective(x)
    g = prob.gradient(x)
    gnorm = float(np.abs(g).max())
    alpha = 1.0 / gnorm if gnorm > 0 else 1.0
    alpha = min(max(alpha, STEP_MIN), STEP_MAX)
    fmem = [f]
    res = SpgResult(x=x, iterations=0, converged=False)
    prev = None

    for k in range(max_iter):
        warm = prob.warm_start and prev is not None
        px = prob.project(x - alpha * g, prev if warm else None)
        res.inner_iterations.append((prob.last_inner_iterations, warm))
        d = px - x
        # projected gradient test at unit step
        if alpha == 1.0:
            pg = d
        else:
            pg = prob.project(x - g, prev if warm else None) - x
        pgnorm = float(np.abs(pg).max())
        res.pg_norms.append(pgnorm)
        res.objectives.append(f)
        if pgnorm < tol:
            res.x = x
            res.iterations = k
            res.converged = True
            return res

        fref = max(fmem)
        gd = float(g @ d)
        t = 1.0
        while True:
            xt = x + t * d
            ft = prob.objective(xt)
            if ft <= fref + SUFFICIENT_DECREASE * t * gd or t < 1e-12:
                break
            t *= BACKTRACK
        gt = prob.gradient(xt)
        s = xt - x
        yv = gt - g
        sy = float(s @ yv)
        if sy > 0:
            alpha = float(s @ s) / sy
        else:
            alpha = STEP_MAX
        alpha = min(max(alpha, STEP_MIN), STEP_MAX)
        prev = x
        x, f, g = xt, ft, gt
        fmem.append(f)
        if len(fmem) > MEMORY:
            fmem.pop(0)

    res.x = x
    res.iterations = max_iter
    res.converged = False
    return res


def build_svm_dual(points, labels, gamma, C, warm_start=True,
                   solver_opts=None):
    """Dual soft-margin SVM with Gaussian kernel as an SpgProblem.

    Objective 0.5 x'Hx - e'x over {y'x = 0, 0 <= x <= C} with
    H_ij = y_i y_j exp(-gamma ||z_i - z_j||^2).  The projector solves
    the diagonal-Hessian subproblem after flipping the sign of the
    variables with negative label so the equality weights are
    positive; the previous iterate feeds the multiplier initializer
    when warm starts are on.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n = points.shape[0]
    if n < 2 or not (np.any(labels > 0) and np.any(labels < 0)):
        raise DomainError("labels", None, "need both classes present")
    if not (gamma > 0 and C > 0):
        raise DomainError("hyperparameters", None, "gamma and C must be positive")
    sq = (points * points).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    H = np.outer(labels, labels) * np.exp(-gamma * d2)
    e = np.ones(n)
    opts = solver_opts or SolverOptions()

    # sign normalization: w = s * x with s = labels makes the equality
    # weights all ones; bounds flip for the negative class
    s = labels
    lb = np.where(s > 0, 0.0, -C)
    ub = np.where(s > 0, C, 0.0)

    prob = SpgProblem(
        n=n,
        objective=lambda x: 0.5 * float(x @ (H @ x)) - float(e @ x),
        gradient=lambda x: H @ x - e,
        project=None,
        warm_start=warm_start,
    )

    def project(z, xbar):
        inst = CqkInstance(
            d=np.ones(n), a=s * z, b=np.ones(n), l=lb, u=ub, r=0.0,
        )
        wb = s * xbar if xbar is not None else None
        out = solve_cqk(inst, opts, xbar=wb, check=False)
        prob.last_inner_iterations = out.iterations
        return s * out.x

    prob.project = project
    return prob


def build_basis_pursuit(A, b, radius, warm_start=True, solver_opts=None):
    """l1-constrained least squares 0.5 ||Ax - b||^2 as an SpgProblem."""
    if A.shape[0] != b.shape[0]:
        raise DomainError("b", None, "A and b row counts disagree")
    if not radius > 0:
        raise DomainError("radius", None, "radius must be positive")
    n = A.shape[1]
    At = A.T
    opts = solver_opts or SolverOptions()

    prob = SpgProblem(
        n=n,
        objective=lambda x: 0.5 * float(np.sum((A @ x - b) ** 2)),
        gradient=lambda x: At @ (A @ x - b),
        project=None,
        warm_start=warm_start,
    )

    def project(z, xbar):
        wb = np.abs(xbar) if xbar is not None else None
        if float(np.abs(z).sum()) <= radius:
            prob.last_inner_iterations = 0
            return np.asarray(z, dtype=np.float64).copy()
        out = _project_l1_counted(z, radius, opts, wb)
        prob.last_inner_iterations = out[1]
        return out[0]

    prob.project = project
    return prob


def _project_l1_counted(z, radius, opts, xbar):
    z = np.asarray(z, dtype=np.float64)
    absz = np.abs(z)
    out = newton_project_simplex(absz, radius, opts=opts, xbar=xbar,
                                 sharpened=True)
    x = np.sign(z) * np.maximum(0.0, absz + out.lam)
    return x, out.iterations
