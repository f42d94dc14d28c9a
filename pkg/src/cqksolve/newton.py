"""Globally convergent semismooth Newton solver for the CQK dual equation.

The solver drives the piecewise-linear equation phi(lam) = r with
Newton steps on the appropriate lateral derivative, keeps a bracket
[lam_lo, lam_hi] around the root, falls back to a secant step when a
Newton step would leave the bracket, and jumps to the nearest
breakpoint when the derivative vanishes (declaring infeasibility if
there is none in the required direction).  Variable fixing optionally
shrinks the active set after every phi evaluation.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .core import DomainError, _phi_scan, eval_x, initial_multiplier, validate

__all__ = [
    "Status",
    "SolverOptions",
    "SolveState",
    "SolveOutcome",
    "ContractViolation",
    "MaxIterationsError",
    "solve_cqk",
    "secant_step",
    "nearest_breakpoint",
    "fix_variables",
]


class Status(enum.Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"


class ContractViolation(RuntimeError):
    """An internal precondition failed (invalid secant bracket)."""


class MaxIterationsError(RuntimeError):
    """No stopping criterion met within the iteration budget."""

    def __init__(self, message, lam, iterations, phi_evals):
        self.lam = lam
        self.iterations = iterations
        self.phi_evals = phi_evals
        super().__init__(message)


@dataclass
class SolverOptions:
    """Tuning knobs shared by all solver variants.

    tolerance_scale defaults to eps**(3/4) of the instance's floating
    precision when left as None.
    """

    variable_fixing: bool = True
    max_iterations: int = 100
    tolerance_scale: float | None = None

    def tau(self, dtype):
        if self.tolerance_scale is not None:
            return float(self.tolerance_scale)
        return float(np.finfo(dtype).eps) ** 0.75


@dataclass
class SolveState:
    """Mutable per-solve state: active set, residual r, bracket, iterate.

    phi_lo/phi_hi cache the reduced-problem phi values at the finite,
    already evaluated bracket endpoints (None while an endpoint is
    still infinite).  x holds fixed components as they are decided;
    active components are filled in at termination.
    """

    active: np.ndarray
    r_residual: float
    bracket_lo: float = -np.inf
    bracket_hi: float = np.inf
    lam: float = 0.0
    last_lam: float | None = None
    phi_lo: float | None = None
    phi_hi: float | None = None
    x: np.ndarray | None = None
    fixed_abs: float = 0.0
    fixed_count: int = 0


@dataclass
class SolveOutcome:
    """Result of one solve: status, multiplier, primal point, counters."""

    status: Status
    lam: float | None
    x: np.ndarray | None
    iterations: int
    phi_evals: int
    fixed_count: int = 0
    sparse: tuple[np.ndarray, np.ndarray] | None = None


def secant_step(lo, phi_lo, hi, phi_hi, r):
    """Root of the affine interpolant through (lo, phi_lo), (hi, phi_hi).

    Requires a valid evaluated bracket lo < hi with phi_lo < r < phi_hi;
    the returned point lies strictly inside (lo, hi).
    """
    if not (lo < hi) or not (phi_lo < r < phi_hi):
        raise ContractViolation(
            f"invalid secant bracket: lo={lo}, hi={hi}, "
            f"phi_lo={phi_lo}, phi_hi={phi_hi}, r={r}"
        )
    lam = lo + (r - phi_lo) * (hi - lo) / (phi_hi - phi_lo)
    # guard against rounding pushing the step onto an endpoint
    if not (lo < lam < hi):
        lam = lo + 0.5 * (hi - lo)
    return lam


class Direction(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


def nearest_breakpoint(state, inst, direction):
    """Closest active-variable breakpoint strictly beyond the bracket edge.

    RIGHT scans for the minimum breakpoint > bracket_lo, LEFT for the
    maximum < bracket_hi.  Returns None when no such breakpoint exists,
    which signals infeasibility to the caller.
    """
    idx = state.active
    d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
    l, u = inst.l[idx], inst.u[idx]
    best = None
    if direction is Direction.RIGHT:
        edge = state.bracket_lo
        for bound in (l, u):
            fin = np.isfinite(bound)
            if not fin.any():
                continue
            bp = (d[fin] * bound[fin] - a[fin]) / b[fin]
            bp = bp[bp > edge]
            if bp.size:
                cand = float(bp.min())
                best = cand if best is None else min(best, cand)
    else:
        edge = state.bracket_hi
        for bound in (l, u):
            fin = np.isfinite(bound)
            if not fin.any():
                continue
            bp = (d[fin] * bound[fin] - a[fin]) / b[fin]
            bp = bp[bp < edge]
            if bp.size:
                cand = float(bp.max())
                best = cand if best is None else max(best, cand)
    return best


def fix_variables(state, inst, lam, phi_value, r, at_lower=None, at_upper=None):
    """Permanently clamp active variables proven to sit at a bound.

    With phi(lam) > r every active variable already clamped at its
    finite lower bound stays there at the optimum (the optimal
    multiplier can only move left); mirrored for phi(lam) < r and
    upper bounds.  Fixed contributions are folded into r_residual and
    into the cached bracket phi values, which remain consistent because
    a variable fixed at this lam is at the same bound at both bracket
    endpoints on the relevant side.
    """
    idx = state.active
    if at_lower is None or at_upper is None:
        d, a, b = inst.d[idx], inst.a[idx], inst.b[idx]
        t = (b * inst.dtype.type(lam) + a) / d
        at_lower = t <= inst.l[idx]
        at_upper = t >= inst.u[idx]
    if phi_value > r:
        mask = at_lower & np.isfinite(inst.l[idx])
        bound = inst.l
    elif phi_value < r:
        mask = at_upper & np.isfinite(inst.u[idx])
        bound = inst.u
    else:
        return state
    if not mask.any():
        return state
    newly = idx[mask]
    vals = bound[newly]
    contrib = inst.b[newly] * vals
    total = float(contrib.sum())
    state.active = idx[~mask]
    state.r_residual -= total
    state.fixed_abs += float(np.abs(contrib).sum())
    state.fixed_count += newly.size
    if state.x is not None:
        state.x[newly] = vals
    if state.phi_lo is not None:
        state.phi_lo -= total
    if state.phi_hi is not None:
        state.phi_hi -= total
    return state


def solve_cqk(inst, opts=None, xbar=None, check=True):
    """Solve a CQK instance by the safeguarded semismooth Newton method.

    Returns a SolveOutcome; status INFEASIBLE carries no primal point.
    xbar, when given, seeds the initial multiplier from the strictly
    interior components of the estimate.
    """
    if opts is None:
        opts = SolverOptions()
    if check:
        validate(inst)
    n = inst.n
    tau = opts.tau(inst.dtype)
    r_orig = float(inst.r)
    state = SolveState(
        active=np.arange(n),
        r_residual=r_orig,
        lam=initial_multiplier(inst, xbar),
        x=np.empty(n, dtype=inst.dtype),
    )
    iterations = 0
    phi_evals = 0

    def finish(lam):
        if state.active.size:
            state.x[state.active] = eval_x(inst, lam, state.active)
        return SolveOutcome(
            status=Status.SOLVED,
            lam=lam,
            x=state.x,
            iterations=iterations,
            phi_evals=phi_evals,
            fixed_count=state.fixed_count,
        )

    while iterations <= opts.max_iterations:
        value, dminus, dplus, abs_bx, at_lower, at_upper = _phi_scan(
            inst, state.lam, state.active
        )
        phi_evals += 1
        diff = value - state.r_residual
        scale = abs_bx + state.fixed_abs + abs(r_orig)
        if abs(diff) < tau * scale:
            return finish(state.lam)

        if diff < 0:
            state.bracket_lo = state.lam
            state.phi_lo = value
        else:
            state.bracket_hi = state.lam
            state.phi_hi = value
        if opts.variable_fixing:
            fix_variables(
                state, inst, state.lam, value, value - diff,
                at_lower=at_lower, at_upper=at_upper,
            )

        if diff < 0:
            if dplus > 0:
                step = -diff / dplus
                if step < tau:
                    return finish(state.lam + step)
                tilde = state.lam + step
                if tilde < state.bracket_hi:
                    next_lam = tilde
                else:
                    next_lam = secant_step(
                        state.bracket_lo, state.phi_lo,
                        state.bracket_hi, state.phi_hi, state.r_residual,
                    )
            else:
                # zero right derivative: jump to the nearest breakpoint,
                # unless the jump cannot make progress (it lands on or
                # beyond the far bracket endpoint, which happens when
                # rounding hides the tie derivative at a breakpoint) --
                # then bisect/secant inside the evaluated bracket instead
                bp = nearest_breakpoint(state, inst, Direction.RIGHT)
                if bp is not None and bp < state.bracket_hi:
                    next_lam = bp
                elif state.phi_hi is not None:
                    next_lam = secant_step(
                        state.bracket_lo, state.phi_lo,
                        state.bracket_hi, state.phi_hi, state.r_residual,
                    )
                else:
                    return SolveOutcome(
                        status=Status.INFEASIBLE, lam=None, x=None,
                        iterations=iterations, phi_evals=phi_evals,
                        fixed_count=state.fixed_count,
                    )
        else:
            if dminus > 0:
                step = -diff / dminus
                if -step < tau:
                    return finish(state.lam + step)
                tilde = state.lam + step
                if tilde > state.bracket_lo:
                    next_lam = tilde
                else:
                    next_lam = secant_step(
                        state.bracket_lo, state.phi_lo,
                        state.bracket_hi, state.phi_hi, state.r_residual,
                    )
            else:
                bp = nearest_breakpoint(state, inst, Direction.LEFT)
                if bp is not None and bp > state.bracket_lo:
                    next_lam = bp
                elif state.phi_lo is not None:
                    next_lam = secant_step(
                        state.bracket_lo, state.phi_lo,
                        state.bracket_hi, state.phi_hi, state.r_residual,
                    )
                else:
                    return SolveOutcome(
                        status=Status.INFEASIBLE, lam=None, x=None,
                        iterations=iterations, phi_evals=phi_evals,
                        fixed_count=state.fixed_count,
                    )

        if next_lam == state.lam:
            return finish(state.lam)
        if np.isfinite(state.bracket_lo) and np.isfinite(state.bracket_hi):
            width = state.bracket_hi - state.bracket_lo
            if width < tau * max(abs(state.bracket_hi), abs(state.bracket_lo)):
                return finish(next_lam)
        state.last_lam = state.lam
        state.lam = next_lam
        iterations += 1

    raise MaxIterationsError(
        f"no stopping criterion met in {opts.max_iterations} iterations "
        f"(lam={state.lam}, |active|={state.active.size})",
        lam=state.lam, iterations=iterations, phi_evals=phi_evals,
    )
