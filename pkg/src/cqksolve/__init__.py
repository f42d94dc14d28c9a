"""Continuous quadratic knapsack solvers and simplex/l1 projections."""

from .core import (
    Breakpoints,
    CqkInstance,
    DomainError,
    PhiEval,
    SimplexInstance,
    breakpoints,
    eval_phi,
    eval_x,
    initial_multiplier,
    simplex_as_cqk,
    validate,
)
from .newton import (
    ContractViolation,
    MaxIterationsError,
    SolveOutcome,
    SolverOptions,
    SolveState,
    Status,
    fix_variables,
    nearest_breakpoint,
    secant_step,
    solve_cqk,
)
from .simplex import (
    EmptyIndexSet,
    InitResult,
    condat_project,
    newton_project_simplex,
    project_l1,
    simplex_init_lambda,
)
from .parallel import jacobi_solve, par_simplex_init, par_solve_cqk
from .spg import SpgProblem, build_basis_pursuit, build_svm_dual, spg_solve
from .instances import (
    CQK_FAMILIES,
    SIMPLEX_FAMILIES,
    FamilyMismatch,
    gen_blobs,
    gen_cqk,
    gen_simplex_y,
    gen_sparse_ls,
)
from .io import FormatError, read_instance, write_instance
from .oracle import oracle_lambda, oracle_simplex
from .rng import Xoshiro256pp

__version__ = "0.1.0"
