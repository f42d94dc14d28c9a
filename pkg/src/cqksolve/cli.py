"""Command line front end: gen / solve / bench / spg.

Benchmark timing protocol: each instance gets one untimed warm-up
solve, then is re-solved until either the rep cap or the per-instance
time budget is exhausted; the minimum time is kept.  The reported
figure is the median of these minima over the instance set.  Relative
performance is the time of the base variant (first of --variants, at
one worker) divided by the row's time.

Exit codes: 0 solved, 2 infeasible, 1 usage or domain error.
"""

import argparse
import csv
import statistics
import sys
import time

import numpy as np

from .core import CqkInstance, DomainError, SimplexInstance, simplex_as_cqk
from .instances import (
    CQK_FAMILIES,
    SIMPLEX_FAMILIES,
    gen_blobs,
    gen_cqk,
    gen_simplex_y,
    gen_sparse_ls,
)
from .io import FormatError, read_instance, write_instance
from .newton import SolverOptions, Status, solve_cqk
from .parallel import jacobi_solve, par_solve_cqk, resolve_workers
from .simplex import condat_project, newton_project_simplex
from .spg import build_basis_pursuit, build_svm_dual, spg_solve

__all__ = ["main"]

VARIANTS = ("newton", "newton-nofix", "condat", "jacobi", "parallel")


class UsageError(ValueError):
    pass


def _load_or_generate(args, dtype):
    if args.instance:
        return read_instance(args.instance, dtype=dtype)
    if not (args.family and args.n and args.seed is not None):
        raise UsageError("need --instance or all of --family/--n/--seed")
    return _generate(args.family, args.n, args.seed, dtype)


def _generate(family, n, seed, dtype=np.float64):
    if family in CQK_FAMILIES:
        return gen_cqk(family, n, seed, dtype=dtype)
    if family in SIMPLEX_FAMILIES:
        y = gen_simplex_y(family, n, seed, dtype=dtype)
        return SimplexInstance(y=y, r=1.0)
    raise UsageError(f"unknown family {family!r}; choose from "
                     f"{CQK_FAMILIES + SIMPLEX_FAMILIES}")


def _run_variant(inst, variant, workers, xbar=None, output="dense"):
    """Solve with the named variant.

    Returns (status, lam, x_or_sparse, iterations, phi_evals).
    """
    opts = SolverOptions()
    simplex = isinstance(inst, SimplexInstance)
    if variant == "condat":
        if not simplex:
            raise UsageError("variant condat applies to simplex instances only")
        x, lam = condat_project(inst.y, inst.r, return_multiplier=True)
        return Status.SOLVED, lam, x, 0, 0
    if simplex and variant == "newton":
        out = newton_project_simplex(inst.y, inst.r, opts=opts, xbar=xbar,
                                     output=output)
        return (out.status, out.lam,
                out.sparse if output == "sparse" else out.x,
                out.iterations, out.phi_evals)
    cqk = simplex_as_cqk(inst.y, inst.r) if simplex else inst
    if variant == "newton":
        out = solve_cqk(cqk, opts, xbar=xbar)
    elif variant == "newton-nofix":
        out = solve_cqk(cqk, SolverOptions(variable_fixing=False), xbar=xbar)
    elif variant == "jacobi":
        out = jacobi_solve(cqk, opts, workers=workers)
    elif variant == "parallel":
        out = par_solve_cqk(cqk, opts, workers=workers, xbar=xbar)
    else:
        raise UsageError(f"unknown variant {variant!r}")
    x = out.x
    if output == "sparse" and x is not None:
        nz = np.flatnonzero(x)
        x = (nz, x[nz])
    return out.status, out.lam, x, out.iterations, out.phi_evals


def cmd_gen(args):
    inst = _generate(args.family, args.n, args.seed)
    write_instance(args.out, inst, binary=args.format == "binary")
    print(f"wrote {args.family} n={args.n} seed={args.seed} -> {args.out}")
    return 0


def cmd_solve(args):
    dtype = np.float32 if args.precision == 32 else np.float64
    inst = _load_or_generate(args, dtype)
    workers = resolve_workers(args.workers)
    xbar = None
    if args.warm:
        warm = read_instance(args.warm, dtype=dtype)
        if not isinstance(warm, SimplexInstance):
            raise UsageError("--warm expects a vector in SPX format")
        xbar = warm.y

    t0 = time.perf_counter()
    status, lam, x, iters, evals = _run_variant(
        inst, args.variant, workers, xbar=xbar, output=args.output)
    wall = time.perf_counter() - t0

    if status is Status.INFEASIBLE:
        print("status: infeasible")
        print(f"wall_time_s: {wall:.6f}")
        return 2
    print("status: solved")
    print(f"lambda: {lam:.17g}")
    print(f"iterations: {iters}")
    print(f"phi_evaluations: {evals}")
    print(f"wall_time_s: {wall:.6f}")
    if args.out:
        if args.output == "sparse":
            idx, vals = x
            with open(args.out, "w") as fh:
                fh.write(f"SPARSE {len(idx)}\n")
                for i, v in zip(idx, vals):
                    fh.write(f"{i} {v:.17g}\n")
        else:
            # vector dump in SPX layout; the level field is a placeholder
            # and is ignored when the file is fed back through --warm
            xv = np.asarray(x)
            with open(args.out, "w") as fh:
                fh.write(f"SPX1 {xv.shape[0]} 1\n")
                fh.write(" ".join(f"{v:.17g}" for v in xv))
                fh.write("\n")
    return 0


def _time_instance(fn, rep_cap, budget_s):
    fn()  # warm-up, untimed
    best = np.inf
    start = time.monotonic()
    runs = 0
    while runs < rep_cap and (runs == 0 or time.monotonic() - start < budget_s):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
        runs += 1
    return best


def _bench_cells(args):
    """Yield (family, maker) pairs for the chosen suite.

    maker(n, seed) returns (solve_fn_factory, iter_getter): the factory
    binds one generated instance and a variant/worker pair.
    """
    if args.suite == "cqk":
        return [(f, "cqk") for f in CQK_FAMILIES]
    if args.suite == "simplex":
        return [(f, "simplex") for f in SIMPLEX_FAMILIES]
    if args.suite == "l1":
        return [(f, "l1") for f in SIMPLEX_FAMILIES]
    if args.suite == "svm":
        return [("blobs", "svm")]
    if args.suite == "bp":
        return [("sparse-ls", "bp")]
    raise UsageError(f"unknown suite {args.suite!r}")


def cmd_bench(args):
    rep_cap, budget_s = args.reps_budget
    sizes = args.sizes
    variants = args.variants
    workers_list = args.workers
    base_variant = variants[0]
    rows = []
    iters_box = [0]

    def make_runner(kind, inst, variant, workers):
        if kind == "l1":
            y, r = inst

            def run():
                if variant == "newton":
                    out = newton_project_simplex(np.abs(y), r, sharpened=True)
                    iters_box[0] = out.iterations
                elif variant == "condat":
                    condat_project(np.abs(y), r)
                    iters_box[0] = 0
                else:
                    raise UsageError(
                        "l1 suite supports variants newton and condat")
            return run
        if kind == "svm":
            points, labels = inst

            def run():
                prob = build_svm_dual(points, labels, gamma=1.0, C=1.0,
                                      warm_start=variant != "newton-nofix")
                res = spg_solve(prob, np.zeros(prob.n), tol=1e-4)
                iters_box[0] = res.iterations
            return run
        if kind == "bp":
            A, b, _ = inst

            def run():
                prob = build_basis_pursuit(A, b, radius=1.0,
                                           warm_start=variant != "newton-nofix")
                res = spg_solve(prob, np.zeros(prob.n), tol=1e-4)
                iters_box[0] = res.iterations
            return run

        def run():
            _, _, _, iters, _ = _run_variant(inst, variant, workers)
            iters_box[0] = iters
        return run

    for family, kind in _bench_cells(args):
        for n in sizes:
            insts = []
            for k in range(args.instances):
                seed = args.seed + k
                if kind in ("cqk", "simplex"):
                    insts.append(_generate(family, n, seed))
                elif kind == "l1":
                    insts.append((gen_simplex_y("simplex-n01", n, seed), 1.0))
                elif kind == "svm":
                    insts.append(gen_blobs(n, 20, 3.0, seed))
                elif kind == "bp":
                    insts.append(gen_sparse_ls(max(1, n // 10), n, 0.01,
                                               max(1, n // 300), seed))
            base_median = {}
            for variant in variants:
                for workers in workers_list:
                    mins = []
                    iter_counts = []
                    for inst in insts:
                        run = make_runner(kind, inst, variant, workers)
                        mins.append(_time_instance(run, rep_cap, budget_s))
                        iter_counts.append(iters_box[0])
                    med = statistics.median(mins) * 1000.0
                    if variant == base_variant and workers == min(workers_list):
                        base_median[(family, n)] = med
                    base = base_median.get((family, n), med)
                    rows.append({
                        "suite": args.suite, "family": family, "n": n,
                        "variant": variant, "workers": workers,
                        "precision": 64,
                        "median_min_ms": f"{med:.6f}",
                        "mean_iters": f"{statistics.fmean(iter_counts):.3f}",
                        "relperf_vs_base": f"{base / med:.4f}" if med > 0 else "",
                    })
                    print(f"{args.suite} {family} n={n} {variant} "
                          f"workers={workers}: {med:.3f} ms", file=sys.stderr)

    fieldnames = ["suite", "family", "n", "variant", "workers", "precision",
                  "median_min_ms", "mean_iters", "relperf_vs_base"]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.csv:
            out.close()
    return 0


def cmd_spg(args):
    warm = args.warm == "on"
    if args.app == "svm":
        points, labels = gen_blobs(args.n, 20, 3.0, args.seed)
        prob = build_svm_dual(points, labels, gamma=args.gamma, C=args.C,
                              warm_start=warm)
        x0 = np.zeros(prob.n)
    else:
        m = max(1, args.n // 10)
        A, b, _ = gen_sparse_ls(m, args.n, 0.01, max(1, args.n // 300),
                                args.seed)
        prob = build_basis_pursuit(A, b, radius=args.radius, warm_start=warm)
        x0 = np.zeros(args.n)
    res = spg_solve(prob, x0, tol=args.tol)

    fieldnames = ["iteration", "objective", "pg_norm", "inner_iterations",
                  "warm_started"]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        for k, (pg, obj, (inner, w)) in enumerate(
                zip(res.pg_norms, res.objectives, res.inner_iterations)):
            writer.writerow({
                "iteration": k, "objective": f"{obj:.12g}",
                "pg_norm": f"{pg:.6g}", "inner_iterations": inner,
                "warm_started": int(w),
            })
    finally:
        if args.csv:
            out.close()
    print(f"converged: {res.converged} iterations: {res.iterations}",
          file=sys.stderr)
    return 0


def _parse_reps_budget(text):
    # "RUNS:SECONDS", e.g. "10000:2"
    try:
        runs, secs = text.split(":")
        return int(runs), float(secs)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            "expected RUNS:SECONDS, e.g. 10000:2") from exc


def _int_list(text):
    return [int(t) for t in text.split(",") if t]


def build_parser():
    p = argparse.ArgumentParser(
        prog="cqksolve",
        description="Continuous quadratic knapsack and simplex/l1 projection "
                    "solvers.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=("text", "binary"), default="text")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--instance")
    s.add_argument("--family")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--variant", choices=VARIANTS, default="newton")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--warm", help="warm-start vector in SPX format")
    s.add_argument("--output", choices=("dense", "sparse"), default="dense")
    s.add_argument("--precision", type=int, choices=(32, 64), default=64)
    s.add_argument("--out", help="write the solution vector here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="timing benchmark, CSV output")
    b.add_argument("--suite", required=True,
                   choices=("cqk", "simplex", "l1", "svm", "bp"))
    b.add_argument("--sizes", type=_int_list, required=True)
    b.add_argument("--instances", type=int, default=20)
    b.add_argument("--reps-budget", type=_parse_reps_budget,
                   default=(10000, 2.0))
    b.add_argument("--variants", type=lambda t: t.split(","),
                   default=["newton"])
    b.add_argument("--workers", type=_int_list, default=[1])
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)

    q = sub.add_parser("spg", help="projected-gradient application driver")
    q.add_argument("--app", required=True, choices=("svm", "bp"))
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--gamma", type=float, default=1.0)
    q.add_argument("--C", type=float, default=1.0)
    q.add_argument("--radius", type=float, default=1.0)
    q.add_argument("--tol", type=float, default=1e-4)
    q.add_argument("--warm", choices=("on", "off"), default="on")
    q.add_argument("--csv")
    q.set_defaults(func=cmd_spg)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
