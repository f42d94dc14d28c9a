"""Seedable benchmark instance generators.

Every generator is a pure function of (family, n, seed); the draw
order is normative so results are reproducible bit for bit:

* CQK families, per index i in the listed order (uncorrelated: d, a, b;
  weakly correlated: b, d, a; correlated: b only), then per index one
  (lo, hi) pair for the bounds with l = min, u = max, then a single
  draw for r uniform in [b'l, b'u];
* simplex families: n draws of the stated distribution; if any entry
  is exactly zero the whole vector is redrawn from the continuing
  stream.  N(0, 1e-3) is read as variance 1e-3.

The blob and sparse least-squares generators feed the projected
gradient demos and have no external recipe to match; their draw order
is documented inline.
"""

import numpy as np
import scipy.sparse as sp

from .core import CqkInstance, DomainError
from .rng import Xoshiro256pp

__all__ = [
    "CQK_FAMILIES",
    "SIMPLEX_FAMILIES",
    "FamilyMismatch",
    "gen_cqk",
    "gen_simplex_y",
    "gen_blobs",
    "gen_sparse_ls",
]

CQK_FAMILIES = ("cqk-uncorrelated", "cqk-weakly-correlated", "cqk-correlated")
SIMPLEX_FAMILIES = ("simplex-u01", "simplex-n01", "simplex-n0m3")


class FamilyMismatch(ValueError):
    """Generator asked for a family it does not produce."""


def gen_cqk(family, n, seed, dtype=np.float64):
    """One random CQK instance of the given family, always feasible."""
    if family not in CQK_FAMILIES:
        raise FamilyMismatch(f"not a CQK family: {family!r}")
    rng = Xoshiro256pp(seed)
    if family == "cqk-uncorrelated":
        flat = rng.uniform(10.0, 25.0, 3 * n)
        d, a, b = flat[0::3], flat[1::3], flat[2::3]
    elif family == "cqk-weakly-correlated":
        flat = rng.uniform01(3 * n)
        b = 10.0 + 15.0 * flat[0::3]
        d = (b - 5.0) + 10.0 * flat[1::3]
        a = (b - 5.0) + 10.0 * flat[2::3]
    else:
        b = rng.uniform(10.0, 25.0, n)
        d = b + 5.0
        a = b + 5.0
    pair = rng.uniform(10.0, 25.0, 2 * n)
    lo, hi = pair[0::2], pair[1::2]
    l = np.minimum(lo, hi)
    u = np.maximum(lo, hi)
    bl = float(b @ l)
    bu = float(b @ u)
    r = bl + float(rng.uniform01(1)[0]) * (bu - bl)
    return CqkInstance(
        d=d.astype(dtype), a=a.astype(dtype), b=b.astype(dtype),
        l=l.astype(dtype), u=u.astype(dtype), r=r,
    )


def gen_simplex_y(family, n, seed, dtype=np.float64):
    """One random point for the simplex projection benchmarks."""
    if family not in SIMPLEX_FAMILIES:
        raise FamilyMismatch(f"not a simplex family: {family!r}")
    rng = Xoshiro256pp(seed)
    while True:
        if family == "simplex-u01":
            y = rng.uniform01(n)
        elif family == "simplex-n01":
            y = rng.normal(n)
        else:
            y = rng.normal(n, std=np.sqrt(1e-3))
        if not np.any(y == 0.0):
            return y.astype(dtype)


def gen_blobs(n, dim, separation, seed):
    """Two Gaussian blobs with +-1 labels, balanced by alternation.

    Point i gets label +1 when i is even.  Draw order: per point, dim
    standard normals; the class mean (+-separation/2 on the first
    coordinate) is added afterwards.
    """
    rng = Xoshiro256pp(seed)
    pts = rng.normal(n * dim).reshape(n, dim)
    labels = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    pts[:, 0] += 0.5 * separation * labels
    return pts, labels


def gen_sparse_ls(m, n, density, sparsity_k, seed):
    """Sparse least-squares data: random sparse A and b = A @ x_true.

    Draw order: m*n uniforms for the sparsity pattern (entry kept when
    the draw is below density), one normal per kept entry in row-major
    order, then sparsity_k support indices for x_true (uniform ints,
    redrawn on collision, in order), then sparsity_k normal values.
    Returns (A, b, x_true) with A in CSR format.
    """
    if not 0 < density <= 1:
        raise DomainError("density", None, "density must be in (0, 1]")
    if sparsity_k > n:
        raise DomainError("sparsity_k", None, "sparsity_k must be <= n")
    rng = Xoshiro256pp(seed)
    mask = rng.uniform01(m * n) < density
    rows, cols = np.nonzero(mask.reshape(m, n))
    vals = rng.normal(rows.shape[0])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
    support = []
    seen = set()
    while len(support) < sparsity_k:
        cand = int(rng.integers(n, 1)[0])
        if cand not in seen:
            seen.add(cand)
            support.append(cand)
    x_true = np.zeros(n)
    if sparsity_k:
        x_true[np.array(support)] = rng.normal(sparsity_k)
    b = A @ x_true
    return A, b, x_true
