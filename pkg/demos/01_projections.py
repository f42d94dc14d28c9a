"""Projecting points onto the simplex and the l1 ball.

Shows the three ways to project onto the simplex (streamlined Newton,
the Gauss-Seidel baseline, and the sort-based oracle), that they agree
to machine precision, and how the l1-ball projection reduces to a
simplex projection of the magnitudes.
"""

import numpy as np

import cqksolve as cq

rng = np.random.default_rng(0)
y = rng.normal(0, 1, 10)
print("point to project:", np.round(y, 3))

out = cq.newton_project_simplex(y, 1.0)
print("\nsimplex projection (Newton):", np.round(out.x, 4))
print("multiplier:", out.lam, " iterations:", out.iterations,
      " variables fixed:", out.fixed_count)

x_condat = cq.condat_project(y, 1.0)
x_oracle = cq.oracle_simplex(y, 1.0)
print("max deviation, Newton vs Condat:", np.abs(out.x - x_condat).max())
print("max deviation, Newton vs oracle:", np.abs(out.x - x_oracle).max())

print("\nsum of projection:", out.x.sum(), " (the level r = 1)")
print("support size:", int((out.x > 0).sum()), "of", y.size)

# l1 ball: project |y| onto the simplex, restore signs
x_l1 = cq.project_l1(y, 1.0)
print("\nl1 projection:", np.round(x_l1, 4))
print("l1 norm:", np.abs(x_l1).sum())
print("signs preserved:",
      bool(np.all(np.sign(x_l1[x_l1 != 0]) == np.sign(y[x_l1 != 0]))))

# points already inside the ball pass through untouched
small = 0.1 * y
print("inside-ball point returned unchanged:",
      bool(np.array_equal(cq.project_l1(small, 10.0), small)))

# sparse output returns only the positive entries
idx, vals = cq.newton_project_simplex(y, 1.0, output="sparse").sparse
print("\nsparse output:", list(zip(idx.tolist(), np.round(vals, 4))))
