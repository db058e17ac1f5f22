"""Holonomy limits and their geometric convergence rate.

The two-ladder cocycle carries fibre rotations whose gap at level j is
amp * rho^(-theta j), so the holonomy increments realise the extremal decay
profile allowed by the domination margin theta.

Run:  python3 demos/holonomy_decay.py
"""

import math

from cocyclelab import (
    check_domination,
    holonomy_convergence_table,
    stable_holonomy,
    verify_holonomy_axioms,
)
from cocyclelab.fixtures import staircase_cocycle
from cocyclelab.symbolic import SFTSpace, SymbolicPoint, homoclinic_points
from cocyclelab.fixtures import pl_dominated_cocycle

theta = 0.4
coc, x, y = staircase_cocycle(26, theta)
dom = check_domination(coc)
print(f"domination margins: theta_s = {dom.theta_s:.4f}, theta_u = {dom.theta_u:.4f}")

table = holonomy_convergence_table(coc, x, y, 24)
print("\n  n   increment      certified bound")
for n, inc, bound in table.rows[:12]:
    print(f" {n:2d}   {inc:.6e}   {bound:.6e}")
print(" ...")
print(f"\nfitted decay slope: {table.slope:.5f}")
print(f"theoretical rate -theta*log(rho): {-theta * math.log(2):.5f}")

# Holonomies of a generic dominated PL cocycle satisfy the composition and
# equivariance laws exactly (locally constant generators stabilise the limit).
c = pl_dominated_cocycle(SFTSpace.full_shift(2), 1, theta, seed=42)
x0 = SymbolicPoint.fixed(c.space, 0)
pts = homoclinic_points(x0, 3)
rep = verify_holonomy_axioms(c, [(pts[1], pts[8], pts[17])], tol=1e-8)
print("\nholonomy axiom residuals on a stable triple:")
print("  composition :", rep.max_composition_residual)
print("  equivariance:", rep.max_equivariance_residual)

res = stable_holonomy(c, x0, pts[9])
print("\nstable holonomy to", pts[9])
print("  steps used:", res.n_used, " cauchy tail:", res.cauchy_tail)
print("  d(h, id) =", res.identity_distance,
      " ratio to d(x,y)^alpha =", res.distance_alpha_ratio)
