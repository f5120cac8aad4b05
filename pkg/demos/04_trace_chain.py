# # Regularized traces and the family chain
#
# The regularized trace of one mode is the limit of S_J = sum_{j <= J} (mu_j - lambda_j).
# The predicted common value for all four families is -(q(0) + q(1))/4.
# Computed values say otherwise.  L03 (plain sine basis, no boundary terms)
# lands on -(q(0) + q(1))/4.  Main, L01 and L02 land on -q(0)/4 - q(1)/2: the
# right end, where the eigenparameter enters the boundary conditions, carries
# twice the weight.

import numpy as np

from quarttrace.model import FAMILIES, ModeSpec, PotentialSpec, Profile, SolverConfig
from quarttrace.trace import chain_compare, endpoint_reference

cfg = SolverConfig()
mode = ModeSpec(1, 2.0, 0.25)

for prof, params in (("cos_m", (1,)), ("legendre_centered", (1,))):
    q = PotentialSpec(Profile(prof, params), coefficients=(1.0,))
    rep = chain_compare([mode], q, cfg)
    print(f"q = {prof}{params}: closed form {rep.target:+.5f}")
    for fam, total in rep.totals().items():
        r = rep.records[(1, fam)]
        S = ", ".join(f"{s:+.6f}" for s in r.S)
        print(f"  {fam!s:5s} S_J at J = {r.ladder}: {S} -> {total:+.5f}"
              f"  (endpoint law {endpoint_reference(fam, q.q(1)):+.4f})")
    print(f"  spread {rep.spread():.4f}, {'PASS' if rep.passed else 'FAIL'} at tolerance {rep.chain_tol}")

# The first-order series c_j^2 int q y_j^2 accounts for nearly all of S_J;
# the second-order terms cancel in the sum.

r = rep.records[(1, FAMILIES[0])]
print("Main, 2t - 1 profile, first-order sums:", np.round(r.first_order, 6), " S_J:", np.round(r.S, 6))
