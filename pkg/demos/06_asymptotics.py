# # Asymptotic diagnostics
#
# Root drift toward pi j + pi/4 as gamma grows, the L03 counting function
# against its closed form, and the eigenvalue growth exponent.

import numpy as np

from quarttrace.asymptotics import (counting_function, eigen_growth, l03_closed_count, root_drift,
                                    staircase)
from quarttrace.errors import DepthError
from quarttrace.model import FAMILIES, Family, GammaLaw, ModeSpec, SolverConfig, build_modes
from quarttrace.roots import find_spectrum

cfg = SolverConfig()
modes = [ModeSpec(k, 1.0 + k ** 4, 0.25) for k in (1, 5, 20)]
dt = root_drift(modes, (3, 5, 8), cfg)
for j in (3, 5, 8):
    print(f"j = {j}: " + "  ".join(f"k={k} {e:.2e}" for k, e in dt.errors(j)))

# L03 eigenvalues are (pi j)^4 + gamma, so N(lambda) = floor((lambda - gamma)^(1/4) / pi).

m = ModeSpec(1, 2.0, 0.25)
lam = [p.lam for p in find_spectrum(m, Family.L03, cfg)]
grid = np.linspace(0, lam[-1], 2001)
print("staircase matches closed form:", np.array_equal(staircase(lam, grid), l03_closed_count(2.0, grid)))
deep = [p.lam for p in find_spectrum(m, Family.L03, SolverConfig(J_max=300, galerkin_dim=600), n_branch=300)]
print(f"L03 growth exponent over n = 5..300: {eigen_growth(deep, (5, 300)).slope:.4f}")

# The counting-function slope check needs gamma_k = 1 + k^alpha.  Every such mode
# keeps a Main eigenvalue below 1, so N(lambda) is infinite for lambda near 1
# and the fit cannot be made.  The depth guard reports this.

law = GammaLaw(1.0, 1.0, 0.25)
try:
    counting_function(build_modes(law, 0.25, 10), FAMILIES, np.geomspace(10, 1e3, 30), cfg, law=law,
                      next_mode=ModeSpec(11, float(law(11)), 0.25))
except DepthError as exc:
    print("counting slope:", exc)
