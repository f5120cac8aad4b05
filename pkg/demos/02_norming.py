# # Norming constants two ways
#
# For every eigenvalue the squared norm of the eigenvector (function part plus
# boundary parts weighted by gamma^alpha) is computed from elementary
# antiderivatives, and again from the derivative of a Green bracket at the
# root, ||Psi||^2 = G'(z)/(4 z^3).  The two must agree.

import numpy as np

from quarttrace.model import FAMILIES, Family, ModeSpec, SolverConfig, simpson_weights
from quarttrace.norming import direct_sum_inner, eigenvector, normalize_all
from quarttrace.roots import find_spectrum

mode = ModeSpec(1, 2.0, 0.25)
cfg = SolverConfig(J_max=20, galerkin_dim=40, ladder=(10, 20))

for fam in FAMILIES:
    pairs = normalize_all(mode, find_spectrum(mode, fam, cfg))
    worst = max(p.rel_diff for p in pairs)
    print(f"{fam!s:5s} {len(pairs)} pairs, c^2 of first = {pairs[0].c_squared:.10f}, worst rel diff {worst:.1e}")

# L03 eigenfunctions are sin(pi j t), so ||y||^2 = 1/2 and c^2 = 2.

pr = normalize_all(mode, find_spectrum(mode, Family.L03, cfg, n_branch=3))
print("L03 c^2 * b^2:", [round(float(p.c_squared * p.coeffs[1] ** 2), 14) for p in pr])

# Normalized eigenvectors are orthonormal in the direct-sum inner product.

t, w = simpson_weights(8000)
pairs = normalize_all(mode, find_spectrum(mode, Family.MAIN, cfg, n_points=6))
V = [eigenvector(mode, p, t) for p in pairs]
G = np.array([[direct_sum_inner(mode, a, b, t, w) for b in V] for a in V])
print(f"Main Gram matrix off identity by {np.abs(G - np.eye(len(V))).max():.1e}")
