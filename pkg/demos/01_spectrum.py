# # Spectra of the four boundary families
#
# Each mode k of the operator reduces to a scalar fourth-order problem on [0, 1]
# with y(0) = y''(0) = 0 and a right-end condition that depends on the family.
# Above gamma the eigenvalues are lambda = z^4 + gamma for real roots z of a
# 2x2 determinant; Main and L01 also have eigenvalues below gamma, at roots
# z = a(1 + i) on the diagonal.

import math

import numpy as np

from quarttrace import charfun as cf
from quarttrace.model import FAMILIES, Family, ModeSpec, SolverConfig
from quarttrace.roots import complex_diag_exclusion, find_spectrum, imaginary_twin_check

mode = ModeSpec(k=1, gamma=2.0, alpha=0.25)
cfg = SolverConfig(J_max=20, galerkin_dim=40, ladder=(10, 20))

# The determinant is stored as mantissa * exp(exponent), so it stays finite far
# beyond the point where sinh(z) overflows.

for z in (10.0, 300.0, 5000.0):
    d = cf.char_det(z, mode, Family.MAIN)
    print(f"z = {z:7.1f}  mantissa {d.mantissa:+.6e}  exponent {d.exponent:.1f}")

# The lowest few eigenvalues of every family, with where each one came from.

for fam in FAMILIES:
    pts = find_spectrum(mode, fam, cfg)
    head = ", ".join(f"{p.lam:.6g} ({p.origin})" for p in pts[:3])
    print(f"{fam!s:5s} {head}")

# Large Main roots approach pi j + pi/4; L03 roots are exactly pi j.

main = [p for p in find_spectrum(mode, Family.MAIN, cfg) if p.origin == "asymptotic_branch"]
for p in main[::5]:
    print(f"j = {p.branch:2d}  z = {p.z:.10f}  z - pi j - pi/4 = {p.z - math.pi * p.branch - math.pi / 4:+.2e}")

l03 = find_spectrum(mode, Family.L03, cfg, n_branch=5)
print("L03 z / pi:", np.round([p.z / math.pi for p in l03], 12))

# Two structural checks.  A real Main root z is also a root at i z, and the
# function K locating diagonal roots keeps one sign beyond a small y.

twin = max(imaginary_twin_check(p, mode) for p in main)
rep = complex_diag_exclusion(mode, 50.0, step=0.1)
print(f"worst |det(i z)| = {twin:.1e}")
print(f"diagonal roots at y = {np.round(rep.roots, 6)}, lambda = {np.round(rep.lambdas, 6)}")
print(f"K keeps sign {rep.constant_sign:+.0f} on [{rep.certified_from:.2f}, 50]")
