# # Residues of F = 4 z^3 y^2 / D
#
# The trace series can also be written as a sum of residues.  At a simple root
# z* of the characteristic determinant the residue of F(z, t) equals plus or
# minus c^2 y^2(t).  The limit (z - z*) F(z, t) is estimated from symmetric
# differences with one Richardson step, and compared with the norming data.

import numpy as np

from quarttrace import charfun as cf
from quarttrace.model import ModeSpec, SolverConfig
from quarttrace.norming import normalize_all
from quarttrace.roots import find_spectrum
from quarttrace.trace import POLE_FAMILIES, residue_limit_oracle, residue_series_check

mode = ModeSpec(1, 2.0, 0.25)
cfg = SolverConfig()
t = np.array([0.17, 0.43, 0.78])

for which, pair in POLE_FAMILIES.items():
    for fam in pair:
        p = [p for p in find_spectrum(mode, fam, cfg) if not p.is_diagonal][2]
        pr = normalize_all(mode, [p])[0]
        lim = residue_limit_oracle(mode, pr, which, t)
        (a, b), _ = cf.coefficients(p.z, mode, cf.RESIDUE_CONVENTION[which])
        print(f"{which:3s} at a {fam!s:4s} root z = {p.z:.6f}: limit {np.round(lim, 8)}"
              f"  sign {cf.RESIDUE_SIGN[(which, fam)]:+d}")

# Summed against q, the residues over the two pole families of F_k approach
# each other as J grows.

q = lambda s: np.cos(2 * np.pi * np.asarray(s, dtype=float))
chk = residue_series_check(mode, q, (10, 20, 40), cfg, "F_k")
for J, a, b, g in zip(chk.ladder, chk.z_side, chk.beta_side, chk.gaps):
    print(f"J = {J:2d}  z side {a:+.6f}  beta side {b:+.6f}  gap {g:.2e}")
