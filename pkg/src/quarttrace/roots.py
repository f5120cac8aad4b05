"""Eigen-roots of each mode and boundary family.

Three kinds of eigenvalue are found:

* branch roots near the seeds pi j + phase (refined from brackets of
  half-width 0.45),
* small real roots below the first bracket (dense sign scan),
* eigenvalues below gamma, where z^4 = lambda - gamma < 0 puts z on the
  diagonal z = a(1 + i).  Only the lambda-dependent families have them.

A dense sign count over the whole range is used to make sure none were missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import charfun as cf
from .errors import RootError
from .model import Family, ModeSpec, SolverConfig

HALF_WIDTH = 0.45
ORIGINS = ("asymptotic_branch", "small_root_scan", "diagonal")


@dataclass(frozen=True)
class SpectralPoint:
    """One eigenvalue of one (mode, family).

    ``z`` is the real root for the first two origins; for ``origin ==
    "diagonal"`` it holds the parameter a of the root a(1 + i), and then
    lambda = gamma - 4 a^4.  ``j`` is the rank in the ascending spectrum,
    ``branch`` the seed index (0 off the branch).
    """

    k: int
    j: int
    family: Family
    z: float
    lam: float
    seed: float
    refine_iterations: int
    residual: float
    origin: str
    branch: int = 0
    coeffs: tuple = field(default=(), compare=False)

    @property
    def is_diagonal(self) -> bool:
        return self.origin == "diagonal"

    def csv_row(self) -> dict:
        return dict(k=self.k, j=self.j, family=str(self.family), z=repr(float(self.z)), **{"lambda": repr(float(self.lam))},
                    residual=f"{self.residual:.3e}", origin=self.origin)


def _with(point: SpectralPoint, **kw) -> SpectralPoint:
    from dataclasses import replace
    return replace(point, **kw)


# --- seeds --------------------------------------------------------------------

def dense_scan_roots(mode: ModeSpec, fam: Family, z_lo: float, z_hi: float, step: float,
                     xtol: float = 1e-14) -> list[float]:
    """All sign changes of the normalized determinant on a uniform grid, refined by brentq."""
    fam = Family.parse(fam)
    zs = np.arange(z_lo, z_hi + 0.5 * step, step)
    d = cf.normalized_det(zs, mode, fam)
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    f = lambda x: float(cf.normalized_det(x, mode, fam))
    return [brentq(f, zs[i], zs[i + 1], xtol=xtol) for i in idx]


def calibrate_phase(mode: ModeSpec, fam: Family, cfg: SolverConfig | None = None) -> float:
    """Offset of large roots from multiples of pi, measured on one mode."""
    fam = Family.parse(fam)
    if fam is Family.MAIN:
        return math.pi / 4
    if fam is Family.L03:
        return 0.0
    step = cfg.grid_step if cfg else 0.01
    r = np.array(dense_scan_roots(mode, fam, math.pi, 8 * math.pi, step))
    if r.size == 0:
        raise RootError(f"phase calibration found no roots for {fam}")
    return float(np.median(np.mod(r, math.pi)))


def seeds(fam: Family, J_max: int, phase: float | None = None) -> np.ndarray:
    """Asymptotic seeds pi j + phase, j = 1..J_max."""
    fam = Family.parse(fam)
    if J_max < 1:
        raise ValueError("J_max must be at least 1")
    if phase is None:
        if fam in (Family.L01, Family.L02):
            raise ValueError(f"{fam} seeds need a calibrated phase")
        phase = math.pi / 4 if fam is Family.MAIN else 0.0
    return math.pi * np.arange(1, J_max + 1) + phase


# --- refinement ---------------------------------------------------------------

def refine(fun, lo: float, hi: float, tol: float, x0: float | None = None, max_iter: int = 100):
    """Newton iteration kept inside a sign-change bracket, bisecting when it leaves.

    ``fun(x)`` returns (f, f').  Returns (root, iterations).  Converged when a
    step or the bracket width drops strictly below ``tol``.
    """
    flo, _ = fun(lo)
    fhi, _ = fun(hi)
    if flo == 0:
        return lo, 0
    if fhi == 0:
        return hi, 0
    if np.sign(flo) == np.sign(fhi):
        raise RootError(f"no sign change in [{lo:.6g}, {hi:.6g}]; try a dense scan of the interval")
    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else x0
    for it in range(1, max_iter + 1):
        f, df = fun(x)
        if np.sign(f) == np.sign(flo):
            lo, flo = x, f
        else:
            hi = x
        xn = x - f / df if df != 0 else math.nan
        if abs(xn - x) < tol:
            return _polish(fun, xn if lo <= xn <= hi else x, lo, hi), it
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        step, x = xn - x, xn
        if abs(step) < tol or hi - lo < tol:
            return _polish(fun, x, lo, hi), it
    raise RootError(f"max iterations ({max_iter}) reached near z = {x:.15g}")


def _polish(fun, x, lo, hi, steps=3):
    # a few plain Newton steps, kept while |f| keeps falling
    f, df = fun(x)
    for _ in range(steps):
        if f == 0 or df == 0:
            break
        xn = x - f / df
        if not lo <= xn <= hi:
            break
        fn, dfn = fun(xn)
        if abs(fn) >= abs(f):
            break
        x, f, df = xn, fn, dfn
    return x


def _det_fun(mode, fam):
    def fun(x):
        d, dd, _ = cf.scaled_det(x, mode, fam)
        return float(d), float(dd)
    return fun


def _residual(mode, fam, z):
    return abs(float(cf.normalized_det(z, mode, fam)))


def bracket_and_refine(mode: ModeSpec, fam: Family, seed: float, cfg: SolverConfig,
                       branch: int = 0, half_width: float = HALF_WIDTH) -> SpectralPoint:
    """Refine the single root in [seed - half_width, seed + half_width]."""
    fam = Family.parse(fam)
    lo, hi = max(seed - half_width, 1e-12), seed + half_width
    z, its = refine(_det_fun(mode, fam), lo, hi, cfg.root_tol, x0=seed)
    return SpectralPoint(mode.k, 0, fam, z, z ** 4 + mode.gamma, seed, its,
                         _residual(mode, fam, z), "asymptotic_branch", branch)


def small_root_scan(mode: ModeSpec, fam: Family, cfg: SolverConfig, z_max: float | None = None,
                    phase: float | None = None) -> list[SpectralPoint]:
    """Real roots below the first bracket, located by a sign scan at ``cfg.grid_step``.

    The scan stops where the first bracket starts, so nothing falls in between.
    """
    fam = Family.parse(fam)
    if z_max is None:
        if phase is None:
            phase = calibrate_phase(mode, fam, cfg)
        z_max = seeds(fam, 1, phase)[0] - HALF_WIDTH
    step = cfg.grid_step
    zs = np.arange(step, z_max + 0.5 * step, step)
    zs = zs[zs <= z_max]
    d = cf.normalized_det(zs, mode, fam)
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    out = []
    for i in idx:
        z, its = refine(_det_fun(mode, fam), zs[i], zs[i + 1], cfg.root_tol)
        out.append(SpectralPoint(mode.k, 0, fam, z, z ** 4 + mode.gamma, 0.5 * (zs[i] + zs[i + 1]), its,
                                 _residual(mode, fam, z), "small_root_scan"))
    return out


# --- eigenvalues below gamma ----------------------------------------------------

def _scaled_hyp(w):
    x, y = w.real, w.imag
    sx = np.sign(x) * (-0.5 * np.expm1(-2 * np.abs(x)))
    cx = 0.5 * (1 + np.exp(-2 * np.abs(x)))
    return sx * np.cos(y) + 1j * cx * np.sin(y), cx * np.cos(y) + 1j * sx * np.sin(y)


def diagonal_forms(a, mode: ModeSpec, fam: Family, lam=None):
    """Boundary forms on Shat(t) = exp(-a) sh(w t), w = a(1 + i), at lambda = gamma - 4a^4.

    Returns the complex values B1, B2 of the two right-end forms and the
    values P_m = Shat^(m)(1), m = 0..3.  A real solution A Re Shat + B Im Shat
    satisfies a form iff A Re B + B Im B = 0.
    """
    a = np.asarray(a, dtype=float)
    w = a * (1 + 1j)
    sh, ch = _scaled_hyp(w)
    P = [sh, w * ch, w * w * sh, w ** 3 * ch]
    if lam is None:
        lam = mode.gamma - 4 * a ** 4
    p = lam * mode.weight
    om2 = P[2] - p * P[1]
    if fam is Family.MAIN:
        return P[3] + p * P[0], om2, P
    if fam is Family.L01:
        return P[0], om2, P
    raise ValueError(f"{fam} has no eigenvalues below gamma")


def diagonal_det(a, mode: ModeSpec, fam: Family, lam=None):
    """Normalized real determinant Im(conj(B1) B2) / (|B1| |B2|)."""
    B1, B2, _ = diagonal_forms(a, mode, Family.parse(fam), lam)
    n = np.abs(B1) * np.abs(B2)
    return np.imag(np.conj(B1) * B2) / np.where(n > 0, n, 1.0)


def diagonal_coefficients(a: float, mode: ModeSpec, fam: Family, lam=None) -> tuple[float, float]:
    """(A, B) with y = A Re Shat + B Im Shat satisfying both forms, scaled to unit length."""
    B1, B2, _ = diagonal_forms(a, mode, fam, lam)
    B = B1 if abs(B1) >= abs(B2) else B2
    A_, B_ = float(np.imag(B)), float(-np.real(B))
    n = math.hypot(A_, B_)
    return A_ / n, B_ / n


def diagonal_scan(mode: ModeSpec, fam: Family, cfg: SolverConfig) -> list[SpectralPoint]:
    """Eigenvalues in (0, gamma) for the lambda-dependent families."""
    fam = Family.parse(fam)
    if not fam.lambda_dependent:
        return []
    a_max = (mode.gamma / 4) ** 0.25
    step = min(cfg.grid_step, a_max / 50)
    # uniform in a for the oscillations, geometric in lambda near lambda -> 0,
    # where eigenvalues crowd against a_max
    lam = mode.gamma * np.geomspace(1e-14, 1.0, 600, endpoint=False)
    grid = np.union1d(np.arange(step, a_max, step), ((mode.gamma - lam) / 4) ** 0.25)
    grid = grid[(grid > 0) & (grid < a_max)]
    d = diagonal_det(grid, mode, fam)
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    # refine in lambda: near a_max a tolerance in a is amplified by 16 a^3
    a_of = lambda lam: ((mode.gamma - lam) / 4) ** 0.25
    f = lambda lam: float(diagonal_det(a_of(lam), mode, fam, lam))
    out = []
    for i in idx:
        l_hi, l_lo = (mode.gamma - 4 * grid[i] ** 4, mode.gamma - 4 * grid[i + 1] ** 4)
        lam, r = brentq(f, l_lo, l_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, full_output=True)
        a = a_of(lam)
        out.append(SpectralPoint(mode.k, 0, fam, a, lam, 0.5 * (grid[i] + grid[i + 1]),
                                 r.iterations, abs(f(lam)), "diagonal",
                                 coeffs=diagonal_coefficients(a, mode, fam, lam)))
    return out


# --- full spectrum ----------------------------------------------------------------

def find_spectrum(mode: ModeSpec, fam: Family, cfg: SolverConfig, n_points: int | None = None,
                  n_branch: int | None = None, phase: float | None = None,
                  verify: bool = True) -> list[SpectralPoint]:
    """Ascending eigenvalues of one (mode, family).

    Either ``n_points`` (total count, below-branch eigenvalues included) or
    ``n_branch`` (branch roots) fixes the depth; default is ``cfg.J_max``
    branch roots.  With ``verify`` a dense sign count over the scanned
    range must equal the number of real roots found.
    """
    fam = Family.parse(fam)
    if phase is None:
        phase = calibrate_phase(mode, fam, cfg)
    below = diagonal_scan(mode, fam, cfg) + small_root_scan(mode, fam, cfg, phase=phase)
    if n_points is not None:
        n_branch = n_points - len(below)
    elif n_branch is None:
        n_branch = cfg.J_max
    if n_branch < 1:
        raise RootError("requested depth leaves no branch roots")
    sd = seeds(fam, n_branch, phase)
    branch = [bracket_and_refine(mode, fam, s, cfg, branch=j) for j, s in enumerate(sd, start=1)]
    if verify:
        z_hi = sd[-1] + HALF_WIDTH
        n_real = sum(1 for p in below if not p.is_diagonal) + len(branch)
        zs = np.arange(cfg.grid_step, z_hi, cfg.grid_step)
        d = cf.normalized_det(zs, mode, fam)
        n_scan = int(np.count_nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0))
        if n_scan != n_real:
            raise RootError(f"{fam} mode {mode.k}: dense scan sees {n_scan} roots below z = {z_hi:.3f}, "
                            f"refinement found {n_real}")
        gaps = np.diff([p.z for p in branch])
        if gaps.size and not np.all(np.abs(gaps - math.pi) < 0.5):
            raise RootError(f"{fam} mode {mode.k}: branch roots not pi-separated")
    pts = sorted(below + branch, key=lambda p: p.lam)
    return [_with(p, j=i) for i, p in enumerate(pts, start=1)]


def branch_roots(points) -> list[SpectralPoint]:
    return [p for p in points if p.origin == "asymptotic_branch"]


# --- checks -------------------------------------------------------------------------

def imaginary_twin_check(p: SpectralPoint, mode: ModeSpec) -> float:
    """|normalized Main determinant at i z| for a real Main root z."""
    if p.family is not Family.MAIN:
        raise ValueError("the imaginary-twin identity is a Main-family property")
    if p.is_diagonal:
        raise ValueError("the imaginary-twin check needs a real root")
    return abs(cf.char_det_complex(1j * p.z, mode))


@dataclass(frozen=True)
class DiagonalReport:
    """Sign scan of K on (0, y_max]."""

    gamma: float
    alpha: float
    y_max: float
    step: float
    roots: tuple
    lambdas: tuple
    last_change: float
    constant_sign: float

    @property
    def certified_from(self) -> float:
        """K keeps one sign on [certified_from, y_max]."""
        return self.last_change


def complex_diag_exclusion(mode: ModeSpec, y_max: float = 50.0, cfg: SolverConfig | None = None,
                           step: float | None = None) -> DiagonalReport:
    """Locate the roots z = y(1 +- i) of the Main determinant via K, and certify none lie beyond."""
    if y_max < 5:
        raise ValueError("y_max must be at least 5")
    step = step or (cfg.grid_step if cfg else 0.01)
    ys = np.arange(step, y_max + 0.5 * step, step)
    kv = cf.K(ys, mode).mantissa
    idx = np.nonzero(np.sign(kv[:-1]) * np.sign(kv[1:]) < 0)[0]
    f = lambda y: float(cf.K(y, mode).mantissa)
    roots = tuple(brentq(f, ys[i], ys[i + 1], xtol=1e-15) for i in idx)
    last = float(ys[idx[-1] + 1]) if idx.size else float(ys[0])
    return DiagonalReport(mode.gamma, mode.alpha, y_max, step, roots,
                          tuple(mode.gamma - 4 * y ** 4 for y in roots), last, float(np.sign(kv[-1])))
