"""Perturbed eigenvalues mu_{k,j}: Galerkin projection and a shooting oracle.

The perturbation acts on the function component only, QY = {q y, 0, 0}, so
in the orthonormal unperturbed eigenbasis the perturbed operator is the
symmetric matrix diag(lambda) + Q with Q_jl = c_j c_l int q y_j y_l dt.

The shooting solver integrates y'''' = (mu - gamma - q) y with RK4 on the
six 2x2 minors of the two-solution matrix (the compound-matrix form), which
stays well conditioned where the solutions themselves grow like exp(z t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NumericalError, QuadratureError, RootError
from .model import Family, ModeSpec, SolverConfig, simpson_weights
from .norming import NormedEigenpair, eigenvector, normalize_all
from .roots import find_spectrum

ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class GalerkinSystem:
    k: int
    family: Family
    lam: np.ndarray
    Q: np.ndarray
    panels: int
    gram_error: float

    @property
    def N(self) -> int:
        return self.lam.size

    @property
    def kept(self) -> int:
        """Lowest ceil(N/2) eigenvalues are trusted; the rest is polluted."""
        return -(-self.N // 2)


def galerkin_basis(mode: ModeSpec, fam: Family, N: int, cfg: SolverConfig) -> list[NormedEigenpair]:
    """The N lowest normalized unperturbed eigenpairs of one (mode, family)."""
    return normalize_all(mode, find_spectrum(mode, fam, cfg, n_points=N))


def quadrature_panels(basis, cfg: SolverConfig) -> int:
    z_max = max(p.point.z for p in basis)
    n = max(cfg.quad_panels, 8 * len(basis), math.ceil(40 * z_max))
    return n + n % 2


def sample_basis(mode: ModeSpec, basis, t):
    """Function samples (N x len(t)) and stored boundary components (N x 2)."""
    Y = np.empty((len(basis), t.size))
    B = np.zeros((len(basis), 2))
    for i, pair in enumerate(basis):
        y, b0, b1 = eigenvector(mode, pair, t)
        Y[i] = y
        B[i] = (b0 or 0.0, b1 or 0.0)
    return Y, B


def assemble(mode: ModeSpec, fam: Family, q_k, basis, cfg: SolverConfig,
             check_orthogonality: bool = True) -> GalerkinSystem:
    """Matrix of the perturbation in the unperturbed eigenbasis."""
    fam = Family.parse(fam)
    panels = quadrature_panels(basis, cfg)
    t, w = simpson_weights(panels)
    Y, B = sample_basis(mode, basis, t)
    gram_error = 0.0
    if check_orthogonality:
        G = (Y * w) @ Y.T + (B @ B.T) / mode.weight
        gram_error = float(np.abs(G - np.eye(len(basis))).max())
        if gram_error > ORTHO_TOL:
            raise QuadratureError(f"{fam} mode {mode.k}: basis Gram matrix off identity by {gram_error:.3e}")
    qv = np.asarray(q_k(t), dtype=float) * np.ones_like(t)
    Q = (Y * (w * qv)) @ Y.T
    Q = 0.5 * (Q + Q.T)
    lam = np.array([p.lam for p in basis])
    return GalerkinSystem(mode.k, fam, lam, Q, panels, gram_error)


def _graded_eigenvalues(lam, Q):
    """Eigenvalues of diag(lam) + Q with relative accuracy despite the grading.

    A dense symmetric solver is only accurate to eps * max(lam) in absolute
    terms, which swamps the low eigenvalues once lam spans ten decades.  The
    shifted matrix is positive definite by Gershgorin; its Cholesky factor
    is column-graded, and the Jacobi SVD of that factor recovers every
    singular value to high relative accuracy.
    """
    shift = max(0.0, float(np.abs(Q).sum(axis=1).max() - lam.min())) + 1.0
    try:
        L = np.linalg.cholesky(np.diag(lam + shift) + Q)
        sva, _, _, work, _, info = sla.lapack.dgejsv(L, jobu=3, jobv=3)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed: {exc}") from None
    if info != 0:
        raise NumericalError(f"Jacobi SVD failed with info = {info}")
    return np.sort((sva * (work[0] / work[1])) ** 2 - shift)


def perturbed_eigenvalues(sys: GalerkinSystem) -> np.ndarray:
    """All N eigenvalues of diag(lambda) + Q, ascending.

    Basis vectors that Q does not couple to any other are eigenvectors
    already; their eigenvalues lambda_j + Q_jj are returned exactly.
    """
    Q = sys.Q
    off = Q - np.diag(np.diag(Q))
    coupled = np.any(off != 0, axis=0)
    mu = sys.lam + np.diag(Q)
    if np.any(coupled):
        idx = np.nonzero(coupled)[0]
        mu = mu.copy()
        mu[idx] = _graded_eigenvalues(sys.lam[idx], Q[np.ix_(idx, idx)])
    return np.sort(mu)


def converged_eigenvalues(sys: GalerkinSystem) -> np.ndarray:
    return perturbed_eigenvalues(sys)[:sys.kept]


def galerkin_eigenvalues(mode: ModeSpec, fam: Family, q_k, cfg: SolverConfig, N: int | None = None):
    """Convenience pipeline: basis, assembly, kept eigenvalues.  Returns (system, mu)."""
    basis = galerkin_basis(mode, fam, N or cfg.galerkin_dim, cfg)
    sys = assemble(mode, fam, q_k, basis, cfg)
    return sys, converged_eigenvalues(sys)


# --- shooting -------------------------------------------------------------------

# minors m_ij = u1_i u2_j - u1_j u2_i in the order 01, 02, 03, 12, 13, 23
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def boundary_vectors(mode: ModeSpec, fam: Family, mu):
    """Right-end forms acting on (y, y', y'', y''')(1), evaluated at mu."""
    mu = np.asarray(mu, dtype=float)
    one, zero = np.ones_like(mu), np.zeros_like(mu)
    g = mode.weight * mu
    B1 = {Family.MAIN: (g, zero, zero, one), Family.L01: (one, zero, zero, zero),
          Family.L02: (one, zero, zero, zero), Family.L03: (one, zero, zero, zero)}[fam]
    B2 = {Family.MAIN: (zero, -g, one, zero), Family.L01: (zero, -g, one, zero),
          Family.L02: (zero, one, zero, zero), Family.L03: (zero, zero, one, zero)}[fam]
    return B1, B2


def _rhs(m, c):
    m01, m02, m03, m12, m13, m23 = m
    return np.stack([m02, m12 + m03, m13, m13, m23 - c * m01, -c * m02])


def shooting_det(mode: ModeSpec, fam: Family, q_k, mu, steps: int) -> np.ndarray:
    """Right-end boundary determinant at each mu, up to a positive factor.

    Solutions start from y(0) = y''(0) = 0 with (y'(0), y'''(0)) = (1, 0)
    and (0, 1), so only m13 is nonzero at t = 0.  The minors are rescaled
    every step; the factor dropped is positive and continuous in mu.
    """
    fam = Family.parse(fam)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    h = 1.0 / steps
    tq = np.linspace(0.0, 1.0, 2 * steps + 1)
    qv = np.asarray(q_k(tq), dtype=float) * np.ones_like(tq)
    c0 = mu - mode.gamma
    m = np.zeros((6, mu.size))
    m[4] = 1.0
    for i in range(steps):
        ca, cm, cb = c0 - qv[2 * i], c0 - qv[2 * i + 1], c0 - qv[2 * i + 2]
        k1 = _rhs(m, ca)
        k2 = _rhs(m + 0.5 * h * k1, cm)
        k3 = _rhs(m + 0.5 * h * k2, cm)
        k4 = _rhs(m + h * k3, cb)
        m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        m /= np.abs(m).max(axis=0)
    B1, B2 = boundary_vectors(mode, fam, mu)
    return sum((B1[i] * B2[j] - B1[j] * B2[i]) * m[n] for n, (i, j) in enumerate(_PAIRS))


def _illinois(F, a, b, fa, fb, rtol: float, max_iter: int = 200):
    """Vectorized Illinois (modified regula falsi) on brackets [a, b]."""
    a, b, fa, fb = (np.array(x, dtype=float) for x in (a, b, fa, fb))
    side = np.zeros(a.size, dtype=int)
    for _ in range(max_iter):
        if np.all(np.abs(b - a) <= rtol * np.maximum(np.abs(a), np.abs(b)) + 1e-300):
            break
        x = (a * fb - b * fa) / (fb - fa)
        bad = ~((x > np.minimum(a, b)) & (x < np.maximum(a, b)))
        x[bad] = 0.5 * (a[bad] + b[bad])
        fx = F(x)
        left = np.sign(fx) == np.sign(fa)
        # replace the endpoint with the same sign; halve the stale one twice in a row
        fb = np.where(left & (side == 1), 0.5 * fb, fb)
        fa = np.where(~left & (side == -1), 0.5 * fa, fa)
        a, fa = np.where(left, x, a), np.where(left, fx, fa)
        b, fb = np.where(left, b, x), np.where(left, fb, fx)
        side = np.where(left, 1, -1)
        done = fx == 0
        a[done] = b[done] = x[done]
    else:
        raise RootError("shooting refinement did not converge")
    return 0.5 * (a + b)


def _to_mu(s, gamma):
    return gamma + np.sign(s) * s ** 4


def _to_s(mu, gamma):
    d = np.asarray(mu, dtype=float) - gamma
    return np.sign(d) * np.abs(d) ** 0.25


def shooting_eigenvalues(mode: ModeSpec, fam: Family, q_k, search: tuple, cfg: SolverConfig,
                         scan_step: float = 0.02, rtol: float = 1e-14, doubling_tol: float = 1e-5) -> np.ndarray:
    """Eigenvalues in ``search`` = (mu_lo, mu_hi) by RK4 shooting.

    Brackets come from a sign scan uniform in s = sign(mu - gamma)|mu - gamma|^(1/4),
    where roots are roughly pi apart.  Each root is refined with cfg.rk4_steps
    and again with twice as many; relative disagreement above
    ``doubling_tol`` is an error.  The returned value is the Richardson
    combination of the two (RK4 error is fourth order in the step).
    """
    fam = Family.parse(fam)
    lo, hi = map(float, search)
    if not hi > lo:
        raise ValueError("empty search interval")
    n = cfg.rk4_steps
    s_lo, s_hi = _to_s(lo, mode.gamma), _to_s(hi, mode.gamma)
    ns = max(2, math.ceil((s_hi - s_lo) / scan_step))
    grid = _to_mu(np.linspace(s_lo, s_hi, ns + 1), mode.gamma)
    grid[0], grid[-1] = lo, hi
    d = shooting_det(mode, fam, q_k, grid, n)
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    if idx.size == 0:
        return np.empty(0)
    F1 = lambda x: shooting_det(mode, fam, q_k, x, n)
    mu1 = _illinois(F1, grid[idx], grid[idx + 1], d[idx], d[idx + 1], rtol)

    # step doubling: the finer root must lie within doubling_tol of the coarse one
    F2 = lambda x: shooting_det(mode, fam, q_k, x, 2 * n)
    width = doubling_tol * np.maximum(np.abs(mu1), 1.0)
    a, b = mu1 - width, mu1 + width
    fa, fb = F2(a), F2(b)
    if np.any(np.sign(fa) * np.sign(fb) >= 0):
        raise NumericalError(f"RK4 with {n} steps disagrees with {2 * n} steps by more than "
                             f"{doubling_tol:g} relative; increase rk4_steps")
    mu2 = _illinois(F2, a, b, fa, fb, rtol)
    return mu2 + (mu2 - mu1) / 15.0


def shooting_window(lam, count: int, q_sup: float) -> tuple:
    """Interval holding exactly the first ``count`` perturbed eigenvalues.

    Uses |mu_j - lambda_j| <= sup|q|, valid for a bounded symmetric perturbation,
    and requires the gap after lambda_count to exceed 2 sup|q|.
    """
    lam = np.sort(np.asarray(lam, dtype=float))
    if count >= lam.size:
        raise ValueError("need one unperturbed eigenvalue beyond the window")
    if lam[count] - lam[count - 1] <= 2 * q_sup:
        raise NumericalError("perturbation too large to separate the window")
    return lam[0] - q_sup - 1.0, 0.5 * (lam[count - 1] + lam[count])
