"""Empirical checks of root drift, the counting function and eigenvalue growth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DepthError
from .model import Family, GammaLaw, ModeSpec, SolverConfig
from .parallel import ordered_map
from .roots import branch_roots, find_spectrum

MIN_FIT_POINTS = 10
MIN_FIT_DECADES = 1.5


# --- root drift ---------------------------------------------------------------------

@dataclass(frozen=True)
class DriftTable:
    """|z_{k,j} - pi j - pi/4| for Main branch roots; rows (k, j, z, error)."""

    rows: tuple

    def errors(self, j: int) -> list[tuple]:
        return sorted((k, e) for (k, jj, _, e) in self.rows if jj == j)

    def decreasing(self, j: int) -> bool:
        e = [x for _, x in self.errors(j)]
        return all(b < a for a, b in zip(e, e[1:]))

    def at_largest_k(self, j: int) -> float:
        return self.errors(j)[-1][1]


def root_drift(modes, J_set, cfg: SolverConfig) -> DriftTable:
    """Distance of the j-th Main branch root from pi j + pi/4, per mode."""
    J_set = sorted(set(int(j) for j in J_set))

    def one(mode):
        pts = branch_roots(find_spectrum(mode, Family.MAIN, cfg, n_branch=max(J_set)))
        by_branch = {p.branch: p.z for p in pts}
        return [(mode.k, j, by_branch[j], abs(by_branch[j] - math.pi * j - math.pi / 4)) for j in J_set]

    rows = [r for block in ordered_map(one, list(modes)) for r in block]
    return DriftTable(tuple(rows))


# --- slope fits -------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    half_width: float
    points: int
    decades: float


def loglog_fit(x, y, confidence: float = 0.95) -> SlopeFit:
    """Least-squares slope of log y against log x with a t-interval half-width."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    x, y = x[keep], y[keep]
    if x.size < MIN_FIT_POINTS:
        raise ValueError(f"slope fit needs at least {MIN_FIT_POINTS} positive points, got {x.size}")
    decades = float(np.log10(x.max() / x.min()))
    if decades < MIN_FIT_DECADES:
        raise ValueError(f"slope fit needs {MIN_FIT_DECADES} decades, grid spans {decades:.2f}")
    r = stats.linregress(np.log(x), np.log(y))
    t = stats.t.ppf(0.5 + confidence / 2, x.size - 2)
    return SlopeFit(float(r.slope), float(r.intercept), float(t * r.stderr), int(x.size), decades)


# --- counting function ------------------------------------------------------------------

@dataclass(frozen=True)
class CountingReport:
    lam_grid: tuple
    counts: tuple
    fit: SlopeFit | None
    predicted: float
    gated: bool
    tolerance: float

    @property
    def verdict(self) -> bool | None:
        """None when the prediction does not apply (gamma exponent differs from alpha)."""
        if not self.gated or self.fit is None:
            return None
        return abs(self.fit.slope - self.predicted) <= self.tolerance

    def csv_rows(self) -> list[dict]:
        return [dict(lam=repr(l), N=n) for l, n in zip(self.lam_grid, self.counts)]

    def to_json(self) -> dict:
        fit = None if self.fit is None else self.fit.__dict__
        return dict(predicted=self.predicted, gated=self.gated, tolerance=self.tolerance, fit=fit,
                    verdict=self.verdict)


def counting_predicted(alpha: float) -> float:
    return (4 + alpha) / (4 * alpha)


def growth_predicted(alpha: float) -> float:
    return 4 * alpha / (4 + alpha)


def staircase(eigenvalues, lam_grid, multiplicity: int = 1) -> np.ndarray:
    """N(lambda) = multiplicity * #{lambda_n <= lambda}: nondecreasing, right-continuous."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    return multiplicity * np.searchsorted(ev, np.asarray(lam_grid, dtype=float), side="right")


def counting_function(modes, families, lam_grid, cfg: SolverConfig, law: GammaLaw | None = None,
                      next_mode: ModeSpec | None = None, spectra: dict | None = None,
                      tolerance: float = 0.3, fit: bool = True) -> CountingReport:
    """Exact counts of computed eigenvalues below each grid value, and a log-log slope.

    Depth conditions: every (mode, family) spectrum must reach past max(lam_grid),
    and the mode after the last one (``next_mode``) must have its lowest
    eigenvalue above it, otherwise counts are truncated and DepthError is raised.
    The prediction (4 + alpha)/(4 alpha) is compared only when the gamma law
    exponent equals alpha.
    """
    modes = list(modes)
    families = [Family.parse(f) for f in families]
    lam_grid = np.sort(np.asarray(lam_grid, dtype=float))
    lam_max = float(lam_grid[-1])
    spectra = dict(spectra or {})

    def get(job):
        mode, fam = job
        if (mode.k, fam) in spectra:
            return spectra[(mode.k, fam)]
        return [p.lam for p in find_spectrum(mode, fam, cfg)]

    jobs = [(m, f) for m in modes for f in families]
    all_ev = []
    for (mode, fam), ev in zip(jobs, ordered_map(get, jobs)):
        if max(ev) < lam_max:
            raise DepthError(f"insufficient depth: {fam} mode {mode.k} reaches lambda = {max(ev):.6g} "
                             f"< largest grid value {lam_max:.6g}")
        all_ev.extend(ev)
    if next_mode is not None:
        for fam in families:
            low = find_spectrum(next_mode, fam, cfg, n_branch=1)[0].lam
            if low <= lam_max:
                raise DepthError(f"insufficient depth: mode {next_mode.k} ({fam}) already has "
                                 f"eigenvalue {low:.6g} <= {lam_max:.6g}; more modes are needed")
    counts = staircase(all_ev, lam_grid, cfg.multiplicity)
    alpha = modes[0].alpha
    gated = law is not None and math.isclose(law.exponent, alpha)
    sf = loglog_fit(lam_grid, counts) if fit else None
    return CountingReport(tuple(float(x) for x in lam_grid), tuple(int(c) for c in counts), sf,
                          counting_predicted(alpha), gated, tolerance)


def eigen_growth(spectrum, n_range) -> SlopeFit:
    """Slope of log lambda_n against log n over n in n_range (1-based, inclusive)."""
    ev = np.sort(np.asarray(spectrum, dtype=float))
    lo, hi = n_range
    if hi > ev.size:
        raise DepthError(f"insufficient depth: need {hi} eigenvalues, have {ev.size}")
    n = np.arange(lo, hi + 1)
    return loglog_fit(n, ev[lo - 1:hi])


def l03_closed_count(gamma: float, lam) -> np.ndarray:
    """#{j >= 1: (pi j)^4 + gamma <= lambda} = floor((lambda - gamma)^(1/4) / pi)."""
    d = np.clip(np.asarray(lam, dtype=float) - gamma, 0.0, None)
    return np.floor(d ** 0.25 / math.pi).astype(int)
