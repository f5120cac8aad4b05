"""Regularized traces: partial sums of mu_j - lambda_j and their cross-checks.

Per (mode, family) the perturbed and unperturbed spectra are paired by
ascending index and summed over a ladder of J.  The limit is estimated by
assuming a C/J tail.  Independent views of the same number are the
first-order series sum_j c_j^2 int q y_j^2, the residue sums of F_k over
its two pole families, and the endpoint closed form -(q(0) + q(1))/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import zeta

from . import charfun as cf
from .errors import NumericalError, PairingError, PoleError, QuarttraceError
from .model import FAMILIES, Family, ModeSpec, PotentialSpec, SolverConfig, mode_q, simpson_weights
from .norming import function_values, normalize_all
from .parallel import ordered_map
from .perturb import assemble, converged_eigenvalues, galerkin_basis, perturbed_eigenvalues
from .roots import find_spectrum


@dataclass(frozen=True)
class ModeTrace:
    """Trace data of one (mode, family).

    ``S`` are the partial sums at ``ladder``; ``first_order`` the partial
    sums of Q_jj at the same J.  ``skipped`` counts leading eigenvalues
    left out of the sums (below-branch eigenvalues when they are excluded).
    """

    k: int
    family: Family
    ladder: tuple
    S: tuple
    first_order: tuple
    skipped: int
    N: int
    lam: tuple = field(default=(), compare=False, repr=False)
    mu: tuple = field(default=(), compare=False, repr=False)

    def csv_rows(self) -> list[dict]:
        """Paired eigenvalues entering the sums (the top ladder rung)."""
        return [dict(k=self.k, j=j, family=str(self.family), **{"lambda": repr(l)}, mu=repr(m),
                     mu_minus_lambda=repr(m - l), method="galerkin")
                for j, (l, m) in enumerate(zip(self.lam, self.mu), start=self.skipped + 1)]

    @property
    def extrapolated(self) -> float:
        if len(self.ladder) < 2:
            return self.S[-1]
        (J1, J2), (S1, S2) = self.ladder[-2:], self.S[-2:]
        return (J2 * S2 - J1 * S1) / (J2 - J1)

    @property
    def uncertainty(self) -> float:
        return abs(self.S[-1] - self.S[-2]) if len(self.S) > 1 else math.inf

    @property
    def increments_shrinking(self) -> bool:
        inc = np.abs(np.diff(self.S))
        floor = 1e-12
        return bool(np.all((inc[1:] < inc[:-1]) | (inc[1:] <= floor)))


def pairing_guard(lam, mu, J: int, k: int = 0, fam=None):
    """Raise if some |mu_j - lambda_j| exceeds half the local gap for j <= J."""
    lam = np.asarray(lam)
    gaps = np.diff(lam)
    for j in range(J):
        left = gaps[j - 1] if j > 0 else math.inf
        right = gaps[j] if j < gaps.size else math.inf
        if abs(mu[j] - lam[j]) > 0.5 * min(left, right):
            raise PairingError(f"{fam} mode {k}: |mu - lambda| = {abs(mu[j] - lam[j]):.3e} at j = {j + 1} "
                               f"exceeds half the spectral gap; ascending pairing is unsafe")


def mode_trace(mode: ModeSpec, fam: Family, q_k, J_ladder, cfg: SolverConfig, basis=None) -> ModeTrace:
    """Partial sums S_J = sum_{j <= J} (mu_j - lambda_j) over a ladder of J."""
    fam = Family.parse(fam)
    ladder = tuple(int(J) for J in J_ladder)
    if basis is None:
        basis = galerkin_basis(mode, fam, cfg.galerkin_dim, cfg)
    sys = assemble(mode, fam, q_k, basis, cfg)
    mu = converged_eigenvalues(sys)
    skipped = 0
    if not cfg.include_below_branch:
        skipped = sum(1 for p in basis if p.point.origin != "asymptotic_branch")
    top = skipped + max(ladder)
    if top > mu.size:
        raise NumericalError(f"J = {max(ladder)} needs {top} converged eigenvalues; "
                             f"Galerkin dimension {sys.N} keeps {mu.size}")
    pairing_guard(sys.lam, mu, top, mode.k, fam)
    diff = (mu - sys.lam[:mu.size])[skipped:]
    qjj = np.diag(sys.Q)[skipped:mu.size]
    S = tuple(float(diff[:J].sum()) for J in ladder)
    F = tuple(float(qjj[:J].sum()) for J in ladder)
    J = max(ladder)
    return ModeTrace(mode.k, fam, ladder, S, F, skipped, sys.N,
                     tuple(float(x) for x in sys.lam[skipped:skipped + J]),
                     tuple(float(x) for x in mu[skipped:skipped + J]))


def second_order_remainder(mode: ModeSpec, fam: Family, q_k, cfg: SolverConfig, J: int | None = None) -> float:
    """sum_{j <= J} (mu_j - lambda_j - Q_jj); J defaults to the full dimension."""
    basis = galerkin_basis(mode, fam, cfg.galerkin_dim, cfg)
    sys = assemble(mode, fam, q_k, basis, cfg)
    mu = perturbed_eigenvalues(sys)
    J = J or sys.N
    return float((mu[:J] - sys.lam[:J] - np.diag(sys.Q)[:J]).sum())


# --- first-order and residue series -------------------------------------------------

def _panels_for(points, cfg: SolverConfig) -> int:
    z_max = max(p.z for p in points)
    n = max(cfg.quad_panels, math.ceil(40 * z_max))
    return n + n % 2


def first_order_terms(mode: ModeSpec, fam: Family, q_k, J: int, cfg: SolverConfig) -> np.ndarray:
    """c_j^2 int q y_j^2 for the first J eigenvalues in the trace ordering."""
    fam = Family.parse(fam)
    pts = find_spectrum(mode, fam, cfg, n_points=J + 8)
    if not cfg.include_below_branch:
        pts = [p for p in pts if p.origin == "asymptotic_branch"]
    pairs = normalize_all(mode, pts[:J])
    t, w = simpson_weights(_panels_for(pts[:J], cfg))
    qw = w * np.asarray(q_k(t), dtype=float)
    return np.array([pr.c_squared * float(qw @ function_values(pr.point, pr.coeffs, t) ** 2) for pr in pairs])


def first_order_series(mode: ModeSpec, fam: Family, q_k, J: int, cfg: SolverConfig) -> np.ndarray:
    """Partial sums F_1..F_J of sum_j c_j^2 int q_k y_j^2."""
    return np.cumsum(first_order_terms(mode, fam, q_k, J, cfg))


def residue_weight(z: float, mode: ModeSpec, which: str):
    """(a, b) and 4 z^3 / D'(z) at a simple pole z of F = 4 z^3 y^2 / D."""
    st = cf.boundary_state(z, mode, cf.RESIDUE_CONVENTION[which])
    v, dv = st.v, st.dv
    f = cf.RESIDUE_FACTOR[which]
    if which == "F_k":
        dD = dv[0] * st.omega1 + v[0] * st.domega1
    elif which == "F1k":
        dD = -f * (dv[1] * st.omega2 + v[1] * st.domega2)
    elif which == "F2k":
        dD = f * (dv[1] * v[2] + v[1] * dv[2])
    else:
        raise ValueError(f"unknown residue function {which!r}")
    return st.ab, 4 * z ** 3 / dD


POLE_FAMILIES = {"F_k": (Family.MAIN, Family.L01), "F1k": (Family.L01, Family.L02),
                 "F2k": (Family.L02, Family.L03)}


@dataclass(frozen=True)
class ResidueCheck:
    """Sums of int res F q over the two pole families of one residue function.

    ``z_side`` is sum over the first pole family; ``beta_side`` is minus the
    sum over the second.  Both equal the first-order trace in the limit.
    """

    k: int
    which: str
    ladder: tuple
    z_side: tuple
    beta_side: tuple

    @property
    def gaps(self) -> tuple:
        return tuple(abs(a - b) for a, b in zip(self.z_side, self.beta_side))

    @property
    def gap_decreasing(self) -> bool:
        g = self.gaps
        return all(b < a or b <= 1e-12 for a, b in zip(g, g[1:]))


def _residue_terms(mode, fam, which, sign, q_k, J, cfg):
    """sign * int res F q per eigenvalue, ascending in lambda, first J of them.

    The residue at a real pole already carries the pole family's sign from
    charfun.RESIDUE_SIGN; ``sign`` is +1 for the z side, -1 for the beta side.
    """
    pts = find_spectrum(mode, fam, cfg, n_points=J + 8)
    if not cfg.include_below_branch:
        pts = [p for p in pts if p.origin == "asymptotic_branch"]
    pts = pts[:J]
    t, w = simpson_weights(_panels_for(pts, cfg))
    qw = w * np.asarray(q_k(t), dtype=float)
    out = []
    for p in pts:
        if p.is_diagonal:
            # residue in lambda of the same function: the first-order term itself
            pr = normalize_all(mode, [p])[0]
            out.append(pr.c_squared * float(qw @ function_values(p, pr.coeffs, t) ** 2))
        else:
            ab, r = residue_weight(p.z, mode, which)
            out.append(sign * r * float(qw @ cf.eigenfunction(p.z, t, ab) ** 2))
    return np.array(out), [p.z for p in pts if not p.is_diagonal]


def residue_series_check(mode: ModeSpec, q_k, J_ladder, cfg: SolverConfig, which: str = "F_k") -> ResidueCheck:
    """Compare sum_j int res_{z_j} F q against -sum_j int res_{beta_j} F q.

    Residues at real poles are taken in z.  Eigenvalues below gamma (z on
    the diagonal) enter through c^2 int q y^2, the residue in lambda, when
    include_below_branch is set.  Both sides run over the first J
    eigenvalues of their family in ascending order.
    """
    ladder = tuple(int(J) for J in J_ladder)
    fz, fb = POLE_FAMILIES[which]
    J = max(ladder)
    rz, zs = _residue_terms(mode, fz, which, +1.0, q_k, J, cfg)
    rb, bs = _residue_terms(mode, fb, which, -1.0, q_k, J, cfg)
    # a z root sitting on a beta root makes both residues meaningless
    if zs and bs and np.min(np.abs(np.subtract.outer(zs, bs))) < 1e-9:
        raise PoleError(f"{which}: pole families collide in mode {mode.k}")
    return ResidueCheck(mode.k, which, ladder, tuple(float(rz[:J].sum()) for J in ladder),
                        tuple(float(rb[:J].sum()) for J in ladder))


def residue_limit_oracle(mode: ModeSpec, pair, which: str, t, h: float = 1e-7) -> np.ndarray:
    """lim (z - z*) F(z, t) at a real root from symmetric differences.

    g(h) = h (F(z* + h) - F(z* - h)) / 2 has error O(h^2 / d^2), d the distance
    to the nearest other pole; one Richardson step removes the h^2 term.
    L01 and L02 poles approach each other as z grows, which makes this matter.
    """
    z = pair.point.z

    def g(step):
        return 0.5 * step * (cf.residue_integrand(z + step, t, mode, which)
                             - cf.residue_integrand(z - step, t, mode, which))

    return (4 * g(0.5 * h) - g(h)) / 3


# --- closed form ---------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    partial: float
    limit: float | None
    K: int


def closed_form(q: PotentialSpec, K: int) -> ClosedForm:
    """-sum_{k <= K} (q_k(0) + q_k(1))/4 and, when known, its K -> infinity limit."""
    ends = float(q.profile(np.array([0.0]))[0] + q.profile(np.array([1.0]))[0])
    partial = -sum(q.coefficient(k) for k in range(1, K + 1)) * ends / 4
    limit = None
    if q.coefficients is not None:
        limit = -sum(q.coefficients) * ends / 4
    elif q.power > 1:
        limit = -q.c0 * float(zeta(q.power)) * ends / 4
    elif ends == 0 or q.c0 == 0:
        limit = 0.0
    return ClosedForm(partial, limit, K)


def exact_partial_zeta(K: int, power: int = 2) -> Fraction:
    """sum_{k <= K} k^-power in rational arithmetic."""
    return sum((Fraction(1, k ** power) for k in range(1, K + 1)), Fraction(0))


def endpoint_reference(fam: Family, q_k) -> float:
    """Endpoint value the partial sums are observed to approach.

    L03 (no boundary terms, sine basis) gives -(q(0) + q(1))/4.  Main, L01
    and L02 are observed to give -q(0)/4 - q(1)/2: the right end carries
    the extra weight.  Informational; not a pass criterion.
    """
    q0, q1 = (float(np.asarray(q_k(np.array([x])), dtype=float).ravel()[0]) for x in (0.0, 1.0))
    fam = Family.parse(fam)
    if fam is Family.L03:
        return -(q0 + q1) / 4
    return -q0 / 4 - q1 / 2


# --- chain --------------------------------------------------------------------------

def _record_order(item):
    (k, fam), _ = item
    return k, FAMILIES.index(fam)


@dataclass
class TraceReport:
    families: tuple
    ladder: tuple
    modes: tuple
    records: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    target: float = 0.0
    target_limit: float | None = None
    chain_tol: float = 1e-2

    def totals(self) -> dict:
        out = {}
        for fam in self.families:
            if fam in self.errors:
                continue
            out[fam] = sum(self.records[(k, fam)].extrapolated for k in self.modes)
        return out

    def partial_totals(self) -> dict:
        """Sum over modes of S at each ladder rung."""
        return {fam: tuple(sum(self.records[(k, fam)].S[i] for k in self.modes) for i in range(len(self.ladder)))
                for fam in self.families if fam not in self.errors}

    def spread(self) -> float:
        v = list(self.totals().values())
        return max(v) - min(v) if len(v) > 1 else 0.0

    def pairwise(self) -> dict:
        t = self.totals()
        fams = list(t)
        return {f"{a}-{b}": abs(t[a] - t[b]) for i, a in enumerate(fams) for b in fams[i + 1:]}

    def monotone(self) -> dict:
        return {fam: all(self.records[(k, fam)].increments_shrinking for k in self.modes)
                for fam in self.families if fam not in self.errors}

    @property
    def passed(self) -> bool:
        if self.errors:
            return False
        return self.spread() <= self.chain_tol and all(self.monotone().values())

    def to_json(self) -> dict:
        tot = self.totals()
        return dict(
            families=[str(f) for f in self.families], modes=list(self.modes), ladder=list(self.ladder),
            target=self.target, target_limit=self.target_limit, chain_tol=self.chain_tol,
            totals={str(f): v for f, v in tot.items()},
            partial_totals={str(f): list(v) for f, v in self.partial_totals().items()},
            pairwise=self.pairwise(), spread=self.spread(),
            monotone={str(f): v for f, v in self.monotone().items()},
            errors={str(f): msg for f, msg in self.errors.items()},
            passed=self.passed,
            records=[dict(k=r.k, family=str(r.family), ladder=list(r.ladder), S=list(r.S),
                          first_order=list(r.first_order), extrapolated=r.extrapolated,
                          uncertainty=r.uncertainty, skipped=r.skipped, N=r.N)
                     for (_, _), r in sorted(self.records.items(), key=_record_order)],
        )

    def csv_rows(self) -> list[dict]:
        rows = []
        for (k, fam), r in sorted(self.records.items(), key=_record_order):
            for J, S, F in zip(r.ladder, r.S, r.first_order):
                rows.append(dict(k=k, family=str(fam), J=J, S_J=repr(S), first_order=repr(F)))
        return rows


def chain_compare(modes, q: PotentialSpec | None, cfg: SolverConfig, families=FAMILIES,
                  ladder=None) -> TraceReport:
    """Extrapolated traces of each family summed over modes, with the closed-form target."""
    modes = list(modes)
    families = tuple(Family.parse(f) for f in families)
    ladder = tuple(ladder or cfg.ladder)
    K = max(m.k for m in modes)
    cf_ = closed_form(q, K) if q is not None else ClosedForm(0.0, 0.0, K)
    rep = TraceReport(families, ladder, tuple(m.k for m in modes), target=cf_.partial,
                      target_limit=cf_.limit, chain_tol=cfg.chain_tol)

    def run(job):
        mode, fam = job
        try:
            return job, mode_trace(mode, fam, mode_q(q, mode.k), ladder, cfg)
        except QuarttraceError as exc:
            return job, exc

    jobs = [(m, f) for m in modes for f in families]
    for (mode, fam), res in ordered_map(run, jobs):
        if isinstance(res, Exception):
            rep.errors.setdefault(fam, f"mode {mode.k}: {res}")
        else:
            rep.records[(mode.k, fam)] = res
    return rep
