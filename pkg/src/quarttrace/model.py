"""Problem configuration: modes, boundary families, potentials, solver settings.

Each mode k is the scalar problem

    y'''' + gamma_k y = lambda y,   0 < t < 1,   y(0) = y''(0) = 0,

closed at t = 1 by one of four boundary families.  The first two families
carry lambda in their boundary forms, which places the operator in the
direct sum L2(0,1) + C^2 with weights gamma^alpha on the boundary parts.
"""

from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import eval_legendre

from .errors import ConfigError


@dataclass(frozen=True)
class ModeSpec:
    """One scalar mode: index ``k``, coefficient eigenvalue ``gamma``, exponent ``alpha``."""

    k: int
    gamma: float
    alpha: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"mode index must be a positive integer, got {self.k}")
        if not self.gamma > 1.0:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        _check_alpha(self.alpha)

    @property
    def weight(self) -> float:
        """Boundary weight gamma**alpha of the direct-sum inner product."""
        return self.gamma ** self.alpha


def _check_alpha(alpha):
    if not 0.0 < alpha < 0.5:
        raise ConfigError(f"alpha out of range: need 0 < alpha < 1/2, got {alpha}")


@dataclass(frozen=True)
class GammaLaw:
    """Growth rule gamma_k = base + scale * k**exponent."""

    base: float = 1.0
    scale: float = 1.0
    exponent: float = 4.0

    def __post_init__(self):
        if not (self.base > 0 and self.scale > 0 and self.exponent > 0):
            raise ConfigError("gamma law needs base > 0, scale > 0, exponent > 0")
        if not self(1) > 1.0:
            raise ConfigError(f"gamma must exceed 1: gamma_1 = {self(1)}")

    def __call__(self, k):
        return self.base + self.scale * np.asarray(k, dtype=float) ** self.exponent


def build_modes(gamma_law: GammaLaw, alpha: float, K_max: int) -> list[ModeSpec]:
    """Modes 1..K_max with strictly increasing gamma."""
    _check_alpha(alpha)
    if K_max < 1:
        raise ConfigError("K_max must be at least 1")
    gammas = gamma_law(np.arange(1, K_max + 1))
    return [ModeSpec(k, float(g), alpha) for k, g in enumerate(gammas, start=1)]


class Family(enum.Enum):
    """Right-end boundary families; the left end is always y(0) = y''(0) = 0.

    MAIN: -y'''(1) = lambda w y(1),  y''(1) = lambda w y'(1)
    L01:  y(1) = 0,                  y''(1) = lambda w y'(1)
    L02:  y(1) = 0,                  y'(1) = 0
    L03:  y(1) = 0,                  y''(1) = 0
    with w = gamma**alpha.
    """

    MAIN = "Main"
    L01 = "L01"
    L02 = "L02"
    L03 = "L03"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        for fam in cls:
            if str(name).strip().lower() == fam.value.lower():
                return fam
        raise ConfigError(f"unknown boundary family {name!r}; choose from Main, L01, L02, L03")

    @property
    def lambda_dependent(self) -> bool:
        return self in (Family.MAIN, Family.L01)

    @property
    def boundary_components(self) -> tuple[bool, bool]:
        """Which of (y(1), y'(1)) enter the norm with weight gamma**alpha."""
        return {Family.MAIN: (True, True), Family.L01: (False, True)}.get(self, (False, False))

    def __str__(self):
        return self.value


FAMILIES = tuple(Family)


# --- potential profiles -----------------------------------------------------

def _cos_m(m=1):
    m = int(m)
    return lambda t: np.cos(2 * np.pi * m * np.asarray(t, dtype=float))


def _legendre_centered(n=2):
    n = int(n)
    # P_n(2t-1) integrates to zero on [0,1] for n >= 1; n = 0 centres to zero
    if n == 0:
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return lambda t: eval_legendre(n, 2 * np.asarray(t, dtype=float) - 1)


def _quartic_centered():
    return lambda t: (np.asarray(t, dtype=float) - 0.5) ** 4 - 1.0 / 80


PROFILES: dict[str, Callable[..., Callable]] = {
    "cos_m": _cos_m,
    "legendre_centered": _legendre_centered,
    "quartic_centered": _quartic_centered,
}


@dataclass(frozen=True)
class Profile:
    """Named profile g(t) from the registry, or a user callable."""

    name: str
    params: tuple = ()
    func: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.func is None:
            if self.name not in PROFILES:
                raise ConfigError(f"unknown profile {self.name!r}; registry has {sorted(PROFILES)}")
            object.__setattr__(self, "func", PROFILES[self.name](*self.params))

    def __call__(self, t):
        return self.func(t)


@dataclass(frozen=True)
class PotentialSpec:
    """Diagonal potential q_k(t) = c_k g(t).

    Coefficients come either from the rule ``c0 / k**power`` or from an
    explicit list (entries beyond its end are zero).
    """

    profile: Profile
    c0: float = 1.0
    power: float = 2.0
    coefficients: tuple | None = None
    mean_tol: float = 1e-10

    def coefficient(self, k: int) -> float:
        if self.coefficients is not None:
            return float(self.coefficients[k - 1]) if k <= len(self.coefficients) else 0.0
        return self.c0 / k ** self.power

    def q(self, k: int) -> Callable:
        c = self.coefficient(k)
        g = self.profile
        return lambda t: c * g(t)

    def scaled(self, s: float) -> "PotentialSpec":
        if self.coefficients is not None:
            return PotentialSpec(self.profile, coefficients=tuple(s * c for c in self.coefficients),
                                 mean_tol=self.mean_tol)
        return PotentialSpec(self.profile, c0=s * self.c0, power=self.power, mean_tol=self.mean_tol)

    @property
    def summable(self) -> bool:
        return self.coefficients is not None or self.power > 1 or self.c0 == 0


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings; defaults give the desk-scale runs."""

    K_max: int = 1
    J_max: int = 40
    grid_step: float = 0.01
    root_tol: float = 1e-12
    quad_panels: int = 2000
    galerkin_dim: int = 200
    rk4_steps: int = 2000
    ladder: tuple = (10, 20, 40)
    chain_tol: float = 1e-2
    include_below_branch: bool = True
    multiplicity: int = 1

    def __post_init__(self):
        if self.K_max < 1 or self.J_max < 1:
            raise ConfigError("K_max and J_max must be positive")
        if self.galerkin_dim < 2 * self.J_max:
            raise ConfigError(f"Galerkin dimension {self.galerkin_dim} must be >= 2*J_max = {2 * self.J_max}")
        if not 0 < self.grid_step < 0.25:
            raise ConfigError("grid step must lie in (0, 1/4)")
        if self.root_tol < 0:
            raise ConfigError("root tolerance must be nonnegative")
        if self.quad_panels < 2 or self.quad_panels % 2:
            raise ConfigError("quadrature panels must be a positive even integer")
        if self.rk4_steps < 8:
            raise ConfigError("too few RK4 steps")
        if self.multiplicity not in (1, 2):
            raise ConfigError("multiplicity must be 1 or 2")
        if any(J < 1 for J in self.ladder) or list(self.ladder) != sorted(self.ladder):
            raise ConfigError("ladder must be increasing positive integers")
        if self.ladder and self.ladder[-1] > self.J_max:
            raise ConfigError(f"ladder top {self.ladder[-1]} exceeds J_max = {self.J_max}")

    def replace(self, **kw) -> "SolverConfig":
        from dataclasses import replace
        return replace(self, **kw)


# --- quadrature helper shared by validation and assembly -------------------

def simpson_weights(panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson on [0, 1] with an even panel count."""
    if panels < 2 or panels % 2:
        raise ConfigError("Simpson needs an even number of panels")
    t = np.linspace(0.0, 1.0, panels + 1)
    w = np.full(panels + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return t, w / (3.0 * panels)


@dataclass(frozen=True)
class PotentialReport:
    abs_coeff_sum: float
    mean: float
    mean_tol: float
    summable: bool

    @property
    def mean_ok(self) -> bool:
        return abs(self.mean) <= self.mean_tol

    @property
    def ok(self) -> bool:
        return self.mean_ok and self.summable and math.isfinite(self.abs_coeff_sum)


def validate_potential(p: PotentialSpec, cfg: SolverConfig, panels: int | None = None) -> PotentialReport:
    """Check summability of c_k over 1..K_max and the zero-mean condition on g."""
    t, w = simpson_weights(panels or max(cfg.quad_panels, 10_000))
    mean = float(w @ p.profile(t))
    total = float(sum(abs(p.coefficient(k)) for k in range(1, cfg.K_max + 1)))
    return PotentialReport(total, mean, p.mean_tol, p.summable)


def require_valid_potential(p: PotentialSpec, cfg: SolverConfig) -> PotentialReport:
    rep = validate_potential(p, cfg)
    if not rep.mean_ok:
        raise ConfigError(f"potential profile must have zero mean: integral of g = {rep.mean:.6g}")
    if not rep.ok:
        raise ConfigError("potential coefficients are not summable")
    return rep


# --- configuration files ------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    gamma_law: GammaLaw
    alpha: float
    potential: PotentialSpec | None
    solver: SolverConfig

    def modes(self) -> list[ModeSpec]:
        return build_modes(self.gamma_law, self.alpha, self.solver.K_max)


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(",", " ").split())


def parse_config(text: str) -> RunConfig:
    """Parse the INI-style text with [operator], [potential], [solver] sections."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if "operator" not in cp:
        raise ConfigError("config needs an [operator] section")
    try:
        op = cp["operator"]
        law = GammaLaw(op.getfloat("gamma_base", 1.0), op.getfloat("gamma_scale", 1.0),
                       op.getfloat("gamma_exponent", 4.0))
        alpha = op.getfloat("alpha", 0.25)
        _check_alpha(alpha)

        potential = None
        if "potential" in cp:
            ps = cp["potential"]
            params = _ints(ps.get("params", "")) if ps.get("params") else ()
            prof = Profile(ps.get("profile", "cos_m"), params)
            coeffs = ps.get("coefficients")
            if coeffs:
                potential = PotentialSpec(prof, coefficients=tuple(float(x) for x in coeffs.replace(",", " ").split()),
                                          mean_tol=ps.getfloat("mean_tol", 1e-10))
            else:
                potential = PotentialSpec(prof, c0=ps.getfloat("c0", 1.0), power=ps.getfloat("power", 2.0),
                                          mean_tol=ps.getfloat("mean_tol", 1e-10))

        sv = cp["solver"] if "solver" in cp else {}
        get = (lambda key, conv, default: conv(sv[key]) if key in sv else default)
        kw = dict(
            K_max=get("modes", int, 1),
            J_max=get("roots_per_mode", int, 40),
            grid_step=get("grid_step", float, 0.01),
            root_tol=get("root_tol", float, 1e-12),
            quad_panels=get("quad_panels", int, 2000),
            galerkin_dim=get("galerkin_dim", int, 200),
            rk4_steps=get("rk4_steps", int, 2000),
            chain_tol=get("chain_tol", float, 1e-2),
            multiplicity=get("multiplicity", int, 1),
            include_below_branch=get("include_below_branch",
                                     lambda s: s.strip().lower() in ("1", "true", "yes", "on"), True),
        )
        if "ladder" in sv:
            kw["ladder"] = _ints(sv["ladder"])
        else:
            kw["ladder"] = tuple(J for J in (10, 20, 40) if J <= kw["J_max"]) or (kw["J_max"],)
        solver = SolverConfig(**kw)
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    return RunConfig(law, alpha, potential, solver)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def mode_q(potential: PotentialSpec | None, k: int) -> Callable:
    """q_k as a callable; the zero function when no potential is configured."""
    if potential is None:
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return potential.q(k)

