"""Norming constants, computed two independent ways, and eigenvectors.

The squared norm of an eigenvector in the direct-sum space is

    ||Y||^2 = int_0^1 y^2 dt + w y(1)^2 + w y'(1)^2,   w = gamma^alpha,

keeping only the boundary terms that the family carries (both for Main,
y'(1) for L01, none for L02/L03).  ``norm_closed`` evaluates it from
elementary antiderivatives.  ``norm_derivative`` gets it from the
z-derivative of the family's Green bracket at the root, G'(z*) / (4 z*^3),
an identity that holds for any smooth coefficient normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import charfun as cf
from .errors import NumericalError
from .model import Family, ModeSpec
from .roots import SpectralPoint, diagonal_forms

# Resolved sign of G'(z*)/(4 z*^3) per family: all positive with the
# brackets written out in charfun.green_form.
NORM_SIGN = {Family.MAIN: +1, Family.L01: +1, Family.L02: +1, Family.L03: +1}

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)
_GL_T, _GL_W = 0.5 * (_GL_X + 1), 0.5 * _GL_W
SMALL_ARG = 0.1


@dataclass(frozen=True)
class NormedEigenpair:
    """Eigenvalue with its normalization data.

    ``coeffs`` is (a, b) in y = a shs(z, t) + b sin(zt) for real roots, and
    (A, B) in y = A Re Shat + B Im Shat for diagonal ones.
    """

    point: SpectralPoint
    c_squared: float
    norm_closed: float
    norm_derivative: float
    coeffs: tuple
    convention: str

    @property
    def rel_diff(self) -> float:
        return abs(self.norm_closed - self.norm_derivative) / self.norm_closed

    @property
    def lam(self) -> float:
        return self.point.lam

    def csv_row(self) -> dict:
        p = self.point
        return dict(k=p.k, j=p.j, family=str(p.family), z=repr(float(p.z)), c_squared=repr(float(self.c_squared)),
                    norm_closed=repr(float(self.norm_closed)), norm_derivative=repr(float(self.norm_derivative)),
                    rel_diff=f"{self.rel_diff:.3e}")


# --- function values -----------------------------------------------------------

def _shat(a, t):
    # exp(-a) sh(w t) with w = a(1 + i)
    w = a * (1 + 1j)
    t = np.asarray(t, dtype=float)
    return 0.5 * (np.exp(w * t - a) - np.exp(-w * t - a))


def function_values(p: SpectralPoint, coeffs: tuple, t):
    """Unnormalized eigenfunction y(t) in the pair's own coefficient convention."""
    if p.is_diagonal:
        A, B = coeffs
        return np.real((A - 1j * B) * _shat(p.z, t))
    return cf.eigenfunction(p.z, t, coeffs)


def boundary_values(p: SpectralPoint, coeffs: tuple, mode: ModeSpec) -> np.ndarray:
    """y(1), y'(1), y''(1), y'''(1)."""
    if p.is_diagonal:
        A, B = coeffs
        _, _, P = diagonal_forms(p.z, mode, p.family, p.lam)
        return np.array([np.real((A - 1j * B) * Pm) for Pm in P])
    R = cf.rows(p.z, mode)
    return R.v[:, 0] * coeffs[0] + R.v[:, 1] * coeffs[1]


def pair_coefficients(p: SpectralPoint, mode: ModeSpec):
    if p.is_diagonal:
        return p.coeffs, "diagonal"
    conv = cf.NORMALIZATION[p.family]
    (a, b), _ = cf.coefficients(p.z, mode, conv)
    return (float(a), float(b)), conv


# --- norms -------------------------------------------------------------------------

def _integral_real(z, a, b):
    if z < SMALL_ARG:
        y = cf.eigenfunction(z, _GL_T, (a, b))
        return float(_GL_W @ (y * y))
    E = math.exp(-2 * z)
    s, c = -0.5 * math.expm1(-2 * z), 0.5 * (1 + E)
    i_hh = (0.5 * (1 - E * E) - 2 * z * E) / (4 * z)
    i_ht = (c * math.sin(z) - s * math.cos(z)) / (2 * z)
    i_tt = 0.5 - math.sin(2 * z) / (4 * z)
    return a * a * i_hh + 2 * a * b * i_ht + b * b * i_tt


def _integral_diagonal(a, A, B):
    C = A - 1j * B
    if a < SMALL_ARG:
        y = np.real(C * _shat(a, _GL_T))
        return float(_GL_W @ (y * y))
    w = a * (1 + 1j)
    E = math.exp(-2 * a)
    abs2 = (0.5 * (1 - E * E) - E * math.sin(2 * a)) / (4 * a)
    sq = (np.exp(2j * a) - np.exp(-4 * a - 2j * a)) / (8 * w) - 0.5 * E
    return float(0.5 * (abs(C) ** 2 * abs2 + np.real(C * C * sq)))


def _norm_from(p: SpectralPoint, coeffs, mode: ModeSpec) -> float:
    if p.is_diagonal:
        integral = _integral_diagonal(p.z, *coeffs)
    else:
        integral = _integral_real(p.z, *coeffs)
    use0, use1 = p.family.boundary_components
    v = boundary_values(p, coeffs, mode)
    return integral + mode.weight * ((v[0] ** 2 if use0 else 0.0) + (v[1] ** 2 if use1 else 0.0))


def norm_closed(mode: ModeSpec, p: SpectralPoint, coeffs: tuple | None = None) -> float:
    """||Y||^2 from elementary antiderivatives, under the family's normalization."""
    if coeffs is None:
        coeffs, _ = pair_coefficients(p, mode)
    return _norm_from(p, coeffs, mode)


def _diagonal_norm_derivative(mode: ModeSpec, p: SpectralPoint) -> float:
    # Coefficients frozen at the root; derivative taken in lambda = gamma - 4a^4.
    a = p.z
    A, B = p.coeffs
    C = A - 1j * B
    w = a * (1 + 1j)
    sh, ch = (np.exp(w - a) - np.exp(-w - a)) / 2, (np.exp(w - a) + np.exp(-w - a)) / 2
    S = [sh, ch, sh, ch, sh]
    P = [w ** m * S[m] for m in range(4)]
    dP = [-P[m] + (1 + 1j) * ((m * w ** (m - 1) * S[m] if m else 0) + w ** m * S[m + 1]) for m in range(4)]
    dlam = -16 * a ** 3
    v = np.array([np.real(C * x) for x in P])
    dv = np.array([np.real(C * x) for x in dP]) / dlam
    lam, g = p.lam, mode.weight
    dw1 = dv[3] + g * v[0] + lam * g * dv[0]
    dw2 = dv[2] - g * v[1] - lam * g * dv[1]
    if p.family is Family.MAIN:
        return float(v[0] * dw1 - v[1] * dw2)
    return float(-v[1] * dw2 - v[3] * dv[0])


def norm_derivative(mode: ModeSpec, p: SpectralPoint) -> float:
    """||Y||^2 = G'(z*) / (4 z*^3), G the family's Green bracket.

    Main: G = y(1) w1 - y'(1) w2 with c2 = 1, c1 = H(z), which reduces to f_k'.
    L01:  G = -y(1) y''' - y'(1) w2 with the same normalization, reducing to -y''' dy(1)/dz.
    L02, L03: y(1) = 0 imposed on the coefficients; G reduces to (dy'(1)/dz) y''(1)
    and -y'(1) (dy''(1)/dz) respectively.
    """
    if p.is_diagonal:
        return NORM_SIGN[p.family] * _diagonal_norm_derivative(mode, p)
    st = cf.boundary_state(p.z, mode, cf.NORMALIZATION[p.family])
    _, dG = cf.green_form(st, p.family)
    if not np.isfinite(dG) or dG == 0:
        raise NumericalError(f"zero derivative at z = {p.z}: multiple root or wrong normalization")
    return NORM_SIGN[p.family] * float(dG) / (4 * p.z ** 3)


def normalize(mode: ModeSpec, p: SpectralPoint) -> NormedEigenpair:
    coeffs, conv = pair_coefficients(p, mode)
    nc = _norm_from(p, coeffs, mode)
    nd = norm_derivative(mode, p)
    return NormedEigenpair(p, 1.0 / nc, nc, nd, coeffs, conv)


def normalize_all(mode: ModeSpec, points) -> list[NormedEigenpair]:
    return [normalize(mode, p) for p in points]


# --- eigenvectors ---------------------------------------------------------------------

def eigenvector(mode: ModeSpec, pair: NormedEigenpair, t):
    """Components (c y(t), c w y(1), c w y'(1)) of the normalized eigenvector.

    A component is None when the family has no such boundary part.  With
    boundary components stored this way the direct-sum inner product is
    int f g + (b1 b1' + b2 b2') / w.
    """
    c = math.sqrt(pair.c_squared)
    p = pair.point
    y = c * function_values(p, pair.coeffs, t)
    v = boundary_values(p, pair.coeffs, mode)
    use0, use1 = p.family.boundary_components
    w = mode.weight
    return y, (c * w * v[0] if use0 else None), (c * w * v[1] if use1 else None)


def direct_sum_inner(mode: ModeSpec, Y1, Y2, t, weights) -> float:
    """Inner product of two eigenvector tuples sampled on quadrature nodes ``t``."""
    total = float(weights @ (Y1[0] * Y2[0]))
    for b1, b2 in zip(Y1[1:], Y2[1:]):
        if b1 is not None and b2 is not None:
            total += b1 * b2 / mode.weight
    return total
