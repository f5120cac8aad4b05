"""Overflow-safe characteristic functions of the mode problem.

For lambda > gamma put z = (lambda - gamma)**(1/4).  Solutions satisfying
y(0) = y''(0) = 0 are

    y(t) = c1 sh(zt) + c2 sin(zt).

Everything here works with the scaled hyperbolic part
``shs(z, t) = exp(-z) sh(zt)``, i.e. with the coefficient pair
``(a, b) = (c1 exp(z), c2)``.  Boundary values at t = 1 then contain only
the bounded quantities

    s = exp(-z) sh z = (1 - E)/2,   c = exp(-z) ch z = (1 + E)/2,   E = exp(-2z),

so no expression overflows, however large z is.  A boundary form applied
to y is a row ``r`` with ``r @ (a, b)`` its value.  Rows for y^(m)(1):

    m = 0: (s,      sin z)        m = 2: (z^2 s,  -z^2 sin z)
    m = 1: (z c,    z cos z)      m = 3: (z^3 c,  -z^3 cos z)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .model import Family, ModeSpec

LN2 = math.log(2.0)


@dataclass(frozen=True)
class CharValue:
    """Scaled value ``mantissa * exp(exponent)``.

    ``norm`` is a positive size of the terms that were combined.  It gives the
    relative residual ``|mantissa| / norm``, which root tolerances use.
    """

    mantissa: float | np.ndarray
    exponent: float | np.ndarray = 0.0
    norm: float | np.ndarray = 1.0

    @property
    def sign(self):
        return np.sign(self.mantissa)

    @property
    def value(self):
        with np.errstate(over="ignore"):
            return self.mantissa * np.exp(self.exponent)

    @property
    def log_abs(self):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mantissa)) + self.exponent

    @property
    def residual(self):
        return np.abs(self.mantissa) / self.norm


def _scaled(kind, z, t):
    # sh or ch of zt as mantissa * exp(zt - ln 2)
    x = np.asarray(z, dtype=float) * np.asarray(t, dtype=float)
    mant = -np.expm1(-2.0 * x) if kind == "sh" else 1.0 + np.exp(-2.0 * x)
    return CharValue(mant, x - LN2)


@dataclass(frozen=True)
class BasisValues:
    """sh, ch, sin, cos at (z, t), the hyperbolic pair in mantissa-exponent form."""

    z: float | np.ndarray
    t: float | np.ndarray
    sh: CharValue
    ch: CharValue
    sin: CharValue
    cos: CharValue

    def derivative(self, m: int) -> tuple[CharValue, CharValue]:
        """(d/dt)^m of (sh(zt), sin(zt)), with z**m folded into the exponent."""
        z = np.asarray(self.z, dtype=float)
        hyp = self.sh if m % 2 == 0 else self.ch
        trig = [self.sin, self.cos, self.sin, self.cos][m % 4]
        sgn = [1.0, 1.0, -1.0, -1.0][m % 4]
        if m == 0:
            return hyp, trig
        with np.errstate(divide="ignore"):
            lz = np.where(z > 0, m * np.log(np.where(z > 0, z, 1.0)), 0.0)
        zero = z == 0
        hm = np.where(zero, 0.0, hyp.mantissa)
        tm = np.where(zero, 0.0, sgn * trig.mantissa)
        return CharValue(hm, hyp.exponent + lz), CharValue(tm, trig.exponent + lz)


def basis(z, t) -> BasisValues:
    """Solution basis and its t-derivatives through order 3."""
    x = np.asarray(z, dtype=float) * np.asarray(t, dtype=float)
    return BasisValues(z, t, _scaled("sh", z, t), _scaled("ch", z, t),
                       CharValue(np.sin(x)), CharValue(np.cos(x)))


# --- boundary rows in the (a, b) representation -----------------------------

@dataclass(frozen=True)
class Rows:
    """Rows of y, y', y'', y''' at t = 1 and their z-derivatives (arrays of shape (4, 2, ...))."""

    z: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    p: np.ndarray
    dp: np.ndarray
    s: np.ndarray
    c: np.ndarray
    E: np.ndarray


def rows(z, mode: ModeSpec) -> Rows:
    z = np.asarray(z, dtype=float)
    E = np.exp(-2.0 * z)
    s = -0.5 * np.expm1(-2.0 * z)
    c = 0.5 * (1.0 + E)
    S, C = np.sin(z), np.cos(z)
    w = mode.weight
    p = (z ** 4 + mode.gamma) * w
    dp = 4.0 * z ** 3 * w
    z2, z3 = z * z, z ** 3
    v = np.array([
        [s, S],
        [z * c, z * C],
        [z2 * s, -z2 * S],
        [z3 * c, -z3 * C],
    ])
    dv = np.array([
        [E, C],
        [c - z * E, C - z * S],
        [2 * z * s + z2 * E, -2 * z * S - z2 * C],
        [3 * z2 * c - z3 * E, -3 * z2 * C + z3 * S],
    ])
    return Rows(z, v, dv, p, dp, s, c, E)


def family_rows(R: Rows, fam: Family):
    """The two right-end boundary rows of ``fam`` and their z-derivatives.

    Main uses the determinant's own row scaling: -(y''' + p y) and (y'' - p y')/z.
    """
    v, dv, p, dp, z = R.v, R.dv, R.p, R.dp, R.z
    if fam is Family.MAIN:
        r1 = -(v[3] + p * v[0])
        d1 = -(dv[3] + dp * v[0] + p * dv[0])
        # (y'' - p y')/z written without division
        s, c, E = R.s, R.c, R.E
        S, C = np.sin(z), np.cos(z)
        r2 = np.array([z * s - p * c, -z * S - p * C])
        d2 = np.array([s + z * E - dp * c + p * E, -S - z * C - dp * C + p * S])
        return r1, r2, d1, d2
    if fam is Family.L01:
        return v[0], v[2] - p * v[1], dv[0], dv[2] - dp * v[1] - p * dv[1]
    if fam is Family.L02:
        return v[0], v[1], dv[0], dv[1]
    return v[0], v[2], dv[0], dv[2]


def _cross(r1, r2):
    return r1[0] * r2[1] - r1[1] * r2[0]


def scaled_det(z, mode: ModeSpec, fam: Family):
    """Determinant of the scaled rows and its z-derivative (true value = det * exp(z))."""
    r1, r2, d1, d2 = family_rows(rows(z, mode), fam)
    return _cross(r1, r2), _cross(d1, r2) + _cross(r1, d2), np.hypot(*r1) * np.hypot(*r2)


def normalized_det(z, mode: ModeSpec, fam: Family):
    """Determinant divided by the product of its row lengths; bounded by 1 in size."""
    d, _, n = scaled_det(z, mode, fam)
    return d / n


def char_det(z, mode: ModeSpec, fam: Family = Family.MAIN) -> CharValue:
    """Characteristic determinant of ``fam`` in scaled form.

    For Main the rows are those of the classical determinant
    [[-z^3 ch z - p sh z, z^3 cos z - p sin z], [z sh z - p ch z, -z sin z - p cos z]],
    p = (z^4 + gamma) gamma^alpha.  For the other families the rows are the
    plain boundary forms (y(1), y''(1) - p y'(1)), (y(1), y'(1)), (y(1), y''(1)).
    """
    d, _, n = scaled_det(z, mode, Family.parse(fam))
    return CharValue(d, np.asarray(z, dtype=float), n)


def _scaled_hyperbolic(w: complex):
    """exp(-|Re w|) times (sh w, ch w), finite for any w."""
    x, y = w.real, w.imag
    e = math.exp(-2 * abs(x))
    sx = math.copysign(-0.5 * math.expm1(-2 * abs(x)), x)
    cx = 0.5 * (1 + e)
    # sh(x+iy) = sh x cos y + i ch x sin y;  ch(x+iy) = ch x cos y + i sh x sin y
    return complex(sx * math.cos(y), cx * math.sin(y)), complex(cx * math.cos(y), sx * math.sin(y))


def char_det_complex(w: complex, mode: ModeSpec) -> complex:
    """Normalized Main determinant at complex argument ``w``.

    Columns are scaled by exp(-|Re w|) (hyperbolic) and exp(-|Im w|)
    (trigonometric) and the result is divided by the row lengths.
    """
    w = complex(w)
    p = (w ** 4 + mode.gamma) * mode.weight
    sh, ch = _scaled_hyperbolic(w)
    # sin(w) = -i sh(iw), cos(w) = ch(iw)
    shi, chi = _scaled_hyperbolic(1j * w)
    sn, cs = -1j * shi, chi
    r1 = (-w ** 3 * ch - p * sh, w ** 3 * cs - p * sn)
    r2 = (w * sh - p * ch, -w * sn - p * cs)
    n1 = math.hypot(abs(r1[0]), abs(r1[1]))
    n2 = math.hypot(abs(r2[0]), abs(r2[1]))
    return (r1[0] * r2[1] - r1[1] * r2[0]) / (n1 * n2)


# --- omega forms and H --------------------------------------------------------

def _combine(c1, A, c2, B, z):
    # c1 * exp(z) * A + c2 * B with A, B bounded
    if c1 == 0:
        return CharValue(c2 * B, 0.0, abs(c2 * B) or 1.0)
    with np.errstate(under="ignore"):
        m = c1 * A + c2 * B * math.exp(-z)
        n = abs(c1 * A) + abs(c2 * B) * math.exp(-z)
    return CharValue(m, float(z), n or 1.0)


def omega1(z: float, mode: ModeSpec, c1: float, c2: float) -> CharValue:
    """y'''(1) + (z^4 + gamma) gamma^alpha y(1) for y = c1 sh(zt) + c2 sin(zt)."""
    R = rows(float(z), mode)
    r = R.v[3] + R.p * R.v[0]
    return _combine(c1, float(r[0]), c2, float(r[1]), float(z))


def omega2(z: float, mode: ModeSpec, c1: float, c2: float) -> CharValue:
    """y''(1) - (z^4 + gamma) gamma^alpha y'(1) for y = c1 sh(zt) + c2 sin(zt)."""
    R = rows(float(z), mode)
    r = R.v[2] - R.p * R.v[1]
    return _combine(c1, float(r[0]), c2, float(r[1]), float(z))


def H_scaled(z, mode: ModeSpec, tol: float = 1e-300):
    """exp(z) H(z) and its z-derivative.

    H(z) = [z sin z + p cos z] / [z sh z - p ch z] is the ratio c1/c2 that
    makes omega2 vanish identically in z.
    """
    z = np.asarray(z, dtype=float)
    E = np.exp(-2.0 * z)
    s = -0.5 * np.expm1(-2.0 * z)
    c = 0.5 * (1.0 + E)
    S, C = np.sin(z), np.cos(z)
    p = (z ** 4 + mode.gamma) * mode.weight
    dp = 4.0 * z ** 3 * mode.weight
    N = z * S + p * C
    D = z * s - p * c
    if np.any(np.abs(D) <= tol * (np.abs(z * s) + np.abs(p * c))):
        raise PoleError(f"H has a pole near z = {z}")
    dN = S + z * C + dp * C - p * S
    dD = s + z * E - dp * c + p * E
    return N / D, (dN * D - N * dD) / (D * D)


def H(z, mode: ModeSpec):
    """H(z) itself; tends to zero like exp(-z)."""
    h, _ = H_scaled(z, mode)
    with np.errstate(under="ignore"):
        return h * np.exp(-np.asarray(z, dtype=float))


def dispersion_rhs(z, mode: ModeSpec, tol: float = 1e-13):
    """Right side of the simplified dispersion relation tan z = rhs(z)."""
    z = np.asarray(z, dtype=float)
    th = np.tanh(z)
    p = (z ** 4 + mode.gamma) * mode.weight
    num = -2 * z ** 3 * p + z ** 4 * th - p * p * th
    den = z ** 4 + 2 * z * p * th - p * p
    if np.any(np.abs(den) <= tol * (z ** 4 + 2 * z * p + p * p)):
        raise PoleError(f"dispersion relation has a pole near z = {z}")
    return num / den


def K(y, mode: ModeSpec) -> CharValue:
    """Function whose zeros give roots z = y(1 +- i) of the Main determinant.

    Stored as mantissa * exp(2y).  With m = gamma - 4y^4 and w = gamma^alpha:
    K = -2y^4 sin2y - 2y^3 m w (cos2y + ch2y) + m w y (cos2y - ch2y)
        + 2y^4 sh2y + (m w)^2 (sh2y - sin2y)/2.
    """
    y = np.asarray(y, dtype=float)
    w = mode.weight
    m = mode.gamma - 4 * y ** 4
    E = np.exp(-2 * y)
    sn, cs = np.sin(2 * y) * E, np.cos(2 * y) * E
    E4 = np.exp(-4 * y)
    ch, sh = 0.5 * (1 + E4), -0.5 * np.expm1(-4 * y)
    mw = m * w
    mant = (-2 * y ** 4 * sn - 2 * y ** 3 * mw * (cs + ch) + mw * y * (cs - ch)
            + 2 * y ** 4 * sh + 0.5 * mw * mw * (sh - sn))
    norm = 4 * y ** 4 + 4 * y ** 3 * np.abs(mw) + 2 * y * np.abs(mw) + mw * mw + 1e-300
    return CharValue(mant, 2 * y, norm)


# --- coefficient normalizations ----------------------------------------------

NORMALIZATION = {
    Family.MAIN: "H",
    Family.L01: "H",
    Family.L02: "y1zero",
    Family.L03: "y1zero",
}


def coefficients(z, mode: ModeSpec, convention: str):
    """Coefficient pair (a, b) and its z-derivative under a named convention.

    "H":      (exp(z) H(z), 1)         -- omega2 vanishes identically
    "y1zero": (-sin z, exp(-z) sh z)  -- y(1) vanishes identically
    Both are genuine functions of z, so derivatives of boundary values
    include the change of the coefficients.
    """
    z = np.asarray(z, dtype=float)
    if convention == "H":
        h, dh = H_scaled(z, mode)
        return (h, np.ones_like(h)), (dh, np.zeros_like(h))
    if convention == "y1zero":
        return (-np.sin(z), -0.5 * np.expm1(-2 * z)), (-np.cos(z), np.exp(-2 * z))
    raise ValueError(f"unknown normalization {convention!r}")


@dataclass(frozen=True)
class BoundaryState:
    """y^(m)(1), m = 0..3, their total z-derivatives, p and p' at one z."""

    z: float
    ab: tuple
    v: np.ndarray
    dv: np.ndarray
    p: float
    dp: float

    @property
    def omega1(self):
        return self.v[3] + self.p * self.v[0]

    @property
    def omega2(self):
        return self.v[2] - self.p * self.v[1]

    @property
    def domega1(self):
        return self.dv[3] + self.dp * self.v[0] + self.p * self.dv[0]

    @property
    def domega2(self):
        return self.dv[2] - self.dp * self.v[1] - self.p * self.dv[1]


def boundary_state(z, mode: ModeSpec, convention: str) -> BoundaryState:
    R = rows(z, mode)
    (a, b), (da, db) = coefficients(z, mode, convention)
    v = R.v[:, 0] * a + R.v[:, 1] * b
    dv = R.dv[:, 0] * a + R.dv[:, 1] * b + R.v[:, 0] * da + R.v[:, 1] * db
    return BoundaryState(z, (a, b), v, dv, R.p, R.dp)


def green_form(st: BoundaryState, fam: Family):
    """Family bracket G(z) whose z-derivative at a root equals 4 z^3 times the squared norm.

    Main: y(1) w1 - y'(1) w2      L01: -y(1) y''' - y'(1) w2
    L02:  -y(1) y''' + y'(1) y''  L03: -y(1) y''' - y'(1) y''
    """
    v, dv = st.v, st.dv
    if fam is Family.MAIN:
        return (v[0] * st.omega1 - v[1] * st.omega2,
                dv[0] * st.omega1 + v[0] * st.domega1 - dv[1] * st.omega2 - v[1] * st.domega2)
    if fam is Family.L01:
        return (-v[0] * v[3] - v[1] * st.omega2,
                -dv[0] * v[3] - v[0] * dv[3] - dv[1] * st.omega2 - v[1] * st.domega2)
    sgn = 1.0 if fam is Family.L02 else -1.0
    return (-v[0] * v[3] + sgn * v[1] * v[2],
            -dv[0] * v[3] - v[0] * dv[3] + sgn * (dv[1] * v[2] + v[1] * dv[2]))


def f_k(z, mode: ModeSpec):
    """f_k(z) = y(1) omega1(z) with c2 = 1, c1 = H(z), and its analytic derivative.

    Under this normalization every factor is bounded, so plain floats are returned.
    """
    st = boundary_state(z, mode, "H")
    f = st.v[0] * st.omega1
    df = st.dv[0] * st.omega1 + st.v[0] * st.domega1
    return f, df


def shs(z, t):
    """exp(-z) sh(zt), bounded on 0 <= t <= 1."""
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    return 0.5 * (np.exp(z * (t - 1.0)) - np.exp(-z * (t + 1.0)))


def eigenfunction(z, t, ab):
    """y(t) = a shs(z, t) + b sin(zt)."""
    a, b = ab
    return a * shs(z, t) + b * np.sin(np.asarray(z) * np.asarray(t))


# Residue functions.  Each is homogeneous of degree zero in (a, b), so the
# scaled coefficients give their true values.  The denominators below carry
# factor 1: the oracle (z - z*) F -> +-c^2 y^2 confirms no factor 2 belongs there.
RESIDUE_FACTOR = {"F_k": 1.0, "F1k": 1.0, "F2k": 1.0}

# Sign of the residue of each function at each of its two pole families.
RESIDUE_SIGN = {
    ("F_k", Family.MAIN): +1, ("F_k", Family.L01): -1,
    ("F1k", Family.L01): +1, ("F1k", Family.L02): -1,
    ("F2k", Family.L02): +1, ("F2k", Family.L03): -1,
}

RESIDUE_CONVENTION = {"F_k": "H", "F1k": "y1zero", "F2k": "y1zero"}


def residue_denominator(z, mode: ModeSpec, which: str):
    """Denominator D(z) of F = 4 z^3 y^2 / D and the pair (a, b) it uses."""
    st = boundary_state(z, mode, RESIDUE_CONVENTION[which])
    f = RESIDUE_FACTOR[which]
    v = st.v
    if which == "F_k":
        d = v[0] * st.omega1
    elif which == "F1k":
        d = -f * v[1] * st.omega2
    elif which == "F2k":
        d = f * v[1] * v[2]
    else:
        raise ValueError(f"unknown residue function {which!r}")
    return d, st.ab


def residue_integrand(z, t, mode: ModeSpec, which: str, pole_tol: float = 1e-13):
    """F_k, F1k or F2k at (z, t).

    F_k = 4z^3 y^2 / (y(1) omega1)   with c2 = 1, c1 = H(z);
    F1k = 4z^3 y^2 / (-y'(1) omega2) with y(1) = 0 imposed on (c1, c2);
    F2k = 4z^3 y^2 / (y'(1) y''(1))  with y(1) = 0 imposed on (c1, c2).
    """
    d, ab = residue_denominator(z, mode, which)
    R = rows(z, mode)
    n = [np.hypot(*R.v[m]) for m in range(4)]
    nw1 = np.hypot(*(R.v[3] + R.p * R.v[0]))
    nw2 = np.hypot(*(R.v[2] - R.p * R.v[1]))
    pair = {"F_k": n[0] * nw1, "F1k": n[1] * nw2, "F2k": n[1] * n[2]}[which]
    if abs(d) <= pole_tol * pair * (ab[0] ** 2 + ab[1] ** 2):
        raise PoleError(f"{which} evaluated at a pole, z = {z}")
    y = eigenfunction(z, t, ab)
    return 4 * z ** 3 * y * y / d
