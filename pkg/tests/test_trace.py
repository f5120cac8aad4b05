import math
from fractions import Fraction

import numpy as np
import pytest

from quarttrace.errors import PairingError
from quarttrace.model import FAMILIES, Family, GammaLaw, ModeSpec, PotentialSpec, Profile, SolverConfig
from quarttrace.trace import (chain_compare, closed_form, endpoint_reference, exact_partial_zeta,
                              first_order_series, first_order_terms, mode_trace, pairing_guard,
                              residue_series_check, second_order_remainder)

zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))


@pytest.fixture(scope="module")
def cfg60():
    return SolverConfig(J_max=60, galerkin_dim=200, ladder=(10, 20, 40))


# --- mode_trace -------------------------------------------------------------------------

def test_zero_potential_gives_zero_sums(mode1, small_cfg):
    for fam in FAMILIES:
        r = mode_trace(mode1, fam, zero, (10, 20), small_cfg)
        assert r.S == (0.0, 0.0) and r.first_order == (0.0, 0.0)


def test_l03_partial_sum_near_half(mode1, cfg, cos2pi):
    r = mode_trace(mode1, Family.L03, cos2pi, (10, 20, 40), cfg)
    assert abs(r.S[-1] + 0.5) <= 5e-3
    assert r.uncertainty < 1e-5


def test_scaling_is_linear_to_first_order(mode1, cfg, cos2pi):
    base = mode_trace(mode1, Family.MAIN, cos2pi, (10, 20, 40), cfg).extrapolated
    for s in (0.1, -0.5, 2.0):
        r = mode_trace(mode1, Family.MAIN, lambda t: s * cos2pi(t), (10, 20, 40), cfg)
        assert abs(r.extrapolated - s * base) <= 0.05 * s * s


def test_sums_are_exact_sums_of_rows(mode1, small_cfg, cos2pi):
    r = mode_trace(mode1, Family.L01, cos2pi, (10, 20), small_cfg)
    diffs = [m - l for l, m in zip(r.lam, r.mu)]
    assert r.S[-1] == sum(np.array(diffs))
    assert r.S[0] == sum(np.array(diffs[:10]))


def test_pairing_guard():
    lam = np.array([1.0, 2.0, 3.0])
    pairing_guard(lam, lam + 0.4, 3)
    with pytest.raises(PairingError, match="pairing"):
        pairing_guard(lam, np.array([1.0, 2.6, 3.0]), 3)


# --- first-order series ------------------------------------------------------------------

def test_l03_first_order_is_minus_half_from_first_term(mode1, small_cfg, cos2pi):
    F = first_order_series(mode1, Family.L03, cos2pi, 20, small_cfg)
    np.testing.assert_allclose(F, -0.5, atol=1e-12)
    np.testing.assert_array_equal(first_order_series(mode1, Family.L03, zero, 5, small_cfg), 0.0)


def test_l03_quartic_endpoint_sum_fejer():
    # terms are -int g cos(2 pi j t); Fejer means of the partial sums reach -(g(0)+g(1))/4
    g = Profile("quartic_centered")
    cfg = SolverConfig(J_max=200, galerkin_dim=400, ladder=(10, 20, 40))
    F = first_order_series(ModeSpec(1, 2.0, 0.25), Family.L03, g, 200, cfg)
    fejer = np.cumsum(F) / np.arange(1, F.size + 1)
    target = -(g(np.array([0.0]))[0] + g(np.array([1.0]))[0]) / 4
    assert target == pytest.approx(-0.025)
    # the terms decay like 1/j^2, so the tail is C/J: one Richardson step removes it
    assert abs(F[-1] - target) < 2e-4
    assert abs(2 * F[199] - F[99] - target) < 2e-6
    assert abs(fejer[-1] - target) < 1e-3
    assert abs(fejer[-1] - target) < abs(fejer[49] - target)


def test_second_order_cancellation(mode1, cfg, cos2pi):
    for fam in FAMILIES:
        r = second_order_remainder(mode1, fam, cos2pi, cfg, J=cfg.galerkin_dim // 2)
        assert abs(r) <= 1e-4


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_absolute_series_cauchy_ladder(mode1, cfg60, cos2pi, fam):
    # partial sums of |c^2 int q y^2|: increments shrink, and fall below 1e-6 by J = 60
    a = np.abs(first_order_terms(mode1, fam, cos2pi, 60, cfg60))
    inc = [a[J0:J1].sum() for J0, J1 in ((10, 20), (20, 40), (40, 60))]
    assert inc[1] < inc[0] or inc[1] < 1e-12
    assert a[59] < 1e-6, f"{fam}: term at J = 60 is {a[59]:.3e}"


# --- closed form ----------------------------------------------------------------------------

def test_closed_form_single_cosine():
    q = PotentialSpec(Profile("cos_m", (1,)), coefficients=(1.0,))
    cf_ = closed_form(q, 1)
    assert cf_.partial == -0.5 and cf_.limit == -0.5


def test_closed_form_inverse_square_limit():
    q = PotentialSpec(Profile("cos_m", (1,)), c0=1.0, power=2.0)
    assert closed_form(q, 20).limit == pytest.approx(-math.pi ** 2 / 12, abs=1e-12)
    assert closed_form(q, 20).limit == pytest.approx(-0.8224670, abs=1e-7)


def test_closed_form_partial_k20_exact():
    s = exact_partial_zeta(20)
    assert exact_partial_zeta(3) == Fraction(49, 36)
    q = PotentialSpec(Profile("cos_m", (1,)), c0=1.0, power=2.0)
    assert closed_form(q, 20).partial == pytest.approx(-float(2 * s) / 4, rel=1e-15)
    assert closed_form(q, 20).partial == pytest.approx(-0.79808, abs=1e-5)


def test_closed_form_vanishing_endpoints():
    # P_1(2t - 1) = 2t - 1 has g(0) + g(1) = 0
    q = PotentialSpec(Profile("legendre_centered", (1,)), c0=3.0, power=1.0)
    assert closed_form(q, 7).partial == 0.0 and closed_form(q, 7).limit == 0.0


def test_endpoint_reference_values(cos2pi):
    assert endpoint_reference(Family.L03, cos2pi) == -0.5
    assert endpoint_reference(Family.MAIN, cos2pi) == -0.75


# --- residue series ------------------------------------------------------------------------

def test_residue_zero_potential(mode1, small_cfg):
    r = residue_series_check(mode1, zero, (10, 20), small_cfg)
    assert r.z_side == (0.0, 0.0) and r.beta_side == (0.0, 0.0)


def test_residue_gap_mode1(mode1, cfg, cos2pi):
    r = residue_series_check(mode1, cos2pi, (10, 20, 40), cfg, "F_k")
    assert r.gap_decreasing
    assert r.gaps[-1] <= 2e-2


def test_residue_sign_flip(mode1, small_cfg, cos2pi):
    a = residue_series_check(mode1, cos2pi, (10, 20), small_cfg)
    b = residue_series_check(mode1, lambda t: -cos2pi(t), (10, 20), small_cfg)
    np.testing.assert_allclose(b.z_side, -np.array(a.z_side), rtol=1e-12)
    np.testing.assert_allclose(b.beta_side, -np.array(a.beta_side), rtol=1e-12)


# --- chain ------------------------------------------------------------------------------------

def test_chain_zero_potential(small_cfg):
    rep = chain_compare([ModeSpec(1, 2.0, 0.25)], None, small_cfg, ladder=(10, 20))
    assert all(v == 0.0 for v in rep.totals().values())
    assert rep.target == 0.0 and rep.passed


def test_chain_error_poisons_one_family(monkeypatch, small_cfg):
    import quarttrace.trace as tr
    real = tr.mode_trace

    def flaky(mode, fam, *a, **kw):
        if fam is Family.L02:
            raise PairingError("forced")
        return real(mode, fam, *a, **kw)

    monkeypatch.setattr(tr, "mode_trace", flaky)
    q = PotentialSpec(Profile("cos_m", (1,)), coefficients=(1.0,))
    rep = chain_compare([ModeSpec(1, 2.0, 0.25)], q, small_cfg, ladder=(10, 20))
    assert set(rep.errors) == {Family.L02}
    assert set(rep.totals()) == {Family.MAIN, Family.L01, Family.L03}
    assert not rep.passed


GRID = [(GammaLaw(1.0, 1.0, 4.0), 0.25), (GammaLaw(1.0, 1.0, 4.0), 0.1),
        (GammaLaw(16.0, 1.0, 2.0), 0.25), (GammaLaw(16.0, 1.0, 2.0), 0.4),
        (GammaLaw(0.5, 4.0, 1.0), 0.1), (GammaLaw(0.5, 4.0, 1.0), 0.4)]


@pytest.fixture(scope="module")
def grid_totals(cfg60):
    cos = lambda t: np.cos(2 * np.pi * np.asarray(t, dtype=float))
    return {(i, fam): mode_trace(ModeSpec(1, float(law(1)), a), fam, cos, (10, 20, 40), cfg60).extrapolated
            for i, (law, a) in enumerate(GRID) for fam in FAMILIES}


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_total_independent_of_gamma_alpha(grid_totals, fam):
    v = [grid_totals[(i, fam)] for i in range(len(GRID))]
    assert max(v) - min(v) <= 2e-2


def test_total_independent_of_family(grid_totals):
    v = list(grid_totals.values())
    assert max(v) - min(v) <= 2e-2, f"spread over (gamma law, alpha, family) is {max(v) - min(v):.4f}"
