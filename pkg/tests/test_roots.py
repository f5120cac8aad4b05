import math

import numpy as np
import pytest

from quarttrace import charfun as cf
from quarttrace.errors import RootError
from quarttrace.model import Family, ModeSpec, SolverConfig
from quarttrace.roots import (branch_roots, calibrate_phase, complex_diag_exclusion, find_spectrum,
                              imaginary_twin_check, refine, seeds, small_root_scan)


def test_main_first_seed():
    assert seeds(Family.MAIN, 1)[0] == pytest.approx(3.92699081698724, abs=1e-14)


def test_seed_rules():
    np.testing.assert_allclose(seeds(Family.L03, 4), math.pi * np.arange(1, 5))
    with pytest.raises(ValueError):
        seeds(Family.L01, 3)
    with pytest.raises(ValueError):
        seeds(Family.MAIN, 0)


def test_refine_zero_tolerance_hits_iteration_cap():
    f = lambda x: (math.cos(x), -math.sin(x))
    with pytest.raises(RootError, match="max iterations"):
        refine(f, 1.0, 2.0, tol=0.0, max_iter=30)


def test_refine_no_sign_change_suggests_scan():
    f = lambda x: (1.0 + x * x, 2 * x)
    with pytest.raises(RootError, match="dense scan"):
        refine(f, -1.0, 1.0, tol=1e-12)


def test_refine_simple_root():
    z, its = refine(lambda x: (math.cos(x), -math.sin(x)), 1.0, 2.0, tol=1e-14)
    assert z == pytest.approx(math.pi / 2, abs=1e-15)
    assert its < 10


def test_small_root_scan_stable_under_halved_grid(mode1, cfg):
    for fam in (Family.MAIN, Family.L01):
        a = small_root_scan(mode1, fam, cfg)
        b = small_root_scan(mode1, fam, cfg.replace(grid_step=cfg.grid_step / 2))
        assert len(a) == len(b) >= 1
        np.testing.assert_allclose([p.z for p in a], [p.z for p in b], atol=1e-12)


@pytest.mark.parametrize("gamma,alpha", [(2.0, 0.25), (17.0, 0.1), (257.0, 0.45)])
def test_l03_spectrum_closed_form(gamma, alpha):
    m = ModeSpec(1, gamma, alpha)
    pts = find_spectrum(m, Family.L03, SolverConfig(), n_branch=30)
    z = np.array([p.z for p in pts])
    np.testing.assert_allclose(z, math.pi * np.arange(1, 31), atol=1e-12)
    np.testing.assert_allclose([p.lam for p in pts], z ** 4 + gamma, rtol=1e-15)


@pytest.mark.parametrize("fam", list(Family))
def test_spectrum_properties(mode1, cfg, fam):
    pts = find_spectrum(mode1, fam, cfg)
    lam = np.array([p.lam for p in pts])
    assert np.all(np.diff(lam) > 0)
    assert [p.j for p in pts] == list(range(1, len(pts) + 1))
    br = branch_roots(pts)
    assert len(br) == cfg.J_max
    gaps = np.diff([p.z for p in br])
    assert np.all(np.abs(gaps - math.pi) < 0.5)
    assert max(p.residual for p in pts) <= 1e-12


@pytest.mark.parametrize("fam", list(Family))
def test_doubling_depth_keeps_prefix(mode1, cfg, fam):
    a = find_spectrum(mode1, fam, cfg, n_branch=20)
    b = find_spectrum(mode1, fam, cfg, n_branch=40)
    np.testing.assert_allclose([p.lam for p in a], [p.lam for p in b[:len(a)]], rtol=1e-13)


def test_main_roots_approach_asymptote(mode1, cfg):
    br = branch_roots(find_spectrum(mode1, Family.MAIN, cfg))
    err = np.array([abs(p.z - math.pi * p.branch - math.pi / 4) for p in br])
    assert np.all(np.diff(err[3:]) < 0)
    assert err[-1] < 1e-2


def test_phase_calibration_l01_l02(mode1, cfg):
    for fam in (Family.L01, Family.L02):
        ph = calibrate_phase(mode1, fam, cfg)
        assert 0 <= ph < math.pi
        roots = branch_roots(find_spectrum(mode1, fam, cfg, n_branch=10))
        assert all(abs(p.z - p.seed) < 0.45 for p in roots)


def test_imaginary_twin(mode1, cfg):
    for p in find_spectrum(mode1, Family.MAIN, cfg):
        if not p.is_diagonal:
            assert imaginary_twin_check(p, mode1) <= 1e-8
    with pytest.raises(ValueError):
        imaginary_twin_check(find_spectrum(mode1, Family.L03, cfg, n_branch=1)[0], mode1)


def test_diagonal_exclusion(mode1):
    rep = complex_diag_exclusion(mode1, 50.0, step=0.1)
    assert rep.certified_from <= 5.0
    for y, lam in zip(rep.roots, rep.lambdas):
        assert abs(cf.char_det_complex(y * (1 + 1j), mode1)) < 1e-10
        assert lam == pytest.approx(mode1.gamma - 4 * y ** 4)


def test_diagonal_eigenvalues_match_K(mode1, cfg):
    diag = [p for p in find_spectrum(mode1, Family.MAIN, cfg) if p.is_diagonal]
    rep = complex_diag_exclusion(mode1, 50.0)
    np.testing.assert_allclose(sorted(p.lam for p in diag), sorted(l for l in rep.lambdas if l > 0),
                               rtol=1e-9)
    for p in diag:
        assert p.lam == pytest.approx(mode1.gamma - 4 * p.z ** 4, rel=1e-12)


def test_no_eigenvalues_below_gamma_for_l02_l03(mode1, cfg):
    for fam in (Family.L02, Family.L03):
        assert all(p.lam > mode1.gamma for p in find_spectrum(mode1, fam, cfg, n_branch=5))


@pytest.mark.parametrize("k", [10, 20])
def test_large_gamma_boundary_eigenvalue(cfg, k):
    # with gamma ~ k^4 and alpha = 1/4 Main keeps an eigenvalue near 1/sqrt(2)
    m = ModeSpec(k, 1.0 + k ** 4, 0.25)
    low = find_spectrum(m, Family.MAIN, cfg, n_branch=1)[0]
    assert low.is_diagonal
    assert low.lam == pytest.approx(m.gamma ** (0.25 - m.alpha) / math.sqrt(2), rel=1e-2)


def test_csv_row_is_plain_text(mode1, cfg):
    row = find_spectrum(mode1, Family.L03, cfg, n_branch=1)[0].csv_row()
    assert row["z"] == repr(math.pi) or float(row["z"]) == pytest.approx(math.pi, abs=1e-14)
    assert "np." not in "".join(map(str, row.values()))
