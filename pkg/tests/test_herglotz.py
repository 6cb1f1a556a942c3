"""M functions, Krein densities and the large-z potential law."""

import math

import numpy as np
import pytest

from kreindirac import (
    GapSet,
    KreinProfile,
    MFunction,
    asymptotic_W,
    build_M,
    herglotz_defect,
    krein_xi,
    profile_m_function,
    rep_logM,
    trace_formula_W0,
)
from kreindirac.errors import EndpointSingularity, NoConvergence
from kreindirac.finitegap import e_interior_grid

WITNESS_GAPS = ((-2.0, -1.0), (1.0, 2.0))
WITNESS_ANGLES = (0.3, 1.9)

TWO_GAP = GapSet(((-2.0, -1.0), (1.0, 2.0)))


def test_mfunction_wraps_and_coerces():
    mfun = MFunction(lambda z: [[z, 0], [0, z]], source="test")
    out = mfun(1j)
    assert out.shape == (2, 2) and out.dtype == complex
    assert mfun.source == "test"


def test_profile_m_function_matches_closed_form():
    prof = KreinProfile.uniform(TWO_GAP, 0.8)
    mfun = profile_m_function(prof)
    for z in (0.5j, 2.0 + 1.0j, -3.0 + 0.25j):
        np.testing.assert_allclose(mfun(z), build_M(prof, z), atol=1e-14)
    assert mfun.gapset is prof.gapset


def test_sampled_profile_route_matches_closed_form():
    # constant callables force the quadrature route through rep_logM;
    # it must land on the closed form (two independent evaluations)
    pw = KreinProfile(TWO_GAP, (0.4, 1.1))
    sampled = KreinProfile(TWO_GAP, (lambda t: 0.4, lambda t: 1.1))
    msam = profile_m_function(sampled)
    for z in (1.0j, 1.5 + 0.5j, -2.5 + 2.0j):
        np.testing.assert_allclose(msam(z), build_M(pw, z), atol=1e-9)


def test_rep_logM_closed_form_coincidence():
    prof = KreinProfile(TWO_GAP, (0.4, 1.1))
    z = 0.7 + 0.9j
    from kreindirac.finitegap import build_logM
    np.testing.assert_allclose(rep_logM(prof, np.zeros((2, 2)), z),
                               build_logM(prof, z), atol=1e-13)
    with pytest.raises(ValueError):
        rep_logM(prof, np.array([[0.0, 1j], [1j, 0.0]]), z)  # A0 not real


def test_krein_xi_recovers_projection_and_half():
    prof = KreinProfile.uniform(TWO_GAP, 1.2)
    mfun = profile_m_function(prof)
    p = prof.projection(0)
    for t in (-1.7, -1.3, 1.4):
        s = krein_xi(mfun, t)
        j = prof.gapset.containing_gap(t)
        target = p if j is not None else 0.5 * np.eye(2)
        np.testing.assert_allclose(s.xi, target, atol=1e-8)
        np.testing.assert_allclose(np.trace(s.xi), 1.0, atol=1e-10)
        assert s.residual < 1e-8
    # on a band point xi is I/2 as well
    s = krein_xi(mfun, 0.0)
    np.testing.assert_allclose(s.xi, 0.5 * np.eye(2), atol=1e-8)


def test_krein_xi_guards_endpoints():
    prof = KreinProfile.uniform(GapSet(((-1.0, 1.0),)), 0.3)
    mfun = profile_m_function(prof)
    with pytest.raises(EndpointSingularity):
        krein_xi(mfun, 1.0 - 1e-5)


def test_krein_xi_flags_non_convergence():
    # demanding machine-zero residuals from a finite schedule must fail
    prof = KreinProfile.uniform(GapSet(((-1.0, 1.0),)), 0.3)
    mfun = profile_m_function(prof)
    with pytest.raises(NoConvergence):
        krein_xi(mfun, 0.4, xi_tol=1e-16)


def test_asymptotic_routes_agree_with_trace_formula():
    rng = np.random.default_rng(31)
    for _ in range(6):
        alpha = float(rng.uniform(0.0, math.pi))
        prof = KreinProfile.uniform(TWO_GAP, alpha)
        w0 = trace_formula_W0(prof)
        mfun = profile_m_function(prof)
        for route in ("value", "log"):
            w = asymptotic_W(mfun, route=route)
            assert math.hypot(w.p - w0.p, w.q - w0.q) < 1e-6
            assert abs(w.residual) < 1e-5


def test_asymptotic_W_validates_ygrid():
    prof = KreinProfile.uniform(TWO_GAP, 0.5)
    mfun = profile_m_function(prof)
    with pytest.raises(ValueError):
        asymptotic_W(mfun, ygrid=[1.0, 2.0, 4.0])  # below 4 spectral radii
    with pytest.raises(ValueError):
        asymptotic_W(mfun, ygrid=[50.0, 40.0, 60.0])  # not increasing
    with pytest.raises(ValueError):
        asymptotic_W(mfun, ygrid=[50.0, 100.0])  # too short
    with pytest.raises(ValueError):
        asymptotic_W(mfun, route="middle")


def test_herglotz_defect_nonnegative_for_aligned():
    for gaps, alpha in ((((-1.0, 1.0),), math.pi / 4),
                        (WITNESS_GAPS, 0.3)):
        prof = KreinProfile.uniform(GapSet(gaps), alpha)
        assert herglotz_defect(profile_m_function(prof)) > -1e-9


def test_herglotz_defect_accepts_commuting_projections():
    # diagonal projections commute, so this non-aligned profile is still
    # a genuine Herglotz function
    prof = KreinProfile(TWO_GAP, (0.0, math.pi / 2))
    assert herglotz_defect(profile_m_function(prof)) > -1e-9


def test_herglotz_defect_certifies_witness():
    # non-commuting data: the formal construction is not Herglotz, the
    # scan finds an eigenvalue of Im M near -0.0066 just above a gap
    prof = KreinProfile(GapSet(WITNESS_GAPS), WITNESS_ANGLES)
    defect = herglotz_defect(profile_m_function(prof))
    assert -0.008 < defect < -0.005


def test_herglotz_defect_free_function():
    prof = KreinProfile(GapSet(()), ())
    np.testing.assert_allclose(herglotz_defect(profile_m_function(prof)), 1.0,
                               atol=1e-12)


def test_reflectionless_symmetry_of_weyl_pair():
    # m_plus(t + i0) = -conj(m_minus(t + i0)) on the interior of E
    from kreindirac import weyl_from_M
    prof = KreinProfile.uniform(TWO_GAP, 0.9)
    mfun = profile_m_function(prof)
    for t in e_interior_grid(prof.gapset):
        pair = weyl_from_M(mfun(float(t) + 1e-7j))
        assert abs(pair.m_plus + np.conj(pair.m_minus)) < 1e-5
