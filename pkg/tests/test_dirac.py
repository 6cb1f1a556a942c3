"""Dirac system oracles and the potential march."""

import math

import numpy as np
import pytest

from kreindirac import (
    GapSet,
    KreinProfile,
    StepPotential,
    assemble_M,
    build_M,
    const_weyl,
    mexp,
    ode_m_function,
    ode_weyl,
    riccati_rhs,
    riccati_step,
    sample_potential,
    sharp_bound,
    trace_formula_W0,
    transfer,
    weyl_from_M,
)
from kreindirac.dirac import (
    coefficient_matrix,
    step_potential_from_json,
    step_potential_to_json,
)
from kreindirac.errors import (
    BoundViolation,
    DegenerateDichotomy,
    PoleCrossing,
    StepRejected,
)

WITNESS_GAPS = ((-2.0, -1.0), (1.0, 2.0))
WITNESS_ANGLES = (0.3, 1.9)

# march values for the aligned two-gap profile, frozen from converged runs
# (loc_tol refinement 1e-6 -> 1e-10 moves the x = 0.3 value by < 2e-7, and
# the small-x law q(x) = 1 - 4 x^2 + O(x^4) matches to the quartic term)
TAYLOR_PROFILE = (WITNESS_GAPS, math.pi / 4)
Q_AT_01 = 0.960136319578
Q_AT_02 = 0.842317450331
Q_AT_03 = 0.652766370017


def test_step_potential_lookup():
    w = StepPotential(breakpoints=(0.0, 1.0), pieces=((1.0, 2.0),),
                      tails=((0.0, 0.0), (3.0, -1.0)))
    assert w.value_at(-0.5) == (0.0, 0.0)
    assert w.value_at(0.5) == (1.0, 2.0)
    assert w.value_at(2.0) == (3.0, -1.0)
    with pytest.raises(ValueError):
        StepPotential(breakpoints=(), pieces=(), tails=((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        StepPotential(breakpoints=(1.0, 0.0), pieces=((0, 0),),
                      tails=((0, 0), (0, 0)))


def test_step_potential_json_round_trip():
    w = StepPotential(breakpoints=(-0.5, 0.5), pieces=((0.2, -0.3),),
                      tails=((1.0, 0.0), (0.0, 1.0)))
    again = step_potential_from_json(step_potential_to_json(w))
    assert again == w
    with pytest.raises(ValueError):
        step_potential_from_json({"breakpoints": [0.0]})


def test_coefficient_matrix_square_is_scalar():
    rng = np.random.default_rng(41)
    for _ in range(50):
        p, q = rng.normal(size=2)
        z = complex(rng.normal(), rng.normal())
        k = coefficient_matrix(p, q, z)
        np.testing.assert_allclose(np.trace(k), 0.0, atol=1e-14)
        np.testing.assert_allclose(k @ k, (p * p + q * q - z * z) * np.eye(2),
                                   atol=1e-12)


def test_transfer_cocycle_and_det():
    w = StepPotential(breakpoints=(0.0, 0.7, 1.3), pieces=((1.0, 0.5), (-0.4, 0.9)),
                      tails=((0.2, 0.0), (0.0, -0.8)))
    z = 0.6 + 0.8j
    t_all = transfer(w, -0.5, 2.0, z)
    t_two = transfer(w, 1.0, 2.0, z) @ transfer(w, -0.5, 1.0, z)
    np.testing.assert_allclose(t_all, t_two, atol=1e-12)
    np.testing.assert_allclose(np.linalg.det(t_all), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        transfer(w, 1.0, 0.0, z)


def test_const_weyl_is_riccati_fixed_point():
    rng = np.random.default_rng(42)
    for _ in range(50):
        p, q = rng.normal(size=2)
        z = complex(rng.normal(), abs(rng.normal()) + 0.1)
        pair = const_weyl(p, q, z)
        # m_plus is the attracting fixed point of the Riccati flow and
        # -m_minus is the other algebraic root of the same quadratic
        assert abs(riccati_rhs(pair.m_plus, p, q, z)) < 1e-9
        assert abs(riccati_rhs(-pair.m_minus, p, q, z)) < 1e-9
        assert pair.m_plus.imag > 0


def test_const_weyl_free_case():
    pair = const_weyl(0.0, 0.0, 0.5j)
    np.testing.assert_allclose(pair.m_plus, 1j, atol=1e-14)
    np.testing.assert_allclose(pair.m_minus, 1j, atol=1e-14)


def test_dichotomy_degenerates_on_bands():
    # |t| > r puts z in the essential spectrum: no decaying direction;
    # the public routes guard with Im z > 0 before ever reaching this
    from kreindirac.dirac import _dichotomy
    with pytest.raises(DegenerateDichotomy):
        _dichotomy(0.0, 1.0, 5.0)
    with pytest.raises(ValueError):
        const_weyl(0.0, 1.0, 5.0)


def test_ode_weyl_matches_const_weyl():
    rng = np.random.default_rng(43)
    for _ in range(20):
        p, q = rng.normal(size=2)
        z = complex(rng.normal(), abs(rng.normal()) + 0.2)
        cw = const_weyl(p, q, z)
        ow = ode_weyl(StepPotential.constant(p, q), z)
        assert abs(cw.m_plus - ow.m_plus) < 1e-10
        assert abs(cw.m_minus - ow.m_minus) < 1e-10
    with pytest.raises(ValueError):
        ode_weyl(StepPotential.constant(1.0, 0.0), 2.0)  # needs Im z > 0


def test_ode_m_function_triangle():
    # constant (p, q) <-> uniform profile on the gap (-r, r): the ODE
    # route, the closed Weyl form and the gap construction coincide
    p, q = 3.0, 4.0
    prof = KreinProfile.uniform(GapSet(((-5.0, 5.0),)), 0.5 * math.atan2(q, p))
    mfun = ode_m_function(StepPotential.constant(p, q))
    for z in (2j, 6j, 1.0 + 3.0j, -4.0 + 0.5j):
        np.testing.assert_allclose(mfun(z), build_M(prof, z), atol=1e-8)
        np.testing.assert_allclose(assemble_M(const_weyl(p, q, z)),
                                   build_M(prof, z), atol=1e-8)


def test_riccati_step_matches_moebius_transport():
    # DP integration against the matrix-exponential Moebius action
    rng = np.random.default_rng(44)
    steps = 0
    while steps < 2000:
        p, q = rng.normal(size=2)
        z = complex(rng.normal(), abs(rng.normal()) + 0.1)
        m0 = complex(rng.normal(), abs(rng.normal()))
        h = rng.uniform(0.005, 0.05)
        T = mexp(h * coefficient_matrix(p, q, z))
        denom = T[1, 0] * m0 + T[1, 1]
        if abs(denom) < 1e-3:
            continue
        exact = (T[0, 0] * m0 + T[0, 1]) / denom
        try:
            stepped = riccati_step(m0, p, q, z, h, tol=1e-10)
        except (StepRejected, PoleCrossing):
            continue
        assert abs(stepped - exact) <= 1e-8 * (1.0 + abs(exact))
        steps += 1


def test_riccati_step_rejects_large_steps():
    with pytest.raises(StepRejected):
        riccati_step(50.0 + 1j, 2.0, 1.0, 3.0 + 0.5j, h=1.0, tol=1e-12)


def test_march_single_gap_is_constant():
    prof = KreinProfile.uniform(GapSet(((-1.0, 1.0),)), math.pi / 4)
    for s in sample_potential(prof, np.linspace(0.0, 2.0, 9)):
        assert abs(s.norm - 1.0) < 1e-10
        assert abs(s.p) < 1e-10
        assert abs(s.q - 1.0) < 1e-10


def test_march_off_center_gap_rotates():
    # gap (c - r, c + r): the orbit is the rigid rotation
    # (p + iq)(x) = exp(2 i c x) (p + iq)(0) with the norm pinned at r
    c, r, alpha = 1.5, 1.0, 0.7
    prof = KreinProfile.uniform(GapSet(((c - r, c + r),)), alpha)
    w0 = trace_formula_W0(prof)
    np.testing.assert_allclose([w0.p, w0.q],
                               [math.cos(2 * alpha), math.sin(2 * alpha)],
                               atol=1e-14)
    for s in sample_potential(prof, np.linspace(0.0, 1.0, 5)):
        pred = (w0.p + 1j * w0.q) * np.exp(2j * c * s.x)
        assert abs((s.p + 1j * s.q) - pred) < 1e-7
        assert abs(s.norm - r) < 1e-12


def test_march_two_gap_frozen_values():
    gaps, alpha = TAYLOR_PROFILE
    prof = KreinProfile.uniform(GapSet(gaps), alpha)
    ss = sample_potential(prof, [0.0, 0.1, 0.2, 0.3])
    qs = [s.q for s in ss]
    assert abs(qs[0] - 1.0) < 1e-12
    assert abs(qs[1] - Q_AT_01) < 1e-6
    assert abs(qs[2] - Q_AT_02) < 1e-6
    assert abs(qs[3] - Q_AT_03) < 1e-6
    # p stays zero along this symmetric orbit
    assert max(abs(s.p) for s in ss) < 1e-10
    # small-x law: q(x) = 1 - 4 x^2 + O(x^4)
    fine = sample_potential(prof, [0.0, 0.005, 0.01], loc_tol=1e-10)
    qpp = (fine[2].q - 2 * fine[1].q + fine[0].q) / 0.005 ** 2
    assert abs(qpp + 8.0) < 1e-3


def test_march_derivative_against_large_z_fit():
    # independent route to W'(0): fit m_plus(iy) = i + g1/z + g2/z^2 + ...
    # and use q' + i p' = 2 i g2 - (q^2 - p^2) - 2 i p q at x = 0
    prof = KreinProfile.uniform(GapSet(WITNESS_GAPS), math.pi / 3)
    ys = np.array([300.0, 420.0, 600.0, 850.0, 1200.0, 1700.0])
    rows = np.array([[(1j * y) ** -k for k in range(1, 5)] for y in ys])
    vals = np.array([weyl_from_M(build_M(prof, 1j * y)).m_plus - 1j for y in ys])
    g1, g2, _, _ = np.linalg.lstsq(rows, vals, rcond=None)[0]
    w0 = trace_formula_W0(prof)
    np.testing.assert_allclose(g1, -(w0.q + 1j * w0.p), atol=1e-6)
    slope_law = 2j * g2 - (w0.q ** 2 - w0.p ** 2) - 2j * w0.p * w0.q
    ss = sample_potential(prof, [0.0, 0.01, 0.02], loc_tol=1e-10)
    dq = (-3 * ss[0].q + 4 * ss[1].q - ss[2].q) / 0.02
    dp = (-3 * ss[0].p + 4 * ss[1].p - ss[2].p) / 0.02
    assert abs(complex(dq, dp) - slope_law) < 1e-3


def test_march_respects_sharp_bound_for_aligned():
    rng = np.random.default_rng(45)
    for _ in range(5):
        gs = GapSet(WITNESS_GAPS)
        prof = KreinProfile.uniform(gs, float(rng.uniform(0.0, math.pi)))
        bound = sharp_bound(gs)
        for s in sample_potential(prof, np.linspace(0.0, 0.5, 6)):
            assert s.norm <= bound + 1e-10


def test_march_flags_witness_profile():
    # non-commuting projections: the formal M function is not Herglotz and
    # its orbit crosses the sharp bound; the certificate carries the
    # samples accepted before the crossing
    prof = KreinProfile(GapSet(WITNESS_GAPS), WITNESS_ANGLES)
    with pytest.raises(BoundViolation) as info:
        sample_potential(prof, np.linspace(0.0, 0.8, 17))
    assert "sharp bound" in str(info.value)
    partial = info.value.samples
    assert partial and abs(partial[-1].x - 0.5) < 1e-12


def test_march_gapless_profile():
    prof = KreinProfile(GapSet(()), ())
    for s in sample_potential(prof, [0.0, 1.0, 2.0]):
        assert s.norm == 0.0


def test_march_validates_xgrid():
    prof = KreinProfile.uniform(GapSet(((-1.0, 1.0),)), 0.4)
    with pytest.raises(ValueError):
        sample_potential(prof, [0.5, 1.0])  # must start at 0
    with pytest.raises(ValueError):
        sample_potential(prof, [0.0, 0.2, 0.1])  # not increasing


def test_march_loc_tol_refinement_consistency():
    prof = KreinProfile.uniform(GapSet(WITNESS_GAPS), math.pi / 4)
    loose = sample_potential(prof, [0.0, 0.3], loc_tol=1e-6)[-1].q
    tight = sample_potential(prof, [0.0, 0.3], loc_tol=1e-9)[-1].q
    assert abs(loose - tight) < 1e-5
    assert abs(tight - Q_AT_03) < 1e-7
