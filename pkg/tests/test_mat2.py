"""Branch logarithm and 2x2 spectral calculus."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kreindirac import (
    I2,
    J,
    branch_log,
    eig2,
    herglotz_positive,
    mexp,
    mlog_integral,
    mlog_spectral,
    op_norm_sym,
)
from kreindirac.errors import SpectrumNotUpper, SpectrumOnCut
from kreindirac.mat2 import as_mat2, im_part, is_symmetric, re_part


def test_constants():
    np.testing.assert_array_equal(J, [[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(J @ J, -I2)


finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def matrices(draw):
    entries = [complex(draw(finite), draw(finite)) for _ in range(4)]
    return np.array(entries).reshape(2, 2)


@given(matrices())
@settings(max_examples=200, deadline=None)
def test_eig2_reconstructs(a):
    # the reconstruction bound needs a spectral gap; confluence is tested
    # separately with its dedicated branch
    lam = np.linalg.eigvals(a)
    assume(abs(lam[0] - lam[1]) > 1e-2 * (1 + np.abs(a).max()))
    dec = eig2(a)
    np.testing.assert_allclose(dec.reconstruct(), a, atol=1e-9 * (1 + np.abs(a).max()))
    # eigenvalues solve the characteristic polynomial
    for lam in (dec.lam1, dec.lam2):
        cp = lam * lam - np.trace(a) * lam + np.linalg.det(a)
        assert abs(cp) <= 1e-8 * (1 + np.abs(a).max()) ** 2


def test_eig2_confluent():
    dec = eig2(np.array([[2.0, 1.0], [0.0, 2.0]]))
    assert dec.is_jordan
    assert dec.lam1 == dec.lam2 == 2.0
    np.testing.assert_allclose(dec.nilpotent, [[0.0, 1.0], [0.0, 0.0]], atol=1e-12)


def test_branch_log_values():
    # cut along the negative imaginary axis; argument in (-pi/2, 3pi/2)
    assert branch_log(1.0) == 0.0
    np.testing.assert_allclose(branch_log(-1.0), 1j * math.pi, atol=1e-15)
    np.testing.assert_allclose(branch_log(1j), 0.5j * math.pi, atol=1e-15)
    th = 2.0  # second quadrant stays on the +pi side
    np.testing.assert_allclose(branch_log(np.exp(1j * th)), 1j * th, atol=1e-14)
    # the ray itself keeps the closed -pi/2 edge; only 0 is rejected
    np.testing.assert_allclose(branch_log(-1j), -0.5j * math.pi, atol=1e-15)
    with pytest.raises(SpectrumOnCut):
        branch_log(0.0)
    # the matrix log refuses spectra on the cut
    with pytest.raises(SpectrumOnCut):
        mlog_spectral(np.diag([-1j, 1.0]))


def test_branch_log_against_principal():
    # the two branches agree wherever the argument lies in (-pi/2, pi)
    rng = np.random.default_rng(3)
    for _ in range(200):
        w = complex(rng.normal(), rng.normal())
        ang = math.atan2(w.imag, w.real)
        if -math.pi / 2 + 1e-6 < ang < math.pi - 1e-6:
            np.testing.assert_allclose(branch_log(w), np.log(w), atol=1e-14)


def _strip_matrices(count, seed, floor=0.05):
    """Random matrices whose spectrum stays clear of the log cut."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        lam = np.linalg.eigvals(a)
        # distance to the ray {-iy : y >= 0}
        dist = np.where(lam.imag >= 0, np.abs(lam), np.abs(lam.real))
        if np.all(dist > floor):
            out.append(a)
    return out


def test_mlog_spectrum_in_strip_and_inverts_exp():
    for a in _strip_matrices(300, seed=11):
        la = mlog_spectral(a)
        lam = np.linalg.eigvals(la)
        assert np.all(lam.imag > -math.pi / 2 - 1e-12)
        assert np.all(lam.imag < 3 * math.pi / 2 + 1e-12)
        np.testing.assert_allclose(mexp(la), a, atol=1e-10 * (1 + np.abs(a).max()))


def test_mlog_dual_routes_agree():
    # spectral versus integral representation on upper spectra
    rng = np.random.default_rng(12)
    n = 0
    while n < 100:
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if np.any(np.linalg.eigvals(a).imag < 0.05):
            continue
        n += 1
        np.testing.assert_allclose(mlog_spectral(a), mlog_integral(a), atol=1e-9)


def test_mlog_integral_rejects_lower_spectrum():
    with pytest.raises(SpectrumNotUpper):
        mlog_integral(np.array([[1.0 - 1j, 0.0], [0.0, 1j]]))


def test_mlog_near_confluent_stability():
    # eigenvalues a distance eps apart must not blow up the log
    for eps in (1e-4, 1e-7, 1e-10, 0.0):
        a = np.array([[1j, 1.0], [0.0, 1j * (1 + eps)]])
        la = mlog_spectral(a)
        np.testing.assert_allclose(mexp(la), a, atol=1e-8)


@given(finite, finite)
@settings(max_examples=100, deadline=None)
def test_op_norm_sym_matches_eigenvalues(p, q):
    w = np.array([[p, q], [q, -p]])
    assert math.isclose(op_norm_sym(p, q), float(np.linalg.norm(w, 2)),
                        rel_tol=1e-12, abs_tol=1e-12)


def test_herglotz_positive():
    assert herglotz_positive(1j * I2)
    assert not herglotz_positive(-1j * I2)
    assert not herglotz_positive(np.array([[1j, 2j], [2j, 1j]]))  # det Im = -3
    assert herglotz_positive(np.array([[2j, 1j], [1j, 2j]]))


def test_parts_and_symmetry_helpers():
    a = np.array([[1 + 2j, 3 - 1j], [0.5j, -2.0]])
    np.testing.assert_allclose(re_part(a) + 1j * im_part(a), a, atol=1e-15)
    assert np.allclose(im_part(a), im_part(a).conj().T)
    assert is_symmetric(np.array([[1.0, 2j], [2j, 3.0]]))
    assert not is_symmetric(np.array([[1.0, 2j], [2.1j, 3.0]]))


def test_as_mat2_validates_shape():
    with pytest.raises(ValueError):
        as_mat2(np.eye(3))
