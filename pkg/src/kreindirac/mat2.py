"""Exact-shape kernel for 2x2 complex matrices.

Everything in this package runs through 2x2 complex matrices: values of the
matrix Herglotz function M(z), Krein densities xi(t), transfer matrices and
trace-zero potentials.  This module supplies the closed-form eigenapparatus
and the matrix logarithm with the one branch that makes Krein densities well
defined:

* the scalar branch cut sits on the negative imaginary axis, so the branch
  maps the closed upper half plane minus {0} into the strip
  -pi/2 < Im log w < 3pi/2 and agrees with the principal logarithm on the
  upper half plane (0 < Im log w < pi there, log 1 = 0);
* matrices are treated by the 2x2 Lagrange-Sylvester formula, with a
  confluent (Jordan) fallback f(A) = f(lam) I + f'(lam) N when the two
  eigenvalues coalesce;
* an independent integral representation of the logarithm,
  log A = int_0^inf [ t/(t^2+1) I - (t I + A)^(-1) ] dt, valid for spectra in
  the open upper half plane, serves as a cross-check route.

Matrices are plain ``(2, 2)`` complex ``numpy`` arrays throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import QuadratureFailure, SpectrumNotUpper, SpectrumOnCut

__all__ = [
    "J",
    "I2",
    "JORDAN_TOL",
    "EigenDecomp2",
    "as_mat2",
    "mat2",
    "is_symmetric",
    "re_part",
    "im_part",
    "eig2",
    "branch_log",
    "mexp",
    "mlog_spectral",
    "mlog_integral",
    "herglotz_positive",
    "op_norm_sym",
]

# Symplectic rotation entering the Dirac system J y' + W y = -z y.
J = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

# Relative eigenvalue-collision threshold below which a matrix is treated as
# confluent (single eigenvalue, possibly with a nilpotent part).
JORDAN_TOL = 1e-9

# Relative distance to the branch cut below which the spectral logarithm
# refuses to choose a branch.
_CUT_TOL = 1e-13


def as_mat2(a) -> np.ndarray:
    """Coerce ``a`` to a finite (2, 2) complex array.

    Raises ``ValueError`` on wrong shape or non-finite entries; this is the
    only entry validation the kernel performs.
    """
    m = np.asarray(a, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    return m


def mat2(m11, m12, m21, m22) -> np.ndarray:
    """Build a validated 2x2 complex matrix from four entries."""
    return as_mat2([[m11, m12], [m21, m22]])


def is_symmetric(a, tol: float = 1e-12) -> bool:
    """True if ``a`` equals its transpose up to ``tol`` relative to its norm."""
    m = as_mat2(a)
    scale = max(np.linalg.norm(m, 2), 1.0)
    return abs(m[0, 1] - m[1, 0]) <= tol * scale


def re_part(a) -> np.ndarray:
    """Matrix real part (A + A*)/2 (entrywise real part for symmetric A)."""
    m = as_mat2(a)
    return (m + m.conj().T) / 2.0


def im_part(a) -> np.ndarray:
    """Matrix imaginary part (A - A*)/(2i) (entrywise imaginary part for symmetric A)."""
    m = as_mat2(a)
    return (m - m.conj().T) / 2.0j


@dataclass(frozen=True)
class EigenDecomp2:
    """Closed-form eigendata of a 2x2 complex matrix.

    For a diagonalizable matrix ``basis`` holds the two eigenvectors as
    columns (ordered like ``lam1``, ``lam2``) and ``nilpotent`` is ``None``.
    In the confluent case ``lam1 == lam2`` is the double eigenvalue and
    ``nilpotent`` is the (numerically squared-to-zero) part N with
    A = lam I + N; ``basis`` is ``None`` then.
    """

    lam1: complex
    lam2: complex
    basis: np.ndarray | None
    nilpotent: np.ndarray | None = None

    @property
    def is_jordan(self) -> bool:
        return self.nilpotent is not None

    def reconstruct(self) -> np.ndarray:
        """Rebuild the matrix from the eigendata (test aid)."""
        if self.is_jordan:
            return self.lam1 * I2 + self.nilpotent
        v = self.basis
        return v @ np.diag([self.lam1, self.lam2]) @ np.linalg.inv(v)


def _eigvals2(a: np.ndarray) -> tuple[complex, complex]:
    # Roots of lam^2 - tr lam + det; the explicit form keeps conjugate
    # symmetry and avoids LAPACK overhead on this hot path.
    half_tr = 0.5 * (a[0, 0] + a[1, 1])
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = np.sqrt(half_tr * half_tr - det + 0j)
    return complex(half_tr + disc), complex(half_tr - disc)


def eig2(a, jordan_tol: float = JORDAN_TOL) -> EigenDecomp2:
    """Eigendecomposition of a 2x2 matrix with an explicit confluent branch.

    Parameters
    ----------
    a : array_like
        2x2 complex matrix.
    jordan_tol : float
        Relative threshold: eigenvalues with |lam1 - lam2| <= jordan_tol * ||A||
        are treated as a single (possibly defective) eigenvalue.

    Returns
    -------
    EigenDecomp2
        Either two eigenpairs (reconstruction accurate to ~ ||A|| * 1e-12 for
        well separated spectra) or the confluent data (lam, N) with N^2 ~ 0.
    """
    m = as_mat2(a)
    lam1, lam2 = _eigvals2(m)
    scale = max(np.linalg.norm(m, 2), 1e-300)
    if abs(lam1 - lam2) <= jordan_tol * scale:
        lam = 0.5 * (lam1 + lam2)
        nil = m - lam * I2
        if np.linalg.norm(nil, 2) <= jordan_tol * scale:
            # Scalar matrix: diagonalizable in the standard basis.
            return EigenDecomp2(lam, lam, I2.copy())
        return EigenDecomp2(lam, lam, None, nilpotent=nil)

    vecs = []
    for lam in (lam1, lam2):
        r = m - lam * I2
        # An eigenvector annihilates both rows; take the kernel direction of
        # the numerically larger row.
        rows = [r[0], r[1]]
        row = max(rows, key=lambda x: abs(x[0]) + abs(x[1]))
        v = np.array([-row[1], row[0]], dtype=complex)
        v /= np.linalg.norm(v)
        vecs.append(v)
    return EigenDecomp2(lam1, lam2, np.column_stack(vecs))


def branch_log(w: complex) -> complex:
    """Scalar logarithm with the branch cut on the negative imaginary axis.

    Agrees with the principal logarithm off the third/fourth-quadrant wedge:
    the argument is taken in (-pi/2, 3pi/2), so negative reals get argument
    +pi (the limit from the upper half plane) and log 1 = 0.
    """
    w = complex(w)
    if w == 0:
        raise SpectrumOnCut("logarithm of 0 requested")
    ang = np.angle(w)
    if ang < -np.pi / 2:
        ang += 2 * np.pi
    return complex(np.log(abs(w)), ang)


def _cut_distance(w: complex) -> float:
    # Distance from w to the ray {-iy : y >= 0}.
    if w.imag >= 0.0:
        return abs(w)
    return abs(w.real)


def _apply_analytic(a: np.ndarray, f, fprime) -> np.ndarray:
    """f(A) by Lagrange-Sylvester interpolation with a confluent fallback."""
    lam1, lam2 = _eigvals2(a)
    scale = max(np.linalg.norm(a, 2), 1e-300)
    if abs(lam1 - lam2) > JORDAN_TOL * scale:
        f1, f2 = f(lam1), f(lam2)
        return (f1 * (a - lam2 * I2) - f2 * (a - lam1 * I2)) / (lam1 - lam2)
    lam = 0.5 * (lam1 + lam2)
    return f(lam) * I2 + fprime(lam) * (a - lam * I2)


def mexp(a) -> np.ndarray:
    """Matrix exponential of a 2x2 matrix (spectral form, confluent-safe)."""
    return _apply_analytic(as_mat2(a), np.exp, np.exp)


def mlog_spectral(a) -> np.ndarray:
    """Matrix logarithm with spectrum mapped into the strip -pi/2 < Im < 3pi/2.

    The scalar branch of :func:`branch_log` is applied to both eigenvalues;
    the confluent case A = lam I + N returns log(lam) I + N / lam.  This is
    the unique logarithm whose spectrum lies in the strip, which is what
    makes boundary densities (1/pi) Im log M(t) well defined: matrices
    approached from the upper half plane have eigenvalues just above the
    real axis, safely away from the cut on the negative imaginary axis.

    Raises
    ------
    SpectrumOnCut
        If an eigenvalue lies on the excluded ray {-iy : y >= 0} within a
        relative distance of 1e-13.
    """
    m = as_mat2(a)
    lam1, lam2 = _eigvals2(m)
    scale = max(abs(lam1), abs(lam2), 1e-300)
    for lam in (lam1, lam2):
        if _cut_distance(lam) <= _CUT_TOL * scale:
            raise SpectrumOnCut(f"eigenvalue {lam} lies on the branch cut")
    return _apply_analytic(m, branch_log, lambda w: 1.0 / w)


def mlog_integral(a, quad_tol: float = 1e-12) -> np.ndarray:
    """Matrix logarithm by the integral representation (upper spectra only).

        log A = int_0^inf [ t/(t^2+1) I - (t I + A)^(-1) ] dt

    The half line is mapped to (0, 1) by t = u/(1-u) and the transformed
    integrand is handled by adaptive Gauss-Kronrod panels with absolute
    target ``quad_tol``.  For spectra in the open upper half plane this
    agrees with :func:`mlog_spectral`; the two routes share no code, so their
    agreement is a genuine cross-check of the branch choice.

    Raises
    ------
    SpectrumNotUpper
        If an eigenvalue has Im <= 0 (the representation fails there).
    QuadratureFailure
        If the quadrature error estimate exceeds the target budget.
    """
    m = as_mat2(a)
    lam1, lam2 = _eigvals2(m)
    if lam1.imag <= 0 or lam2.imag <= 0:
        raise SpectrumNotUpper(f"spectrum {{{lam1}, {lam2}}} is not in the open upper half plane")

    def integrand(u):
        t = u / (1.0 - u)
        jac = 1.0 / (1.0 - u) ** 2
        return (t / (t * t + 1.0) * I2 - np.linalg.inv(t * I2 + m)) * jac

    # limit=20000 GK21 panels stays well under the 1e6 evaluation budget.
    res, err = quad_vec(integrand, 0.0, 1.0, epsabs=quad_tol, epsrel=quad_tol / 10,
                        norm="max", limit=20000)
    if err > max(quad_tol, 1e-11 * np.linalg.norm(res, 2)):
        raise QuadratureFailure(f"logarithm quadrature stalled at error {err:.3e}")
    return res


def herglotz_positive(a, tol: float = 0.0) -> bool:
    """True if the matrix imaginary part (A - A*)/(2i) is positive definite.

    For the 2x2 hermitian imaginary part positivity is equivalent to
    trace > 0 together with det > 0; ``tol`` loosens both checks.
    """
    b = im_part(as_mat2(a))
    tr = b[0, 0].real + b[1, 1].real
    det = (b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]).real
    return tr > -tol and det > -tol * max(tr, 1.0)


def op_norm_sym(p: float, q: float) -> float:
    """Operator norm of the trace-zero symmetric matrix [[p, q], [q, -p]]."""
    return float(np.hypot(p, q))
