"""Matrix Herglotz functions, Krein densities and large-z asymptotics.

A matrix Herglotz function here is a symmetric 2x2 function M(z) on the
upper half plane with positive imaginary part and det M = -1.  Its Krein
density

    xi(t) = (1/pi) lim_{y -> 0+} Im log M(t + i y)

satisfies 0 <= xi <= 1 and tr xi = 1 (the trace is pinned by
-1 = det M = exp(tr log M)), and log M is recovered from xi by the
exponential representation

    log M(z) = A + (i pi / 2) I + sum_gaps int (xi(t) - I/2) / (t - z) dt,

where A is a real symmetric constant (zero for the canonical construction;
the density I/2 on E contributes the explicit (i pi/2) I term).  The module
evaluates xi by limit schedules, evaluates the representation for profile
data, and extracts the potential at the origin from the two large-z laws

    M(i Y) = i (I - W(0) / (iY) + O(Y^-2)),
    log M(i Y) = (i pi / 2) I - W(0) / (iY) + O(Y^-2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotTraceless
from .finitegap import (
    GapSet,
    KreinProfile,
    PotentialSample,
    _gap_logs,
    build_M,
    gap_interior_grid,
)
from .mat2 import I2, as_mat2, im_part, mexp, mlog_spectral
from .numerics import (
    LimitSchedule,
    adaptive_gauss_legendre,
    extrapolate_schedule,
    require_convergence,
)

__all__ = [
    "MFunction",
    "KreinSample",
    "profile_m_function",
    "krein_xi",
    "rep_logM",
    "asymptotic_W",
    "herglotz_defect",
]

XI_TOL = 1e-6


@dataclass(frozen=True)
class MFunction:
    """A matrix Herglotz function as an evaluator plus provenance.

    ``evaluator`` maps z to a 2x2 complex array; it must be defined on the
    open upper half plane and may extend to real points away from the
    declared gap endpoints (as the constructed functions do).  ``source``
    records how the function arose: "constructed" (explicit finite-gap
    formula), "ode-oracle" (half-line Weyl functions of a Dirac system) or
    "assembled" (from a user-supplied Weyl pair).  ``gapset`` carries the
    declared logarithmic singularities when known.
    """

    evaluator: Callable[[complex], np.ndarray]
    source: str = "constructed"
    gapset: GapSet | None = None

    def __call__(self, z: complex) -> np.ndarray:
        return as_mat2(self.evaluator(z))


def profile_m_function(profile: KreinProfile) -> MFunction:
    """The constructed M function of a Krein profile.

    Piecewise-constant profiles use the closed form; sampled profiles go
    through the exponential representation with A = 0.
    """
    if profile.is_piecewise_constant:
        return MFunction(lambda z: build_M(profile, z), "constructed", profile.gapset)
    zero = np.zeros((2, 2))
    return MFunction(lambda z: mexp(rep_logM(profile, zero, z)),
                     "constructed", profile.gapset)


@dataclass(frozen=True)
class KreinSample:
    """One boundary sample of the Krein density.

    ``xi`` is real symmetric with eigenvalues in [0, 1] and trace 1;
    ``residual`` is the extrapolation residual of the limit schedule.
    """

    t: float
    xi: np.ndarray
    residual: float = 0.0


def krein_xi(mfun, t: float, schedule: LimitSchedule | None = None,
             xi_tol: float = XI_TOL) -> KreinSample:
    """Krein density xi(t) = (1/pi) lim Im log M(t + iy) by extrapolation.

    Samples the matrix logarithm along the schedule offsets and extrapolates
    polynomially to y = 0.  The point t must stay clear of the declared
    gap-endpoint margins when the function carries a gap set.

    Raises
    ------
    NoConvergence
        If the last two extrapolants differ by more than ``xi_tol``.
    """
    schedule = schedule or LimitSchedule()
    t = float(t)
    gapset = getattr(mfun, "gapset", None)
    if gapset is not None:
        gapset.assert_off_endpoints(t)
    ys = schedule.offsets()
    samples = [im_part(mlog_spectral(mfun(t + 1j * y))) / np.pi for y in ys]
    limit, residual = extrapolate_schedule(ys, samples, schedule.order)
    require_convergence(residual, xi_tol, f"krein_xi at t = {t}")
    xi = limit.real
    xi = 0.5 * (xi + xi.T)
    return KreinSample(t=t, xi=xi, residual=residual)


def rep_logM(profile: KreinProfile, a0, z: complex) -> np.ndarray:
    """Evaluate the exponential representation for profile boundary data.

        rep_logM = A0 + (i pi / 2) I + sum_j int_gap_j (xi(t) - I/2)/(t - z) dt

    The I/2 part of the density over all of E u gaps contributes the exact
    (i pi / 2) I term; only the gap excess is integrated.  For
    piecewise-constant profiles the gap integrals have the closed form
    log((b_j - z)/(a_j - z)) (P_j - I/2) (so rep_logM with A0 = 0 coincides
    with the closed-form construction); sampled profiles are integrated by
    Gauss-Legendre panels and require Im z > 0.
    """
    A0 = as_mat2(a0)
    if float(np.max(np.abs(A0.imag))) > 1e-12 or abs(A0[0, 1] - A0[1, 0]) > 1e-12:
        raise ValueError("A0 must be real symmetric")
    total = A0 + 0.5j * np.pi * I2
    if profile.is_piecewise_constant:
        for j, lg in enumerate(_gap_logs(profile.gapset, z)):
            total = total + lg * (profile.projection(j) - 0.5 * I2)
        return total
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("sampled profiles are evaluated on the open upper half plane")
    for j, (a, b) in enumerate(profile.gapset.gaps):
        total = total + adaptive_gauss_legendre(
            lambda t, j=j: (profile.projection(j, t) - 0.5 * I2) / (t - z), a, b)
    return total


def _default_ygrid(gapset: GapSet | None) -> np.ndarray:
    scale = max(1.0, gapset.spectral_radius) if gapset is not None else 1.0
    return scale * np.array([8.0, 16.0, 32.0, 64.0, 128.0])


def asymptotic_W(mfun, ygrid: Sequence[float] | None = None, route: str = "value",
                 rtol: float = 1e-6) -> PotentialSample:
    """Extract W(0) from the large-z law by Richardson extrapolation.

    Parameters
    ----------
    mfun : MFunction or callable
        The matrix Herglotz function.
    ygrid : sequence of float, optional
        Increasing evaluation heights; defaults to (8, 16, 32, 64, 128)
        times max(1, spectral radius of the declared gap endpoints).  The
        smallest height must stay at least 4 spectral radii out.
    route : {"value", "log"}
        "value" fits W(0) ~ z (I - M(z)/i); "log" fits
        W(0) ~ z ((i pi/2) I - log M(z)).  The two routes agree for
        admissible functions and provide independent consistency checks.
    rtol : float
        Residual bound for the extrapolation (NoConvergence beyond it).

    Returns
    -------
    PotentialSample
        (p, q) at x = 0 with the extrapolation residual.

    Raises
    ------
    NotTraceless
        If the extrapolated matrix has |trace| > 1e-6.
    """
    gapset = getattr(mfun, "gapset", None)
    ys = np.asarray(_default_ygrid(gapset) if ygrid is None else ygrid, dtype=float)
    if len(ys) < 3 or np.any(np.diff(ys) <= 0):
        raise ValueError("ygrid must be increasing with at least 3 entries")
    if gapset is not None and gapset.n and ys[0] < 4.0 * gapset.spectral_radius:
        raise ValueError("smallest height must be at least 4 spectral radii")
    if route == "value":
        vals = [1j * y * I2 - y * as_mat2(mfun(1j * y)) for y in ys]
    elif route == "log":
        vals = [1j * y * (0.5j * np.pi * I2 - mlog_spectral(mfun(1j * y))) for y in ys]
    else:
        raise ValueError(f"unknown route {route!r}")
    limit, residual = extrapolate_schedule(1.0 / ys, vals, order=min(len(ys) - 1, 6))
    require_convergence(residual, rtol * max(1.0, float(np.max(np.abs(limit)))),
                        "large-z extrapolation")
    tr = abs(limit[0, 0] + limit[1, 1])
    if tr > 1e-6:
        raise NotTraceless(f"extracted W(0) has trace magnitude {tr:.3e}")
    w = limit.real
    p = 0.5 * float(w[0, 0] - w[1, 1])
    q = 0.5 * float(w[0, 1] + w[1, 0])
    drift = max(float(np.max(np.abs(limit.imag))), abs(limit[0, 1] - limit[1, 0]))
    return PotentialSample(x=0.0, p=p, q=q, residual=max(residual, float(drift)))


def herglotz_defect(mfun, gapset: GapSet | None = None,
                    re_points: int = 41, im_points: int = 13) -> float:
    """Worst (most negative) eigenvalue of Im M over an upper-half-plane grid.

    A matrix Herglotz function has Im M(z) >= 0 throughout C+, so a
    negative return value certifies that ``mfun`` is not the M function of
    any Dirac operator; values >= 0 merely fail to find a witness.
    Positivity of the formal constructions with mismatched gap projections
    fails just above the gaps, so when a gap set is available the
    rectangular grid is refined by gap-interior columns at geometrically
    small heights.
    """
    gapset = gapset if gapset is not None else getattr(mfun, "gapset", None)
    scale = max(1.0, gapset.spectral_radius) if gapset is not None else 1.0
    pts = [complex(a, b)
           for a in np.linspace(-1.5 * scale, 1.5 * scale, re_points)
           for b in scale * np.geomspace(1e-2, 3.0, im_points)]
    if gapset is not None and gapset.n:
        heights = scale * np.geomspace(1e-4, 3e-2, 9)
        pts += [complex(t, b) for t in gap_interior_grid(gapset, per_gap=15)
                for b in heights]
    worst = np.inf
    for z in pts:
        m = as_mat2(mfun(z))
        low = float(np.linalg.eigvalsh((m - m.conj().T) / 2j)[0])
        if low < worst:
            worst = low
    return worst
