"""Dirac systems J y' + W y = -z y with trace-zero symmetric potentials.

The potential W(x) = [[p(x), q(x)], [q(x), -p(x)]] enters through the
first-order system y' = K(x, z) y with

    K = J (W + z) = [[-q, p - z], [p + z, q]],   tr K = 0,

so transfer matrices have determinant one.  Half-line Weyl functions are
solution ratios m_plus(z) = y1/y2 of the solution decaying at +infinity
(m_minus = -y1/y2 for the one decaying at -infinity); they satisfy the
Riccati equation

    m' = (p - z) - 2 q m - (p + z) m^2.

The module provides step potentials with exact piecewise transfer matrices,
closed-form Weyl functions for constant coefficients, an embedded
Dormand-Prince 5(4) Riccati stepper with a pole-chart switch (the inverted
coordinate 1/m obeys the same equation under (p, q, z) -> (p, -q, -z)), and
the orbit sampler that marches the gap boundary values of the Herglotz
matrix by congruence, M_x(t) = T M_0(t) T^t, and reads W(x) off the trace
formula over the shifted Krein density.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundViolation,
    DegenerateDichotomy,
    NoConvergence,
    PoleCrossing,
    StepRejected,
)
from .finitegap import (KreinProfile, PotentialSample, sharp_bound, WeylPair,
                        assemble_M, build_M)
from .herglotz import MFunction, asymptotic_W, profile_m_function
from .mat2 import im_part, mexp, mlog_spectral

__all__ = [
    "POLE_GUARD",
    "StepPotential",
    "step_potential_from_json",
    "step_potential_to_json",
    "coefficient_matrix",
    "transfer",
    "const_weyl",
    "ode_weyl",
    "ode_m_function",
    "riccati_rhs",
    "riccati_step",
    "sample_potential",
]

# Chart-switch threshold for Riccati trajectories on the Riemann sphere.
POLE_GUARD = 1e6


@dataclass(frozen=True)
class StepPotential:
    """Piecewise-constant potential: tails outside the breakpoints, one
    constant (p, q) per bounded interval between consecutive breakpoints."""

    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[float, float], ...]
    tails: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        if not bp:
            raise ValueError("need at least one breakpoint")
        if any(not b1 < b2 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        pieces = tuple((float(p), float(q)) for p, q in self.pieces)
        if len(pieces) != len(bp) - 1:
            raise ValueError(f"expected {len(bp) - 1} pieces, got {len(pieces)}")
        tails = tuple((float(p), float(q)) for p, q in self.tails)
        if len(tails) != 2:
            raise ValueError("need exactly two tails")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "tails", tails)

    @classmethod
    def constant(cls, p: float, q: float) -> "StepPotential":
        return cls((0.0,), (), (((p, q)), (p, q)))

    def value_at(self, x: float) -> tuple[float, float]:
        i = bisect.bisect_right(self.breakpoints, x)
        if i == 0:
            return self.tails[0]
        if i == len(self.breakpoints):
            return self.tails[1]
        return self.pieces[i - 1]


def step_potential_from_json(obj: dict) -> StepPotential:
    """Build from {"breakpoints": [...], "pieces": [[p, q], ...],
    "tails": [[p, q], [p, q]]}."""
    try:
        return StepPotential(tuple(obj["breakpoints"]),
                             tuple(tuple(pq) for pq in obj.get("pieces", ())),
                             tuple(tuple(pq) for pq in obj["tails"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed step potential: {exc}") from exc


def step_potential_to_json(w: StepPotential) -> dict:
    return {"breakpoints": list(w.breakpoints),
            "pieces": [list(pq) for pq in w.pieces],
            "tails": [list(pq) for pq in w.tails]}


def coefficient_matrix(p: float, q: float, z: complex) -> np.ndarray:
    """K = J (W + z) = [[-q, p - z], [p + z, q]] (trace zero)."""
    return np.array([[-q, p - z], [p + z, q]], dtype=complex)


def transfer(w: StepPotential, x0: float, x1: float, z: complex) -> np.ndarray:
    """Propagator T with y(x1) = T y(x0); det T = 1.

    The product of per-segment matrix exponentials exp(l K) over the
    constant pieces covering [x0, x1].  For the free piece (p = q = 0) a
    segment contributes the rotation [[cos zl, -sin zl], [sin zl, cos zl]].
    """
    if not x0 <= x1:
        raise ValueError("need x0 <= x1")
    cuts = [x0] + [b for b in w.breakpoints if x0 < b < x1] + [x1]
    T = np.eye(2, dtype=complex)
    for u, v in zip(cuts, cuts[1:]):
        p, q = w.value_at(0.5 * (u + v))
        T = mexp((v - u) * coefficient_matrix(p, q, z)) @ T
    return T


def _dichotomy(p: float, q: float, z: complex) -> tuple[complex, complex]:
    """(lambda_plus, lambda_minus) with Re lambda_plus > 0 > Re lambda_minus
    for the constant-coefficient system; lambda^2 = p^2 + q^2 - z^2."""
    lam = complex(np.sqrt(complex(p * p + q * q - z * z)))
    if abs(lam.real) <= 1e-12 * max(1.0, abs(lam)):
        raise DegenerateDichotomy(f"Re lambda = {lam.real:.3e} at z = {z}")
    if lam.real < 0:
        lam = -lam
    return lam, -lam


def _ratio(v0: complex, v1: complex) -> complex:
    if abs(v1) <= 1e-14 * abs(v0):
        return complex(np.inf)
    return complex(v0 / v1)


def const_weyl(p: float, q: float, z: complex) -> WeylPair:
    """Weyl pair of the constant potential [[p, q], [q, -p]] at Im z > 0.

        m_plus = (p - z)/(lambda_minus + q),
        m_minus = -(p - z)/(lambda_plus + q),

    from the decaying eigenvectors (p - z, q + lambda) of K.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("const_weyl needs Im z > 0")
    lam_p, lam_m = _dichotomy(p, q, z)
    return WeylPair(m_plus=_ratio(p - z, q + lam_m),
                    m_minus=-_ratio(p - z, q + lam_p))


def ode_weyl(w: StepPotential, z: complex) -> WeylPair:
    """Weyl pair of a step potential by seeding decaying tail eigenvectors
    at the outer breakpoints and transporting them to 0 with transfer
    matrices."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("ode_weyl needs Im z > 0")
    b_first, b_last = w.breakpoints[0], w.breakpoints[-1]

    pt, qt = w.tails[1]
    lam_p, lam_m = _dichotomy(pt, qt, z)
    v = np.array([pt - z, qt + lam_m], dtype=complex)
    if b_last > 0:
        T = transfer(w, 0.0, b_last, z)
        # inverse of a det-1 matrix
        v = np.array([T[1, 1] * v[0] - T[0, 1] * v[1],
                      -T[1, 0] * v[0] + T[0, 0] * v[1]])
    m_plus = _ratio(v[0], v[1])

    pt, qt = w.tails[0]
    lam_p, lam_m = _dichotomy(pt, qt, z)
    v = np.array([pt - z, qt + lam_p], dtype=complex)
    if b_first < 0:
        v = transfer(w, b_first, 0.0, z) @ v
    m_minus = -_ratio(v[0], v[1])
    return WeylPair(m_plus=m_plus, m_minus=m_minus)


def ode_m_function(w: StepPotential) -> MFunction:
    """The matrix Herglotz function assembled from a step potential's Weyl
    pair (an independent oracle for the explicit construction)."""
    return MFunction(lambda z: assemble_M(ode_weyl(w, z)), source="ode-oracle")


def riccati_rhs(m, p: float, q: float, z: complex):
    """Right-hand side (p - z) - 2 q m - (p + z) m^2 (vectorizes over m)."""
    return (p - z) - 2.0 * q * m - (p + z) * m * m


# Dormand-Prince 5(4) tableau (stage weights; the equation is autonomous).
_DP_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _dp_step(y, h: float, rhs):
    """One embedded 5(4) step; returns (y5, per-component error estimate)."""
    k = [rhs(y)]
    for row in _DP_A:
        acc = row[0] * k[0]
        for a, ki in zip(row[1:], k[1:]):
            if a:
                acc = acc + a * ki
        k.append(rhs(y + h * acc))
    y5 = y + h * sum(b * ki for b, ki in zip(_DP_B5, k) if b)
    err = h * sum(e * ki for e, ki in zip(_DP_ERR, k) if e)
    return y5, np.abs(err)


def riccati_step(m: complex, p: float, q: float, z: complex, h: float,
                 tol: float = 1e-9, pole_guard: float = POLE_GUARD) -> complex:
    """Advance the Riccati equation by one embedded 5(4) step of size h.

    Raises
    ------
    StepRejected
        If the embedded error estimate exceeds tol * (1 + |m_new|); the
        estimate rides in the exception for step-size control.
    PoleCrossing
        If the result leaves the chart (|m_new| > pole_guard).  Drivers
        switch to the inverted coordinate w = 1/m, which satisfies the same
        equation with parameters (p, -q, -z).
    """
    y5, err = _dp_step(complex(m), float(h), lambda v: riccati_rhs(v, p, q, z))
    scale = tol * (1.0 + abs(y5))
    if err > scale:
        raise StepRejected(float(err))
    if abs(y5) > pole_guard:
        raise PoleCrossing(y5)
    return complex(y5)


def _gap_nodes(gapset, n: int):
    """Gauss-Legendre nodes and weights on each gap, concatenated."""
    u, w = np.polynomial.legendre.leggauss(n)
    ts, ws = [], []
    for a, b in gapset.gaps:
        ts.append(0.5 * (a + b) + 0.5 * (b - a) * u)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(ts), np.concatenate(ws)


def _blog(w: np.ndarray) -> np.ndarray:
    # vectorized branch_log: argument in (-pi/2, 3pi/2)
    ang = np.angle(w)
    ang = np.where(ang < -0.5 * np.pi, ang + 2.0 * np.pi, ang)
    return np.log(np.abs(w)) + 1j * ang


def _xi_defect(mats: np.ndarray) -> np.ndarray:
    """Batched Im log(M)/pi - I/2 for symmetric det = -1 matrices.

    Uses the two-point interpolation form of the matrix logarithm with the
    same branch as mlog_spectral; near-confluent nodes (eigenvalues can
    only collide at +-i here) fall back to the scalar path.
    """
    tr_half = 0.5 * (mats[:, 0, 0] + mats[:, 1, 1])
    disc = np.sqrt(tr_half * tr_half + 1.0)
    lam1, lam2 = tr_half + disc, tr_half - disc
    eye = np.eye(2)
    l1, l2 = _blog(lam1), _blog(lam2)
    gap = lam1 - lam2
    ok = np.abs(gap) > 1e-6 * (np.abs(lam1) + np.abs(lam2))
    gap_safe = np.where(ok, gap, 1.0)
    logm = (l1[:, None, None] * (mats - lam2[:, None, None] * eye)
            - l2[:, None, None] * (mats - lam1[:, None, None] * eye)) \
        / gap_safe[:, None, None]
    out = logm.imag / np.pi - 0.5 * eye
    for i in np.nonzero(~ok)[0]:
        out[i] = im_part(mlog_spectral(mats[i])) / np.pi - 0.5 * eye
    return out


def _trace_w(mats: np.ndarray, wts: np.ndarray) -> tuple[float, float]:
    """(p, q) by the trace formula: integrate xi_x(t) - I/2 over the gaps,
    reading the shifted Krein density off the gap boundary matrices."""
    acc = np.einsum("n,nij->ij", wts, _xi_defect(mats))
    return 0.5 * (acc[0, 0] - acc[1, 1]), 0.5 * (acc[0, 1] + acc[1, 0])


def _pin(mats: np.ndarray) -> np.ndarray:
    # project back onto the symmetric det = -1 slice (rounding control)
    mats = 0.5 * (mats + np.transpose(mats, (0, 2, 1)))
    dets = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return mats / np.sqrt(-dets)[:, None, None]


def _congruence_step(mats: np.ndarray, ts: np.ndarray, p: float, q: float,
                     h: float) -> np.ndarray:
    """Advance gap boundary values by M(t) <- T M(t) T^t with the
    frozen-coefficient propagator T = exp(h K(p, q, t)) per node.

    K(p, q, t) is real for real t with K^2 = (p^2 + q^2 - t^2) I, so T has
    the closed form cosh(kappa h) I + sinh(kappa h)/kappa K, hyperbolic or
    rotational depending on the sign of kappa^2."""
    kap = np.sqrt((p * p + q * q - ts * ts).astype(complex))
    th = kap * h
    ch = np.cosh(th).real
    small = np.abs(th) < 1e-8
    safe = np.where(small, 1.0, kap)
    sh = np.where(small, h * (1.0 + th * th / 6.0), np.sinh(th) / safe).real
    T = np.empty((len(ts), 2, 2))
    T[:, 0, 0] = ch - sh * q
    T[:, 0, 1] = sh * (p - ts)
    T[:, 1, 0] = sh * (p + ts)
    T[:, 1, 1] = ch + sh * q
    return _pin(np.einsum("nij,njk,nlk->nil", T, mats, T))


def sample_potential(profile: KreinProfile, xgrid, ygrid=None,
                     loc_tol: float = 1e-8, bound_slack: float = 1e-4,
                     quad_nodes: int = 20) -> list[PotentialSample]:
    """Sample the potential W(x) along the shift orbit of a Krein profile.

    The shifted operator is reflectionless on the same bands, so its
    Herglotz matrix has gap boundary values M_x(t) = T(0->x, t) M_0(t)
    T(0->x, t)^t with the (real, unimodular) transfer matrices of the
    potential itself, and W(x) follows from the trace formula at the
    shifted origin, W(x) = integral over the gaps of (xi_x(t) - I/2) dt.
    The march freezes (p, q) per substep with a midpoint corrector,
    controls the local error by step doubling, and applies one Richardson
    sweep to the boundary matrices.  Every node evolves at a bounded rate
    (at most ||W||), unlike the Weyl trajectories m_pm(x, iY), which repel
    perturbations at rate 2Y and cannot carry a forward march; the Weyl
    asymptotics instead cross-check the x = 0 sample.

    Parameters
    ----------
    profile : KreinProfile
    xgrid : array_like
        Increasing sample positions starting at 0.
    ygrid : array_like, optional
        Heights for the x = 0 Weyl-law cross-check; defaults to
        (8, ..., 128) times the spectral scale.
    loc_tol : float
        Local error target per march substep.
    bound_slack : float
        Slack over the sharp bound before BoundViolation is raised.
    quad_nodes : int
        Gauss-Legendre nodes per gap for the trace formula; a coarser
        companion grid rides along to expose the quadrature error.

    Returns
    -------
    list of PotentialSample
        One sample per grid point, residuals included.

    Raises
    ------
    BoundViolation
        If any sampled ||W(x)|| exceeds sharp_bound + bound_slack.  For a
        profile whose constructed M function is a genuine matrix Herglotz
        function (every aligned profile is, by the explicit realization),
        the sharp bound holds along the whole orbit and this is never
        raised.  Profiles with mismatched gap projections yield formal M
        functions that need not be Herglotz; their orbits can cross the
        bound, and the exception then certifies non-realizability (check
        herglotz_defect for an independent witness).  Never ignored.
    NoConvergence
        If the step size underflows before reaching the next grid point.

    Both exceptions carry the grid samples accepted before the failure in
    their ``samples`` attribute.
    """
    xg = np.asarray(xgrid, dtype=float)
    if xg.ndim != 1 or len(xg) == 0 or xg[0] != 0.0 or np.any(np.diff(xg) <= 0):
        raise ValueError("xgrid must be increasing and start at 0")
    gs = profile.gapset
    if gs.n == 0:
        return [PotentialSample(x=float(x), p=0.0, q=0.0, residual=0.0)
                for x in xg]

    ts_f, ws_f = _gap_nodes(gs, quad_nodes)
    ts_c, ws_c = _gap_nodes(gs, max(4, (7 * quad_nodes) // 10))
    nf = len(ts_f)
    ts = np.concatenate([ts_f, ts_c])
    mats = _pin(np.stack([build_M(profile, t) for t in ts]))
    bound = sharp_bound(gs)

    def w_of(mats):
        pf, qf = _trace_w(mats[:nf], ws_f)
        pc, qc = _trace_w(mats[nf:], ws_c)
        return pf, qf, math.hypot(pf - pc, qf - qc)

    def record(x, p, q, residual):
        sample = PotentialSample(x=float(x), p=p, q=q, residual=residual)
        if sample.norm > bound + bound_slack:
            raise BoundViolation(
                f"||W({x:.6g})|| = {sample.norm:.8f} exceeds the sharp bound "
                f"{bound:.8f} + {bound_slack:g}")
        return sample

    def pc_step(mats, p0, q0, span):
        # frozen-coefficient midpoint predictor-corrector
        half = _congruence_step(mats, ts, p0, q0, 0.5 * span)
        pm, qm, _ = w_of(half)
        return _congruence_step(mats, ts, pm, qm, span)

    p0, q0, quad_res = w_of(mats)
    # independent seed check: the large-z Weyl law against the trace formula
    seed = asymptotic_W(profile_m_function(profile), ygrid)
    seed_res = seed.residual + math.hypot(seed.p - p0, seed.q - q0)
    samples: list[PotentialSample] = []
    try:
        samples.append(record(xg[0], p0, q0, quad_res + seed_res))
        for x_next in xg[1:]:
            x = samples[-1].x
            h = x_next - x
            while x < x_next - 1e-13 * max(1.0, abs(x_next)):
                h = min(h, x_next - x)
                p0, q0, _ = w_of(mats)
                coarse = pc_step(mats, p0, q0, h)
                mid = pc_step(mats, p0, q0, 0.5 * h)
                pm, qm, _ = w_of(mid)
                fine = pc_step(mid, pm, qm, 0.5 * h)
                pa, qa, _ = w_of(coarse)
                pb, qb, _ = w_of(fine)
                err = math.hypot(pa - pb, qa - qb)
                if err <= loc_tol:
                    # the midpoint scheme is second order, so the coarse/fine
                    # pair admits one Richardson sweep on the states
                    mats = _pin((4.0 * fine - coarse) / 3.0)
                    x += h
                    if err:
                        h *= min(3.0, max(1.0, 0.9 * (loc_tol / err) ** (1 / 3)))
                    else:
                        h *= 3.0
                    # interior acceptances also face the bound check
                    pb, qb, res_b = w_of(mats)
                    record(x, pb, qb, res_b)
                else:
                    h *= max(0.25, 0.9 * (loc_tol / err) ** (1 / 3))
                    if h < 1e-10 * max(x_next, 1.0):
                        raise NoConvergence(f"x-march stalled near x = {x}")
            p, q, residual = w_of(mats)
            samples.append(record(x_next, p, q, residual))
    except (BoundViolation, NoConvergence) as exc:
        # grid points accepted before the failure ride along so callers
        # can report the last good x next to the certificate
        exc.samples = samples
        raise
    return samples
