"""Finite-gap sets, Krein profiles and the explicit extremal construction.

A finite-gap set is E = R minus a union of n open gaps (a_j, b_j).  A Krein
profile assigns to each gap a rank-one orthogonal projection P(alpha_j)
(piecewise-constant mode) or a projection-valued function of t (sampled
mode); together with the density I/2 on E this is the boundary data of a
matrix Herglotz function

    log M(z) = (i pi / 2) I + sum_j log((b_j - z)/(a_j - z)) (P_j - I/2),

which is symmetric, has det M = -1, positive imaginary part on the upper
half plane, and purely imaginary boundary values on E (the reflectionless
property).  The module also provides the inverse dictionary between M and
the half-line Weyl functions m_plus/m_minus, the trace formula for the
potential at the origin, and the sharp bound ||W|| <= (1/2) sum (b_j - a_j)
together with the convex-hull estimate behind its strictness analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateEigenproblem,
    EndpointSingularity,
    NotAdmissible,
    NotPiecewiseConstant,
    NotUniform,
    PoleAt,
)
from .mat2 import I2, J, as_mat2, eig2, im_part, mexp, op_norm_sym, re_part
from .numerics import LimitSchedule, adaptive_gauss_legendre, extrapolate_schedule

__all__ = [
    "ENDPOINT_MARGIN",
    "GapSet",
    "KreinProfile",
    "WeylPair",
    "PotentialSample",
    "projection_angle",
    "profile_from_json",
    "profile_to_json",
    "build_logM",
    "eigen_lambda",
    "build_M",
    "weyl_from_M",
    "assemble_M",
    "trace_formula_W0",
    "sharp_bound",
    "reflectionless_defect",
    "gap_realness",
    "commutator_diag",
    "hull_norm",
    "gap_interior_grid",
    "e_interior_grid",
]

# Relative exclusion zone around gap endpoints: evaluations of boundary
# objects stay at least ENDPOINT_MARGIN * (gap width) away from the
# logarithmic singularities.
ENDPOINT_MARGIN = 1e-3


def projection_angle(alpha: float) -> np.ndarray:
    """Rank-one orthogonal projection onto span{(cos alpha, sin alpha)}."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c * c, s * c], [s * c, s * s]], dtype=complex)


@dataclass(frozen=True)
class GapSet:
    """Ordered disjoint open gaps (a_1, b_1), ..., (a_n, b_n), possibly none."""

    gaps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        norm = tuple((float(a), float(b)) for a, b in self.gaps)
        for a, b in norm:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"gap ({a}, {b}) is not a bounded open interval")
        for (_, b), (a2, _) in zip(norm, norm[1:]):
            if not b < a2:
                raise ValueError("gaps must be strictly increasing and disjoint")
        object.__setattr__(self, "gaps", norm)

    @property
    def n(self) -> int:
        return len(self.gaps)

    def widths(self) -> np.ndarray:
        return np.array([b - a for a, b in self.gaps], dtype=float)

    @property
    def spectral_radius(self) -> float:
        """Largest |endpoint|, 0 for the gapless set."""
        if not self.gaps:
            return 0.0
        return max(abs(self.gaps[0][0]), abs(self.gaps[-1][1]))

    def margin(self, j: int) -> float:
        a, b = self.gaps[j]
        return ENDPOINT_MARGIN * (b - a)

    def containing_gap(self, t: float) -> int | None:
        """Index of the open gap containing t, or None (t in E)."""
        for j, (a, b) in enumerate(self.gaps):
            if a < t < b:
                return j
        return None

    def assert_off_endpoints(self, t: float) -> None:
        """Reject real evaluation points inside an endpoint exclusion zone."""
        for j, (a, b) in enumerate(self.gaps):
            m = self.margin(j)
            if abs(t - a) < m or abs(t - b) < m:
                raise EndpointSingularity(
                    f"t = {t} is within the exclusion margin of gap ({a}, {b})")


def _circular_angle(alpha: float) -> float:
    # Projection angles live on R / pi Z.
    a = math.fmod(float(alpha), math.pi)
    return a + math.pi if a < 0 else a


def _angle_distance(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


@dataclass(frozen=True)
class KreinProfile:
    """Boundary data on a gap set: one projection direction per gap.

    ``angles`` holds one entry per gap, either all floats (piecewise-constant
    mode; normalized into [0, pi)) or all callables t -> angle (sampled
    mode).  The gapless profile (n = 0) is admissible and describes the free
    function M = i I.
    """

    gapset: GapSet
    angles: tuple = field(default=())

    def __post_init__(self):
        angles = tuple(self.angles)
        if len(angles) != self.gapset.n:
            raise ValueError(f"expected {self.gapset.n} angles, got {len(angles)}")
        kinds = {callable(a) for a in angles}
        if len(kinds) > 1:
            raise ValueError("angles must be all numbers or all callables")
        if angles and not callable(angles[0]):
            angles = tuple(_circular_angle(a) for a in angles)
        object.__setattr__(self, "angles", angles)

    @classmethod
    def uniform(cls, gapset: GapSet, alpha: float) -> "KreinProfile":
        return cls(gapset, (float(alpha),) * gapset.n)

    @property
    def is_piecewise_constant(self) -> bool:
        return not (self.angles and callable(self.angles[0]))

    @property
    def is_uniform(self) -> bool:
        """True if all gaps share one projection direction (mod pi)."""
        if not self.is_piecewise_constant:
            return False
        if self.gapset.n <= 1:
            return True
        return all(_angle_distance(a, self.angles[0]) <= 1e-12 for a in self.angles[1:])

    def angle_at(self, j: int, t: float | None = None) -> float:
        a = self.angles[j]
        return float(a(t)) if callable(a) else a

    def projection(self, j: int, t: float | None = None) -> np.ndarray:
        return projection_angle(self.angle_at(j, t))


def profile_from_json(obj: dict) -> KreinProfile:
    """Build a profile from the JSON form {"gaps": [[a, b], ...], "angles": [...]}.

    A common angle may be given as {"uniform": alpha} instead of "angles".
    Angles are radians.
    """
    if not isinstance(obj, dict) or "gaps" not in obj:
        raise ValueError('profile JSON must be an object with a "gaps" list')
    gapset = GapSet(tuple((float(a), float(b)) for a, b in obj["gaps"]))
    if "uniform" in obj:
        if "angles" in obj:
            raise ValueError('give either "angles" or "uniform", not both')
        return KreinProfile.uniform(gapset, float(obj["uniform"]))
    angles = obj.get("angles", ())
    return KreinProfile(gapset, tuple(float(a) for a in angles))


def profile_to_json(profile: KreinProfile) -> dict:
    if not profile.is_piecewise_constant:
        raise NotPiecewiseConstant("sampled profiles have no JSON form")
    out: dict = {"gaps": [[a, b] for a, b in profile.gapset.gaps]}
    if profile.gapset.n and profile.is_uniform:
        out["uniform"] = profile.angles[0]
    else:
        out["angles"] = list(profile.angles)
    return out


def _gap_logs(gapset: GapSet, z: complex) -> list[complex]:
    """Per-gap values of log((b - z)/(a - z)) with the upper-boundary branch.

    For Im z > 0 the Moebius factor lies in the upper half plane and the
    principal logarithm applies.  For real z the limit from above is taken:
    inside the own gap the ratio is negative and picks up +i pi, from E the
    ratio is positive and the logarithm is real.  Real points inside an
    endpoint exclusion zone raise EndpointSingularity.
    """
    z = complex(z)
    if z.imag < 0:
        raise ValueError("evaluation is defined on the closed upper half plane only")
    logs: list[complex] = []
    if z.imag > 0:
        for a, b in gapset.gaps:
            logs.append(complex(np.log((b - z) / (a - z))))
        return logs
    t = z.real
    gapset.assert_off_endpoints(t)
    for a, b in gapset.gaps:
        if a < t < b:
            logs.append(complex(math.log((b - t) / (t - a)), math.pi))
        else:
            logs.append(complex(math.log((b - t) / (a - t))))
    return logs


def build_logM(profile: KreinProfile, z: complex) -> np.ndarray:
    """Logarithm of the constructed Herglotz function at z.

        log M(z) = (i pi / 2) I + sum_j log((b_j - z)/(a_j - z)) (P_j - I/2)

    Defined for Im z >= 0; real z are evaluated as limits from above
    (inside gaps this is the analytic continuation through the gap, on the
    interior of E it is the purely-imaginary reflectionless boundary value).
    Piecewise-constant profiles only.
    """
    if not profile.is_piecewise_constant:
        raise NotPiecewiseConstant("closed form needs per-gap constant angles")
    total = 0.5j * math.pi * I2.copy()
    for j, lg in enumerate(_gap_logs(profile.gapset, z)):
        total = total + lg * (profile.projection(j) - 0.5 * I2)
    return total


def eigen_lambda(profile: KreinProfile, z: complex) -> tuple[complex, complex]:
    """Eigenvalues of log M(z) for a uniform profile.

    With S(z) = sum_j log((b_j - z)/(a_j - z)) these are
    lambda_plus/minus = i pi/2 +/- S(z)/2; lambda_plus belongs to the
    eigenvector (cos alpha, sin alpha).  In a gap interior Im lambda_plus = pi
    and Im lambda_minus = 0, as z -> infinity both tend to i pi/2.
    """
    if not (profile.is_piecewise_constant and profile.is_uniform):
        raise NotUniform("eigenvalue formula requires one common angle")
    s = sum(_gap_logs(profile.gapset, z))
    return 0.5j * math.pi + 0.5 * s, 0.5j * math.pi - 0.5 * s


def build_M(profile: KreinProfile, z: complex) -> np.ndarray:
    """The constructed matrix Herglotz function M(z) = exp(build_logM(z))."""
    return mexp(build_logM(profile, z))


@dataclass(frozen=True)
class WeylPair:
    """Half-line Weyl functions (m_plus, m_minus) at one point z.

    Values live on the Riemann sphere: ``complex(inf)`` encodes the point at
    infinity of the solution-ratio coordinate.
    """

    m_plus: complex
    m_minus: complex


def weyl_from_M(m) -> WeylPair:
    """Recover the Weyl pair from M via the eigenvectors of M J.

    M J has eigenvalues -1 and +1; the eigenvector (v1, v2) for -1 is
    proportional to (m_plus, 1) and the one for +1 to (-m_minus, 1).
    Requires M symmetric with det M = -1 (within 1e-8).
    """
    M = as_mat2(m)
    scale = max(np.linalg.norm(M, 2), 1.0)
    if abs(M[0, 1] - M[1, 0]) > 1e-8 * scale:
        raise NotAdmissible("M must be symmetric")
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det + 1.0) > 1e-8 * scale * scale:
        raise NotAdmissible(f"det M = {det}, expected -1")
    dec = eig2(M @ J)
    if dec.is_jordan:
        raise DegenerateEigenproblem("M J is numerically defective")
    pairs = sorted([(dec.lam1, dec.basis[:, 0]), (dec.lam2, dec.basis[:, 1])],
                   key=lambda lv: lv[0].real)
    (lam_m, v_m), (lam_p, v_p) = pairs
    if abs(lam_m + 1.0) > 1e-6 or abs(lam_p - 1.0) > 1e-6:
        raise NotAdmissible(f"eigenvalues of M J are {lam_m}, {lam_p}, expected -1, +1")

    def ratio(v, sign):
        if abs(v[1]) <= 1e-14 * abs(v[0]):
            return complex(np.inf)
        return sign * complex(v[0] / v[1])

    return WeylPair(m_plus=ratio(v_m, +1.0), m_minus=ratio(v_p, -1.0))


def assemble_M(pair: WeylPair) -> np.ndarray:
    """Assemble M from a Weyl pair.

        M = -1/(m_plus + m_minus) [[-2 m_plus m_minus, m_plus - m_minus],
                                   [m_plus - m_minus,  2]]

    Infinite entries of the pair are handled as Riemann-sphere limits; a
    vanishing denominator m_plus + m_minus raises PoleAt.
    """
    mp, mm = complex(pair.m_plus), complex(pair.m_minus)
    p_inf, m_inf = not np.isfinite(mp), not np.isfinite(mm)
    if p_inf and m_inf:
        raise PoleAt(None, "both Weyl functions are infinite")
    if p_inf:
        return np.array([[2.0 * mm, -1.0], [-1.0, 0.0]], dtype=complex)
    if m_inf:
        return np.array([[2.0 * mp, 1.0], [1.0, 0.0]], dtype=complex)
    den = mp + mm
    if abs(den) <= 1e-12 * max(1.0, abs(mp), abs(mm)):
        raise PoleAt(None, f"m_plus + m_minus = {den} vanishes")
    return (-1.0 / den) * np.array([[-2.0 * mp * mm, mp - mm], [mp - mm, 2.0]],
                                   dtype=complex)


@dataclass(frozen=True)
class PotentialSample:
    """Trace-zero symmetric potential value W(x) = [[p, q], [q, -p]]."""

    x: float
    p: float
    q: float
    residual: float = 0.0

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, self.q], [self.q, -self.p]], dtype=complex)

    @property
    def norm(self) -> float:
        return op_norm_sym(self.p, self.q)


def trace_formula_W0(profile: KreinProfile) -> PotentialSample:
    """Potential at the origin from the Krein density:

        W(0) = sum_j int_{a_j}^{b_j} (xi(t) - I/2) dt.

    Piecewise-constant profiles admit the closed form
    sum_j (b_j - a_j)(P_j - I/2); sampled profiles are integrated by
    Gauss-Legendre panels.
    """
    total = np.zeros((2, 2), dtype=complex)
    for j, (a, b) in enumerate(profile.gapset.gaps):
        if profile.is_piecewise_constant:
            total += (b - a) * (profile.projection(j) - 0.5 * I2)
        else:
            total += adaptive_gauss_legendre(
                lambda t, j=j: profile.projection(j, t) - 0.5 * I2, a, b)
    drift = max(abs(total[0, 0] + total[1, 1]), abs(total[0, 1] - total[1, 0]),
                float(np.max(np.abs(total.imag))))
    return PotentialSample(x=0.0, p=float(total[0, 0].real),
                           q=float(total[0, 1].real), residual=float(drift))


def sharp_bound(gapset: GapSet) -> float:
    """The sharp potential bound (1/2) sum_j (b_j - a_j)."""
    return 0.5 * float(np.sum(gapset.widths()))


def reflectionless_defect(mfun, gapset: GapSet, grid: Sequence[float],
                          schedule: LimitSchedule | None = None) -> float:
    """sup over the grid of || Re M(t + i0) || on the interior of E.

    Each grid point must lie in E beyond the endpoint margins; the boundary
    value is reached through the limit schedule (geometric offsets plus
    polynomial extrapolation).  Vanishes for reflectionless functions.
    """
    schedule = schedule or LimitSchedule()
    worst = 0.0
    for t in grid:
        t = float(t)
        if gapset.containing_gap(t) is not None:
            raise ValueError(f"grid point {t} lies inside a gap, not in E")
        gapset.assert_off_endpoints(t)
        samples = [re_part(mfun(t + 1j * y)) for y in schedule.offsets()]
        limit, _ = extrapolate_schedule(schedule.offsets(), samples, schedule.order)
        worst = max(worst, float(np.linalg.norm(limit, 2)))
    return worst


def gap_realness(profile: KreinProfile, grid: Sequence[float] | None = None) -> float:
    """sup over gap-interior points of || Im M(t) || (continuation from above).

    Vanishes (to rounding) for uniform profiles, where M continues to a
    real symmetric matrix across every gap; for non-uniform profiles the
    returned value is a diagnostic with no smallness guarantee.
    """
    if grid is None:
        grid = gap_interior_grid(profile.gapset)
    worst = 0.0
    for t in grid:
        t = float(t)
        if profile.gapset.containing_gap(t) is None:
            raise ValueError(f"grid point {t} is not inside a gap")
        worst = max(worst, float(np.linalg.norm(im_part(build_M(profile, t)), 2)))
    return worst


def commutator_diag(profile: KreinProfile, t: float) -> float:
    """|| [Re log M(t), xi(t)] || at a gap-interior point t.

    For a uniform profile every Re log M(t) commutes with the common
    projection, so the value vanishes; a nonzero value witnesses angle
    mismatch between gaps.  Returns 0 for the gapless profile.
    """
    if profile.gapset.n == 0:
        return 0.0
    j = profile.gapset.containing_gap(float(t))
    if j is None:
        raise ValueError(f"t = {t} is not inside a gap")
    xi = profile.projection(j, float(t))
    re_log = re_part(build_logM(profile, float(t)))
    comm = re_log @ xi - xi @ re_log
    return float(np.linalg.norm(comm, 2))


def hull_norm(q) -> float:
    """|| Q - I/2 || for Q in the closed convex hull of the projections P(alpha).

    The hull is the set of real symmetric matrices with trace 1 and
    eigenvalues in [0, 1]; on it the returned norm is at most 1/2, with
    equality exactly at the projections themselves.
    """
    Q = as_mat2(q)
    if float(np.max(np.abs(Q.imag))) > 1e-10 or abs(Q[0, 1] - Q[1, 0]) > 1e-10:
        raise NotAdmissible("Q must be real symmetric")
    if abs(Q[0, 0].real + Q[1, 1].real - 1.0) > 1e-10:
        raise NotAdmissible("Q must have trace 1")
    eigs = np.linalg.eigvalsh(Q.real)
    if eigs[0] < -1e-9 or eigs[1] > 1.0 + 1e-9:
        raise NotAdmissible("Q must have eigenvalues in [0, 1]")
    return float(np.hypot(Q[0, 0].real - 0.5, Q[0, 1].real))


def gap_interior_grid(gapset: GapSet, per_gap: int = 7, inset: float = 0.05) -> np.ndarray:
    """Evaluation points strictly inside each gap, clear of the margins."""
    pts: list[float] = []
    for a, b in gapset.gaps:
        w = b - a
        pts.extend(a + w * np.linspace(inset, 1.0 - inset, per_gap))
    return np.array(pts)


def e_interior_grid(gapset: GapSet, per_region: int = 3, pad: float = 1.0) -> np.ndarray:
    """Evaluation points in the interior of E, clear of the margins.

    Covers the two unbounded components and every bounded band between
    consecutive gaps.
    """
    if gapset.n == 0:
        return np.array([-1.0, 0.0, 1.0])
    a1 = gapset.gaps[0][0]
    bn = gapset.gaps[-1][1]
    scale = max(1.0, gapset.spectral_radius)
    pts = list(a1 - pad * scale * np.linspace(0.3, 1.2, per_region))
    pts.extend(bn + pad * scale * np.linspace(0.3, 1.2, per_region))
    for (_, b), (a2, _) in zip(gapset.gaps, gapset.gaps[1:]):
        width = a2 - b
        lo = b + 0.1 * width
        hi = a2 - 0.1 * width
        pts.extend(np.linspace(lo, hi, per_region))
    return np.array(sorted(pts))
