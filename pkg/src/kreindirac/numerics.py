"""Shared extrapolation and quadrature plumbing.

Boundary values on the real axis are never evaluated directly: they are
reached by sampling along a geometric schedule y_k = y0 * 2^(-k) and
extrapolating polynomially to y = 0 (the sampled quantities extend
analytically through the relevant real intervals, so low-order polynomial
extrapolation converges fast).  Large-z asymptotics use the same Neville
tableau in the variable 1/Y.  Smooth gap integrals for sampled Krein
profiles go through composite Gauss-Legendre rules with node doubling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, QuadratureFailure

__all__ = [
    "LimitSchedule",
    "neville_at_zero",
    "extrapolate_schedule",
    "adaptive_gauss_legendre",
]


@dataclass(frozen=True)
class LimitSchedule:
    """Geometric approach schedule for boundary limits.

    ``y0`` is the first offset, ``halvings`` the number of samples
    (y0, y0/2, ..., y0 * 2^(1 - halvings)) and ``order`` the polynomial
    order used for the final extrapolation window.
    """

    y0: float = 1e-2
    halvings: int = 8
    order: int = 3

    def offsets(self) -> np.ndarray:
        return self.y0 * 0.5 ** np.arange(self.halvings)


def neville_at_zero(xs, values) -> np.ndarray:
    """Value at 0 of the polynomial through (xs[i], values[i]).

    ``values`` may be scalars or arrays of a common shape; the tableau is
    carried entrywise.
    """
    xs = np.asarray(xs, dtype=float)
    tab = [np.asarray(v, dtype=complex) for v in values]
    n = len(tab)
    if n == 0 or xs.shape != (n,):
        raise ValueError("need one abscissa per value")
    for k in range(1, n):
        nxt = []
        for i in range(n - k):
            nxt.append((xs[i + k] * tab[i] - xs[i] * tab[i + 1]) / (xs[i + k] - xs[i]))
        tab = nxt
    return tab[0]


def extrapolate_schedule(xs, values, order: int):
    """Extrapolate samples along a schedule to 0 and estimate the residual.

    Uses the last ``order + 1`` samples for the returned limit.  The
    residual is the maximum entry difference against a second extrapolant:
    the preceding window of the same length when one exists, otherwise the
    order-lowered extrapolant on the same tail.  Needs ``order + 1`` samples.

    Returns
    -------
    (limit, residual)
    """
    xs = np.asarray(xs, dtype=float)
    if len(values) < order + 1:
        raise ValueError(f"need at least {order + 1} samples for order {order}")
    last = neville_at_zero(xs[-(order + 1):], values[-(order + 1):])
    if len(values) > order + 1:
        prev = neville_at_zero(xs[-(order + 2):-1], values[-(order + 2):-1])
    else:
        prev = neville_at_zero(xs[-order:], values[-order:])
    residual = float(np.max(np.abs(last - prev)))
    return last, residual


def require_convergence(residual: float, tol: float, what: str) -> None:
    """Raise NoConvergence when an extrapolation residual exceeds ``tol``."""
    if not residual <= tol:
        raise NoConvergence(f"{what}: residual {residual:.3e} exceeds {tol:.1e}")


def adaptive_gauss_legendre(f, a: float, b: float, tol: float = 1e-12,
                            max_nodes: int = 1024) -> np.ndarray:
    """Integrate a smooth (matrix-valued) function over [a, b].

    Gauss-Legendre rules with doubling node counts until two consecutive
    results agree within ``tol`` (relative to the result size).  Intended
    for analytic integrands such as sampled Krein profiles against Cauchy
    kernels with z off the interval.
    """
    prev = None
    n = 16
    while n <= max_nodes:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        acc = sum(w * np.asarray(f(ti), dtype=complex) for ti, w in zip(t, weights))
        acc = 0.5 * (b - a) * acc
        if prev is not None:
            scale = max(1.0, float(np.max(np.abs(acc))))
            if float(np.max(np.abs(acc - prev))) <= tol * scale:
                return acc
        prev = acc
        n *= 2
    raise QuadratureFailure(f"Gauss-Legendre did not stabilize below {tol:.1e} "
                            f"with {max_nodes} nodes on [{a}, {b}]")
