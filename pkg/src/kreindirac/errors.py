"""Exception taxonomy shared across the package.

Numerical failures are signalled with dedicated exception types so that
callers (and the command line driver) can distinguish "the input is outside
the contract" from "the algorithm did not converge" from "a mathematical
invariant was violated".
"""


class KreinDiracError(Exception):
    """Base class for all package specific errors."""


class SpectrumOnCut(KreinDiracError):
    """An eigenvalue lies on the excluded ray {-iy : y >= 0} of the log branch."""


class SpectrumNotUpper(KreinDiracError):
    """The integral logarithm requires all eigenvalues strictly in the upper half plane."""


class QuadratureFailure(KreinDiracError):
    """A quadrature did not reach its error target within the evaluation budget."""


class NoConvergence(KreinDiracError):
    """An extrapolation or iteration did not settle within tolerance."""


class NotTraceless(KreinDiracError):
    """An extracted potential matrix has a trace beyond tolerance."""


class EndpointSingularity(KreinDiracError):
    """Evaluation was requested too close to a gap endpoint (a logarithmic singularity)."""


class NotUniform(KreinDiracError):
    """The operation requires a profile with one common projection angle on all gaps."""


class NotPiecewiseConstant(KreinDiracError):
    """The operation requires a piecewise-constant (per-gap angle) profile."""


class DegenerateEigenproblem(KreinDiracError):
    """An eigenvector extraction hit a (near-)defective matrix."""


class DegenerateDichotomy(KreinDiracError):
    """The constant-coefficient system has no exponential dichotomy (Re lambda ~ 0)."""


class PoleAt(KreinDiracError):
    """The Weyl functions satisfy m_plus + m_minus ~ 0, a pole of the matrix function."""

    def __init__(self, z, message=None):
        self.z = z
        super().__init__(message or f"pole of M at z = {z}")


class StepRejected(KreinDiracError):
    """A single adaptive step exceeded its local error target.

    The embedded error estimate is carried in ``err`` so that drivers can
    rescale the step size.
    """

    def __init__(self, err, message=None):
        self.err = float(err)
        super().__init__(message or f"step rejected, local error estimate {err:.3e}")


class PoleCrossing(KreinDiracError):
    """A Riccati trajectory left the working chart (|m| exceeded the pole guard)."""

    def __init__(self, value, message=None):
        self.value = value
        super().__init__(message or f"trajectory escaped chart at |m| = {abs(value):.3e}")


class BoundViolation(KreinDiracError):
    """A sampled potential exceeded the sharp norm bound beyond tolerance."""


class NotAdmissible(KreinDiracError):
    """The matrix is not in the admissible class of the requested operation."""


class ConfigError(KreinDiracError):
    """A run configuration is malformed or inconsistent."""
