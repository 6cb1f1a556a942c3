"""Matrix valued Herglotz and Krein functions of reflectionless Dirac
operators on finite-gap sets.

The package builds the explicit extremal M functions attached to a gap set
with per-gap projection data, extracts Krein densities and potentials from
them, cross-checks everything against closed-form and ODE oracles for Dirac
systems, and exposes the sharp potential bound together with its
equality/strictness diagnostics.
"""

from . import errors
from .mat2 import (
    J,
    I2,
    EigenDecomp2,
    as_mat2,
    mat2,
    eig2,
    branch_log,
    mexp,
    mlog_spectral,
    mlog_integral,
    herglotz_positive,
    op_norm_sym,
)
from .numerics import LimitSchedule
from .finitegap import (
    GapSet,
    KreinProfile,
    WeylPair,
    PotentialSample,
    projection_angle,
    profile_from_json,
    profile_to_json,
    build_logM,
    eigen_lambda,
    build_M,
    weyl_from_M,
    assemble_M,
    trace_formula_W0,
    sharp_bound,
    reflectionless_defect,
    gap_realness,
    commutator_diag,
    hull_norm,
)
from .herglotz import MFunction, KreinSample, profile_m_function, krein_xi, rep_logM, asymptotic_W, herglotz_defect
from .dirac import (
    StepPotential,
    transfer,
    const_weyl,
    ode_weyl,
    ode_m_function,
    riccati_rhs,
    riccati_step,
    sample_potential,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "J",
    "I2",
    "EigenDecomp2",
    "as_mat2",
    "mat2",
    "eig2",
    "branch_log",
    "mexp",
    "mlog_spectral",
    "mlog_integral",
    "herglotz_positive",
    "op_norm_sym",
    "LimitSchedule",
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
    "MFunction",
    "KreinSample",
    "profile_m_function",
    "krein_xi",
    "rep_logM",
    "asymptotic_W",
    "herglotz_defect",
    "StepPotential",
    "transfer",
    "const_weyl",
    "ode_weyl",
    "ode_m_function",
    "riccati_rhs",
    "riccati_step",
    "sample_potential",
    "__version__",
]
