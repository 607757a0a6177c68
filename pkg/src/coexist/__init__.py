"""Positive periodic solutions of coupled Hill systems via cone compression and expansion.

Typical use::

    from coexist import load_problem, find_radii, solve_fixed_point
    pf = load_problem("problems/sublinear_superlinear.json")
    cert = find_radii(pf.problem)
    result = solve_fixed_point(pf.problem, cert.shell)
"""
__version__ = "0.1.0"

from .cone import (
    COMPRESSIVE,
    EXPANSIVE,
    ConeSpec,
    OperatorHandle,
    RetractionConfig,
    ShellBounds,
    extend_operator,
    retract,
    star_factor,
    star_transform,
    unstar_fixed_point,
)
from .errors import (
    CoexistError,
    ConfigurationError,
    IndexMismatchError,
    InputError,
    InvariantViolation,
    MixedSignError,
    NoConvergenceError,
    NotFoundError,
    ResonanceError,
)
from .expr import Expression
from .green import FundamentalPair, GreenKernel, HillCoefficient, build_green, integrate_hill
from .hammerstein import (
    Nonlinearity,
    ProblemSpec,
    SingularForm,
    SolveResult,
    SolverConfig,
    assemble,
    solve_fixed_point,
)
from .kernels import BACKEND
from .problem_io import ProblemFile
from .problem_io import load as load_problem
from .shells import RadiusCertificate, find_radii, verify_radii

__all__ = [
    "BACKEND", "COMPRESSIVE", "EXPANSIVE", "CoexistError", "ConeSpec", "ConfigurationError",
    "Expression", "FundamentalPair", "GreenKernel", "HillCoefficient", "IndexMismatchError",
    "InputError", "InvariantViolation", "MixedSignError", "NoConvergenceError", "Nonlinearity",
    "NotFoundError", "OperatorHandle", "ProblemFile", "ProblemSpec", "RadiusCertificate",
    "ResonanceError", "RetractionConfig", "ShellBounds", "SingularForm", "SolveResult",
    "SolverConfig", "assemble", "build_green", "extend_operator", "find_radii",
    "integrate_hill", "load_problem", "retract", "solve_fixed_point", "star_factor",
    "star_transform", "unstar_fixed_point", "verify_radii",
]
