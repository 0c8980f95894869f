"""Numerics for fractional g-Laplacians on Orlicz-Sobolev spaces.

The package evaluates the nonlocal operator

    (-Delta_g)^s u(x) = P.V. int g((u(x) - u(y)) / |x - y|^s) dy / |x - y|^(n + s)

for Young functions ``G`` with ``g = G'``, together with the Orlicz modulars,
Luxemburg norms, infimal convolutions and the weak / viscosity checkers built
on top of them.  Quadrature is one dimensional.
"""

from .errors import (
    BracketError,
    DiagonalDivergence,
    InsufficientDecades,
    MaxIterations,
    NonFinite,
    NonMonotoneSource,
    NotConverged,
    OrliczFracError,
    SchemaError,
    SingularityAtCriticalPoint,
    TailDivergence,
    TouchViolation,
    ValidationError,
    WindowClipped,
)
from .reports import CheckReport
from .young import (
    ComplementaryValue,
    YoungFunction,
    complementary,
    complementary_inverse,
    inequality_suite,
    make_young,
)
from .sampled import SampledFunction, TailModel, closed_form, from_grid, generators
from .orlicz import Domain1D, lg_membership, luxemburg_norm, modular_G, modular_sG, sandwich_report
from .fracop import (
    DecayProbe,
    PVResult,
    QuadratureConfig,
    eval_g_gradient,
    eval_pv_glaplacian,
    eval_pv_regularized,
    inner_decay_probe,
    tail_envelope,
)
from .infconv import InfConvParams, InfConvResult, choose_q, inf_convolve, propinfconv_report
from .solutions import (
    SourceFunction,
    TestFunction,
    bump_basis,
    caccioppoli_report,
    f_epsilon,
    viscosity_point_check,
    weak_form_pair,
    weak_supersolution_report,
)
from .dirichlet import DirichletProblem, DirichletSolution, assemble, solve_dirichlet

__version__ = "0.1.0"
