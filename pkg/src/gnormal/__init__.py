"""Numerical laboratory for one-dimensional G-normal distributions."""

from .model import (
    DegenerateGeneratorError,
    GFunction,
    Schedule,
    beta_of,
    g_eval,
    generator_at,
    sigma_of,
)
from .charfun import (
    EigenRate,
    PhiParams,
    eigen_residual,
    phi_d1,
    phi_d2,
    phi_eval,
    phi_family_eval,
    separation_gap,
)
from .solver import (
    CFLError,
    Field,
    Grid,
    InstabilityError,
    SolveConfig,
    SolveReport,
    convergence_study,
    rescale_to_canonical,
    solve,
    step_explicit,
)
from .expectation import (
    ClippedAbsSpec,
    ClippedPolySpec,
    CosineSpec,
    ExpectConfig,
    ExpectationResult,
    GaussBumpSpec,
    PhiSpec,
    TestFunctionSpec,
    candidate_normal,
    classical_expect,
    convolve_expect,
    expect,
    expect_scaled,
)
from .theorems import (
    SweepPoint,
    TheoremReport,
    check_eigen_decay,
    check_separation,
    verify_theorem1,
    verify_theorem2,
)

__version__ = "0.1.0"
