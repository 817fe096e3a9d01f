"""Golden ratio algorithms for equilibrium problems over boxes."""

__version__ = "0.1.0"

from .analysis import (
    RateCertificate,
    certificate_bound_M,
    contraction_gaps,
    counterexample_run,
    fit_rate,
    lyapunov_terms,
    rate_certificate,
)
from .core import (
    AffineBifunction,
    BoxSet,
    NotStronglyPseudomonotoneError,
    ProblemConstants,
    ProblemInstance,
    derive_constants,
    evaluate,
    subgradient_at_diagonal,
)
from .estimators import GoldenRatioSolver, MGRA1Solver, MGRA2Solver
from .instgen import GeneratorConfig, generate, load_instance, save_instance
from .prox import ProxConvergenceError, ProxSettings, project_box, prox_step
from .solvers import (
    PHI,
    CustomStep,
    DiminishingStep,
    FixedStep,
    SolverTrace,
    StepSizeError,
    gra_solve,
    mgra1_solve,
    mgra2_solve,
    residual,
    step_from_fraction,
)

__all__ = [
    "PHI",
    "AffineBifunction",
    "BoxSet",
    "CustomStep",
    "DiminishingStep",
    "FixedStep",
    "GeneratorConfig",
    "GoldenRatioSolver",
    "MGRA1Solver",
    "MGRA2Solver",
    "NotStronglyPseudomonotoneError",
    "ProblemConstants",
    "ProblemInstance",
    "ProxConvergenceError",
    "ProxSettings",
    "RateCertificate",
    "SolverTrace",
    "StepSizeError",
    "certificate_bound_M",
    "contraction_gaps",
    "counterexample_run",
    "derive_constants",
    "evaluate",
    "fit_rate",
    "generate",
    "gra_solve",
    "load_instance",
    "lyapunov_terms",
    "mgra1_solve",
    "mgra2_solve",
    "project_box",
    "prox_step",
    "rate_certificate",
    "residual",
    "save_instance",
    "step_from_fraction",
    "subgradient_at_diagonal",
]
