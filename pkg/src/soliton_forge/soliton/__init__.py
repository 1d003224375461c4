"""Soliton residuals, identity catalog, torse-forming checks and classification."""

from .classify import ClassificationReport, Verdict, classify_vector_field
from .context import SolitonInput, SolitonPoint, context
from .identities import (
    constant_length_ingredient,
    curvature_identity_suite,
    gradient_identity_suite,
    ric_norm_identity,
    solenoidal_suite,
)
from .report import DEFAULT_TOL, CheckReport, CheckResult, Checker
from .residuals import (
    LambdaRecovery,
    recover_lambda,
    recover_lambda_ricci,
    recover_lambda_riemann,
    residual_contracted,
    residual_ricci,
    residual_riemann,
    soliton_residual_suite,
)
from .torse import (
    TorseFormingData,
    conharmonic_criterion,
    jacobi_condition,
    nabla_ric_conditions,
    torse_forming_decomposition,
    torse_forming_suite,
)

__all__ = [
    "CheckReport",
    "CheckResult",
    "Checker",
    "ClassificationReport",
    "DEFAULT_TOL",
    "LambdaRecovery",
    "SolitonInput",
    "SolitonPoint",
    "TorseFormingData",
    "Verdict",
    "classify_vector_field",
    "conharmonic_criterion",
    "constant_length_ingredient",
    "context",
    "curvature_identity_suite",
    "gradient_identity_suite",
    "jacobi_condition",
    "nabla_ric_conditions",
    "recover_lambda",
    "recover_lambda_ricci",
    "recover_lambda_riemann",
    "residual_contracted",
    "residual_ricci",
    "residual_riemann",
    "ric_norm_identity",
    "solenoidal_suite",
    "soliton_residual_suite",
    "torse_forming_decomposition",
    "torse_forming_suite",
]
