"""Identifiability analysis for binary factor designs.

Given a binary design matrix constraining the support of a loading matrix,
this package decides which latent factors and loadings are pinned down (up
to scale) by the data alone, recovers the identifiable factors from the
data matrix by subspace intersection, and constructs explicit alternative
factorizations witnessing every non-identifiability.
"""

from ._linalg import DEFAULT_TOL
from .counterexample import (
    AlternativeFactorization,
    a_counterexample,
    epsilon_budget,
    recomposition_error,
    theta_counterexample,
)
from .design_matrix import DesignMatrix, IdentifiabilityReport
from .factor_model import AssumptionReport, FactorModel
from .generator import (
    DecayStats,
    GeneratorSpec,
    decay_example,
    decay_stats,
    random_design,
    random_model,
)
from .oracle import a_nonidentifiability_witness, intersection_set_bruteforce
from .recovery import (
    RecoveryError,
    RecoveryResult,
    Subspace,
    column_space,
    factor_subspace,
    intersect,
    recover,
    recover_a,
    recover_theta,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "AlternativeFactorization",
    "AssumptionReport",
    "DecayStats",
    "DesignMatrix",
    "FactorModel",
    "GeneratorSpec",
    "IdentifiabilityReport",
    "RecoveryError",
    "RecoveryResult",
    "Subspace",
    "a_counterexample",
    "a_nonidentifiability_witness",
    "column_space",
    "decay_example",
    "decay_stats",
    "epsilon_budget",
    "factor_subspace",
    "intersect",
    "intersection_set_bruteforce",
    "random_design",
    "random_model",
    "recomposition_error",
    "recover",
    "recover_a",
    "recover_theta",
    "theta_counterexample",
]
