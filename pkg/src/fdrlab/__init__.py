"""Adaptive FDR-controlling multiple testing procedures.

Step-up/step-down engine, one-stage and plug-in adaptive procedures,
dependence-robust two-stage procedures, closed-form analytics for the
maximal-dependence model, and an equicorrelated-Gaussian Monte Carlo
harness.
"""

from .adaptive import (EstimatorSpec, estimator_bky06, estimator_br2s,
                       estimator_quantile, estimator_storey, evaluate_estimator,
                       plug_in_step_up, storey_failure_bound, threshold_aorc,
                       threshold_br1s, threshold_fdr09)
from .analytics import (MaxDepQuery, critical_mean, gaussian_upper_tail,
                        gaussian_upper_tail_inverse, lambda_bounds,
                        lemma4_lhs_exact, maxdep_fdr)
from .core import (GroundTruth, PValueVector, RejectionResult, ShapeFunction,
                   ThresholdCollection, holm, identity_shape, is_self_consistent,
                   linear_collection, lsu, lsu_oracle, sort_indices, step_down,
                   step_up)
from .dependent import (PriorDistribution, by_shape, f_kappa, f_kappa_inverse,
                        shape_from_prior, two_stage_fdr, two_stage_fwer)
from .roster import ProcedureSpec, make_procedure, maxdep_query, parse_procedure, parse_roster
from .sim import (MetricsAccumulator, ProcedureCounts, ProcedureMetrics,
                  ReplicateOutcome, SimConfig, gen_equicorrelated, monte_carlo,
                  replicate_rng, run_replicate)

__version__ = "0.1.0"

__all__ = [
    "EstimatorSpec", "GroundTruth", "MaxDepQuery", "MetricsAccumulator",
    "PValueVector", "PriorDistribution", "ProcedureCounts", "ProcedureMetrics",
    "ProcedureSpec", "RejectionResult", "ReplicateOutcome", "ShapeFunction",
    "SimConfig", "ThresholdCollection", "by_shape", "critical_mean",
    "estimator_bky06", "estimator_br2s", "estimator_quantile", "estimator_storey",
    "evaluate_estimator", "f_kappa", "f_kappa_inverse", "gaussian_upper_tail",
    "gaussian_upper_tail_inverse", "gen_equicorrelated", "holm", "identity_shape",
    "is_self_consistent", "lambda_bounds", "lemma4_lhs_exact", "linear_collection",
    "lsu", "lsu_oracle", "make_procedure", "maxdep_fdr", "maxdep_query",
    "monte_carlo", "parse_procedure", "parse_roster", "plug_in_step_up",
    "replicate_rng", "run_replicate", "shape_from_prior", "sort_indices",
    "step_down", "step_up", "storey_failure_bound", "threshold_aorc",
    "threshold_br1s", "threshold_fdr09", "two_stage_fdr", "two_stage_fwer",
]
