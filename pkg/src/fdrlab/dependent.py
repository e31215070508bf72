"""Dependence-robust machinery: prior-induced shape functions, the capped
first-stage estimator transform F_kappa, and two two-stage procedures.

Shape functions built as beta(r) = sum of u*nu(u) over support points
u <= r, for a prior nu on (0, infinity), keep step-up FDR control under
arbitrary dependence.  The harmonic correction beta(i) = i/(1+1/2+...+1/m)
is the classical instance (prior proportional to 1/u on {1..m}).

The two-stage procedures trade level for adaptivity:

* two_stage_fwer: first stage controls FWER at alpha0 (Holm by
  default), second stage steps up against alpha1*beta(i)/(m-|R0|).
  Total FDR <= alpha0 + alpha1 (PRDS with identity beta, or arbitrary
  dependence with a prior-induced beta).
* two_stage_fdr: first stage steps up at level alpha0, second against
  alpha1*beta(i)*F_kappa(|R0|/m)/m.  Total FDR <= alpha1 + kappa*alpha0,
  requiring alpha0 <= alpha1 so the second stage contains the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (PValueVector, ProcedureHandle, RejectionResult, ShapeFunction,
                   ThresholdCollection, as_pvalues, holm, identity_shape, step_up)

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PriorDistribution:
    """Finite discrete prior on positive support points, weights sum to 1."""

    support: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "support", tuple(float(u) for u in self.support))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.support) != len(self.weights) or not self.support:
            raise ValueError("support and weights must be non-empty and aligned")
        for u in self.support:
            if not u > 0.0:
                raise ValueError(f"support point {u!r} not strictly positive")
        for w in self.weights:
            if not w >= 0.0:
                raise ValueError(f"weight {w!r} is negative or nan")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_TOL:
            raise ValueError("weights must sum to 1 within 1e-12")


def shape_from_prior(nu: PriorDistribution, m: int) -> ShapeFunction:
    """Materialize beta(r) = sum_{u <= r} u*nu(u) on r = 0..m."""
    points = sorted(zip(nu.support, nu.weights))
    vals = []
    acc = 0.0
    j = 0
    for r in range(m + 1):
        while j < len(points) and points[j][0] <= r:
            acc += points[j][0] * points[j][1]
            j += 1
        vals.append(acc)
    return ShapeFunction(tuple(vals), kind="prior")


def by_shape(m: int) -> ShapeFunction:
    """Harmonic-sum corrected shape beta(i) = i / (1 + 1/2 + ... + 1/m).

    Equals shape_from_prior with nu(u) proportional to 1/u on {1..m}.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    h_m = sum(1.0 / j for j in range(1, m + 1))
    return ShapeFunction(tuple(i / h_m for i in range(m + 1)), kind="by")


def f_kappa(x: float, kappa: float) -> float:
    """Under-estimate of 1/pi0 from a first-stage rejection fraction x.

    F_kappa(x) = 1 for x <= 1/kappa, else 2/kappa / (1 - sqrt(1 - 4*(1-x)/kappa)).
    Non-decreasing, >= 1, continuous at the branch point; x = 1 returns
    +inf (the first stage already rejected everything).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x!r} outside [0, 1]")
    if not kappa >= 2.0:
        raise ValueError(f"kappa={kappa!r} must be >= 2")
    if x <= 1.0 / kappa:
        return 1.0
    # clamp absorbs representation error at the branch point
    radicand = min(max(1.0 - 4.0 * (1.0 - x) / kappa, 0.0), 1.0)
    denom = 1.0 - math.sqrt(radicand)
    if denom == 0.0:
        return math.inf
    return (2.0 / kappa) / denom


def f_kappa_inverse(t: float, kappa: float) -> float:
    """Generalized inverse of F_kappa on t >= 1: (1/kappa)/t^2 - 1/t + 1.

    Satisfies F_kappa(x) > t if and only if x > f_kappa_inverse(t).
    """
    if not t >= 1.0:
        raise ValueError(f"t={t!r} must be >= 1")
    if not kappa >= 2.0:
        raise ValueError(f"kappa={kappa!r} must be >= 2")
    return 1.0 / (kappa * t * t) - 1.0 / t + 1.0


def _check_level(alpha: float, name: str) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"{name}={alpha!r} outside (0, 1)")


def _scaled_collection(beta: ShapeFunction, factor: float) -> ThresholdCollection:
    if math.isinf(factor):
        return ThresholdCollection((0.0,) + (math.inf,) * beta.m)
    return ThresholdCollection(tuple(factor * beta[i] for i in range(beta.m + 1)))


def two_stage_fwer(p: PValueVector | Sequence[float], alpha0: float, alpha1: float,
                   beta: ShapeFunction | None = None,
                   first_stage: ProcedureHandle | None = None) -> RejectionResult:
    """FWER-first two-stage: step-up against alpha1*beta(i)/(m-|R0|).

    The first stage must control FWER at alpha0 (Holm's step-down by
    default; supplying a handle that does not is the caller's risk, and
    it must be non-increasing for the guarantee to hold).  If the first
    stage rejects everything the second stage does too.  The implicit
    estimator m/(m-|R0|) is recorded on the result.
    """
    p = as_pvalues(p)
    _check_level(alpha0, "alpha0")
    _check_level(alpha1, "alpha1")
    if beta is None:
        beta = identity_shape(p.m)
    if beta.m != p.m:
        raise ValueError(f"shape function is for m={beta.m}, p-values have m={p.m}")
    if first_stage is None:
        first_stage = holm
    r0 = first_stage(p, alpha0)
    remaining = p.m - r0.k
    g = math.inf if remaining == 0 else p.m / remaining
    delta = _scaled_collection(beta, alpha1 * g / p.m)
    return step_up(p, delta, estimator_value=g)


def two_stage_fdr(p: PValueVector | Sequence[float], alpha0: float, alpha1: float,
                  kappa: float = 2.0,
                  beta: ShapeFunction | None = None) -> RejectionResult:
    """FDR-first two-stage: step-up at alpha0, then against
    alpha1*beta(i)*F_kappa(|R0|/m)/m.

    Requires alpha0 <= alpha1; the recommended instantiation is
    kappa = 2, alpha0 = alpha/4, alpha1 = alpha/2, whose second stage is
    the adaptive step-up at level alpha/2 with estimator
    1/(1 - sqrt((2*|R0|/m - 1)+)).
    """
    p = as_pvalues(p)
    _check_level(alpha0, "alpha0")
    _check_level(alpha1, "alpha1")
    if alpha0 > alpha1:
        raise ValueError(f"alpha0={alpha0} must not exceed alpha1={alpha1}")
    if beta is None:
        beta = identity_shape(p.m)
    if beta.m != p.m:
        raise ValueError(f"shape function is for m={beta.m}, p-values have m={p.m}")
    r0 = step_up(p, _scaled_collection(beta, alpha0 / p.m))
    g = f_kappa(r0.k / p.m, kappa)
    delta = _scaled_collection(beta, alpha1 * g / p.m)
    return step_up(p, delta, estimator_value=g)
