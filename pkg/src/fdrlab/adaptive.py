"""One-stage adaptive threshold collections and plug-in estimators of 1/pi0.

The one-stage collections (the lambda-capped curve, the asymptotically
optimal rejection curve and its eta-capped variant) make the step-up
adaptive without an explicit estimate.  The plug-in route instead
computes an estimator G of 1/pi0 once, then runs a step-up against
Delta(i) = alpha*beta(i)*G/m.

Estimators, for a fixed lambda in (0,1) or k0 in {1..m}:

* storey:    G1 = (1-lambda)*m / (#{p_h > lambda} + 1)
* quantile:  G2 = (1-p_(k0))*m / (m-k0+1)
* bky06:     G3 = (1-lambda)*m / (m - |R0| + 1),  R0 = linear step-up at level lambda
* br2s:      G4 = (1-lambda)*m / (m - |R0'| + 1), R0' = one-stage adaptive
             step-up at level lambda (same parameter lambda)

None of these is floored at 1: in sparse- or weak-signal regimes they
can fall below 1 and the plug-in is then more conservative than the
plain linear step-up.  The result records the estimator value so
callers can observe this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (PValueVector, RejectionResult, ShapeFunction, ThresholdCollection,
                   as_pvalues, identity_shape, lsu, step_up)


def _check_level(alpha: float, name: str = "alpha") -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"{name}={alpha!r} outside (0, 1)")


def threshold_br1s(m: int, alpha: float, lam: float) -> ThresholdCollection:
    """One-stage adaptive collection Delta(i) = min((1-lam)*alpha*i/(m-i+1), lam)."""
    _check_level(alpha)
    _check_level(lam, "lambda")
    vals = [0.0]
    for i in range(1, m + 1):
        vals.append(min((1.0 - lam) * alpha * i / (m - i + 1), lam))
    return ThresholdCollection(tuple(vals))


def threshold_aorc(m: int, alpha: float) -> ThresholdCollection:
    """Asymptotically optimal rejection curve t(i) = alpha*i/(m-(1-alpha)*i).

    Reference curve only: t(m) = 1, so the bare step-up would always
    reject everything.  Use threshold_fdr09 for a usable variant.
    """
    _check_level(alpha)
    return ThresholdCollection(
        (0.0,) + tuple(alpha * i / (m - (1.0 - alpha) * i) for i in range(1, m + 1)))


def threshold_fdr09(m: int, alpha: float, eta: float) -> ThresholdCollection:
    """Capped rejection curve: pointwise min of the AORC and eta^-1*alpha*i/m."""
    _check_level(alpha)
    _check_level(eta, "eta")
    aorc = threshold_aorc(m, alpha)
    return ThresholdCollection(
        tuple(min(aorc[i], alpha * i / (eta * m)) for i in range(m + 1)))


@dataclass(frozen=True)
class EstimatorSpec:
    """Which 1/pi0 estimator to plug in, with its single parameter.

    kind "storey", "bky06" and "br2s" take ``lam``; "quantile" takes
    ``k0`` (a 1-based order statistic index).
    """

    kind: str
    lam: float | None = None
    k0: int | None = None

    def __post_init__(self) -> None:
        if self.kind in ("storey", "bky06", "br2s"):
            if self.lam is None or self.k0 is not None:
                raise ValueError(f"estimator {self.kind!r} takes lam only")
            _check_level(self.lam, "lambda")
        elif self.kind == "quantile":
            if self.k0 is None or self.lam is not None:
                raise ValueError("estimator 'quantile' takes k0 only")
            if self.k0 < 1:
                raise ValueError("k0 must be >= 1")
        else:
            raise ValueError(f"unknown estimator kind {self.kind!r}")


def estimator_storey(p: PValueVector | Sequence[float], lam: float) -> float:
    """Modified Storey estimator G1 = (1-lam)*m / (#{p_h > lam} + 1)."""
    p = as_pvalues(p)
    _check_level(lam, "lambda")
    exceed = sum(1 for v in p.values if v > lam)
    return (1.0 - lam) * p.m / (exceed + 1)


def estimator_quantile(p: PValueVector | Sequence[float], k0: int) -> float:
    """Quantile (order statistic) estimator G2 = (1-p_(k0))*m / (m-k0+1).

    k0 = floor(m/2) gives the median-adaptive variant.  G2 = 0 when
    p_(k0) = 1; the plug-in then rejects nothing.
    """
    p = as_pvalues(p)
    if not 1 <= k0 <= p.m:
        raise ValueError(f"k0={k0} outside 1..{p.m}")
    return (1.0 - sorted(p.values)[k0 - 1]) * p.m / (p.m - k0 + 1)


def estimator_bky06(p: PValueVector | Sequence[float], lam: float) -> float:
    """Two-stage estimator G3 from the linear step-up at level lam."""
    p = as_pvalues(p)
    _check_level(lam, "lambda")
    r0 = lsu(p, lam)
    return (1.0 - lam) * p.m / (p.m - r0.k + 1)


def estimator_br2s(p: PValueVector | Sequence[float], lam: float) -> float:
    """Two-stage estimator G4 from the one-stage adaptive step-up at level lam."""
    p = as_pvalues(p)
    _check_level(lam, "lambda")
    r0 = step_up(p, threshold_br1s(p.m, lam, lam))
    return (1.0 - lam) * p.m / (p.m - r0.k + 1)


def evaluate_estimator(p: PValueVector | Sequence[float], spec: EstimatorSpec) -> float:
    p = as_pvalues(p)
    if spec.kind == "storey":
        return estimator_storey(p, spec.lam)
    if spec.kind == "quantile":
        return estimator_quantile(p, spec.k0)
    if spec.kind == "bky06":
        return estimator_bky06(p, spec.lam)
    return estimator_br2s(p, spec.lam)


def plug_in_step_up(p: PValueVector | Sequence[float], alpha: float,
                    estimator: EstimatorSpec,
                    beta: ShapeFunction | None = None) -> RejectionResult:
    """Adaptive step-up against Delta(i) = alpha*beta(i)*G(p)/m.

    G is evaluated once on the full family.  beta defaults to the
    identity (the adaptive linear step-up).  A degenerate G <= 0
    rejects nothing rather than raising.
    """
    p = as_pvalues(p)
    _check_level(alpha)
    if beta is None:
        beta = identity_shape(p.m)
    if beta.m != p.m:
        raise ValueError(f"shape function is for m={beta.m}, p-values have m={p.m}")
    g = evaluate_estimator(p, estimator)
    if g <= 0.0:
        return RejectionResult((False,) * p.m, 0, 0.0, g)
    delta = ThresholdCollection(tuple(alpha * beta[i] * g / p.m for i in range(p.m + 1)))
    return step_up(p, delta, estimator_value=g)


def storey_failure_bound(m: int, pi0: float, lam: float, f_at_lambda: float) -> float | None:
    """Hoeffding bound on P(G1 < 1), i.e. the Storey plug-in being more
    conservative than the plain linear step-up.

    With c = (1-pi0)*(F(lambda)-lambda), where F is the alternative
    p-value c.d.f., the bound is exp(-2*(m*c^2+1)) and requires
    c > 1/m.  Returns None when that side condition fails (sparse or
    weak signal), meaning the bound is not applicable.
    """
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0={pi0!r} outside [0, 1]")
    _check_level(lam, "lambda")
    if not 0.0 <= f_at_lambda <= 1.0:
        raise ValueError(f"F(lambda)={f_at_lambda!r} outside [0, 1]")
    c = (1.0 - pi0) * (f_at_lambda - lam)
    if c <= 1.0 / m:
        return None
    return math.exp(-2.0 * (m * c * c + 1.0))
