"""Core value types and the generic step-up / step-down engine.

Every procedure in this package reduces to thresholding the order
statistics p_(1) <= ... <= p_(m) against a threshold collection
Delta(0..m) with Delta(0) = 0:

* step-up rejects the k smallest p-values where
  k = max{0 <= i <= m : p_(i) <= Delta(i)}  (p_(0) := 0),
* step-down requires every index up to k to pass:
  k = max{0 <= i <= m : for all j <= i, p_(j) <= Delta(j)}.

Comparisons are exact floating point, no epsilon: injected tolerances
would silently change k on constructed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence


@dataclass(frozen=True)
class PValueVector:
    """The observed family of p-values, each in [0, 1], length m >= 1."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 1:
            raise ValueError("need at least one p-value")
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"p-value {v!r} outside [0, 1]")

    @property
    def m(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GroundTruth:
    """Per-hypothesis truth labels (True = null hypothesis is true).

    Only simulations know this; it carries m0 and pi0 = m0/m.
    """

    is_null: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "is_null", tuple(bool(b) for b in self.is_null))
        if len(self.is_null) < 1:
            raise ValueError("need at least one hypothesis")

    @property
    def m(self) -> int:
        return len(self.is_null)

    @property
    def m0(self) -> int:
        return sum(self.is_null)

    @property
    def pi0(self) -> float:
        return self.m0 / self.m


@dataclass(frozen=True)
class ThresholdCollection:
    """Materialized thresholds Delta(0..m), Delta(0) = 0, all >= 0."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("threshold collection needs entries for i = 0..m, m >= 1")
        if self.values[0] != 0.0:
            raise ValueError("Delta(0) must be 0")
        for v in self.values:
            if not v >= 0.0:  # also rejects nan
                raise ValueError(f"threshold {v!r} is negative or nan")

    @property
    def m(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, i: int) -> float:
        return self.values[i]


@dataclass(frozen=True)
class ShapeFunction:
    """Normalized threshold profile beta(0..m): Delta(i) = alpha*beta(i)/m.

    ``kind`` tags the family: "identity", "prior" (built from a prior
    distribution) or "by" (harmonic-sum correction).
    """

    values: tuple[float, ...]
    kind: str = "identity"

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("shape function needs entries for r = 0..m, m >= 1")
        if self.values[0] != 0.0:
            raise ValueError("beta(0) must be 0")
        prev = 0.0
        for v in self.values:
            if v < prev:
                raise ValueError("shape function must be non-decreasing")
            prev = v

    @property
    def m(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, r: int) -> float:
        return self.values[r]


def identity_shape(m: int) -> ShapeFunction:
    """beta(r) = r, the linear step-up profile."""
    return ShapeFunction(tuple(float(r) for r in range(m + 1)), kind="identity")


@dataclass(frozen=True)
class RejectionResult:
    """Outcome of a procedure: rejection flags, count k, realized threshold.

    ``estimator_value`` carries G(p) when a plug-in/two-stage procedure
    produced the result, else None.
    """

    rejected: tuple[bool, ...]
    k: int
    realized_threshold: float
    estimator_value: float | None = None

    def __post_init__(self) -> None:
        if self.k != sum(self.rejected):
            raise ValueError("k must equal the number of rejection flags set")

    @property
    def m(self) -> int:
        return len(self.rejected)

    def rejected_indices(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rejected) if r)


ProcedureHandle = Callable[[PValueVector, float], RejectionResult]


def as_pvalues(p: PValueVector | Sequence[float] | Iterable[float]) -> PValueVector:
    """Coerce a raw sequence to a PValueVector (no-op when already one)."""
    if isinstance(p, PValueVector):
        return p
    return PValueVector(tuple(p))


def sort_indices(p: PValueVector | Sequence[float]) -> tuple[int, ...]:
    """Ascending stable order of the p-values, as 0-based indices.

    Equal values keep their original relative order.
    """
    p = as_pvalues(p)
    return tuple(sorted(range(p.m), key=p.values.__getitem__))


def _check_lengths(p: PValueVector, delta: ThresholdCollection) -> None:
    if delta.m != p.m:
        raise ValueError(f"threshold collection is for m={delta.m}, p-values have m={p.m}")


def _result_from_cut(p: PValueVector, k_idx: int, sorted_values: Sequence[float],
                     delta: ThresholdCollection,
                     estimator_value: float | None = None) -> RejectionResult:
    # Rejects every p-value <= p_(k_idx), ties included.  For a
    # non-decreasing collection ties cannot straddle the cut, so the
    # count equals k_idx.
    if k_idx == 0:
        rejected = (False,) * p.m
        return RejectionResult(rejected, 0, 0.0, estimator_value)
    cut = sorted_values[k_idx - 1]
    rejected = tuple(v <= cut for v in p.values)
    return RejectionResult(rejected, sum(rejected), delta[k_idx], estimator_value)


def step_up(p: PValueVector | Sequence[float], delta: ThresholdCollection,
            estimator_value: float | None = None) -> RejectionResult:
    """Step-up procedure: k = max{0 <= i <= m : p_(i) <= Delta(i)}."""
    p = as_pvalues(p)
    _check_lengths(p, delta)
    sv = sorted(p.values)
    k_idx = 0
    for i in range(p.m, 0, -1):
        if sv[i - 1] <= delta[i]:
            k_idx = i
            break
    return _result_from_cut(p, k_idx, sv, delta, estimator_value)


def step_down(p: PValueVector | Sequence[float], delta: ThresholdCollection,
              estimator_value: float | None = None) -> RejectionResult:
    """Step-down procedure: longest prefix with p_(j) <= Delta(j) for all j."""
    p = as_pvalues(p)
    _check_lengths(p, delta)
    sv = sorted(p.values)
    k_idx = 0
    for i in range(1, p.m + 1):
        if sv[i - 1] <= delta[i]:
            k_idx = i
        else:
            break
    return _result_from_cut(p, k_idx, sv, delta, estimator_value)


def is_self_consistent(result: RejectionResult, p: PValueVector | Sequence[float],
                       delta: ThresholdCollection) -> bool:
    """Post-hoc audit: every rejected h satisfies p_h <= Delta(k)."""
    p = as_pvalues(p)
    if result.m != p.m:
        raise ValueError("result and p-values have different lengths")
    _check_lengths(p, delta)
    bound = delta[result.k]
    return all(p.values[i] <= bound for i in result.rejected_indices())


def linear_collection(m: int, alpha: float, denominator: float) -> ThresholdCollection:
    """Delta(i) = alpha * i / denominator; infinite when denominator is 0."""
    if denominator == 0:
        return ThresholdCollection((0.0,) + (math.inf,) * m)
    return ThresholdCollection(tuple(alpha * i / denominator for i in range(m + 1)))


def _check_level(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level alpha={alpha!r} outside (0, 1)")


def lsu(p: PValueVector | Sequence[float], alpha: float) -> RejectionResult:
    """Linear step-up at level alpha: Delta(i) = alpha*i/m."""
    p = as_pvalues(p)
    _check_level(alpha)
    return step_up(p, linear_collection(p.m, alpha, p.m))


def lsu_oracle(p: PValueVector | Sequence[float], alpha: float,
               truth: GroundTruth) -> RejectionResult:
    """Linear step-up against the true null count: Delta(i) = alpha*i/m0.

    m0 = 0 makes every threshold infinite and rejects everything, the
    limit of alpha*i/m0 (and FDR is 0 when there are no true nulls).
    """
    p = as_pvalues(p)
    _check_level(alpha)
    if truth.m != p.m:
        raise ValueError("ground truth and p-values have different lengths")
    return step_up(p, linear_collection(p.m, alpha, truth.m0))


def holm(p: PValueVector | Sequence[float], alpha: float) -> RejectionResult:
    """Holm's step-down: Delta(i) = alpha/(m-i+1). Controls FWER at alpha."""
    p = as_pvalues(p)
    _check_level(alpha)
    delta = ThresholdCollection(
        (0.0,) + tuple(alpha / (p.m - i + 1) for i in range(1, p.m + 1)))
    return step_down(p, delta)
