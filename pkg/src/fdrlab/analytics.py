"""Closed-form analytics: maximal-dependence FDR values, the critical
alternative mean for the linear step-up, lambda calibration bounds, an
exact binomial expectation used as an oracle for the estimator bias
bounds, and standard Gaussian upper-tail functions.

The Gaussian pair is self-contained (stdlib erfc plus a Newton-refined
inverse) so nothing here needs scipy; the inverse is accurate to better
than 1e-10 in x over u in [1e-10, 1-1e-10].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gaussian_upper_tail(x: float) -> float:
    """Standard normal upper tail P(Z > x)."""
    return 0.5 * math.erfc(x / _SQRT2)


def _gaussian_density(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


# Acklam's rational approximation to the standard normal quantile,
# |relative error| < 1.15e-9; used only to seed Newton below.
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
             6.680131188771972e+01, -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
             3.754408661907416e+00)
_ACKLAM_SPLIT = 0.02425


def _normal_quantile_seed(p: float) -> float:
    """Approximate Phi^-1(p) (lower tail) for p in (0, 0.5]."""
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if p < _ACKLAM_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def _upper_tail_inverse_small(u: float) -> float:
    """Solve gaussian_upper_tail(x) = u for u in (0, 0.5]; x >= 0."""
    x = -_normal_quantile_seed(u)
    for _ in range(4):
        err = gaussian_upper_tail(x) - u
        if err == 0.0:
            break
        dens = _gaussian_density(x)
        if dens <= 0.0:
            break
        dx = err / dens
        x += dx
        if abs(dx) <= 1e-14 * (1.0 + abs(x)):
            break
    return x


def gaussian_upper_tail_inverse(u: float) -> float:
    """Inverse of the standard normal upper tail on (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"u={u!r} outside (0, 1)")
    if u > 0.5:
        # 1-u is exact for u in [0.5, 1], keeping the reduction lossless
        return -_upper_tail_inverse_small(1.0 - u)
    return _upper_tail_inverse_small(u)


@dataclass(frozen=True)
class MaxDepQuery:
    """One procedure/parameter cell of the maximal-dependence model
    (all m p-values identical, all hypotheses null)."""

    procedure: str  # br1s | fdr09 | storey | quantile | bky06 | br2s
    m: int
    alpha: float
    lam: float | None = None
    eta: float | None = None
    k0: int | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha={self.alpha!r} outside (0, 1)")
        if self.procedure in ("br1s", "storey", "bky06", "br2s"):
            if self.lam is None or not 0.0 < self.lam < 1.0:
                raise ValueError(f"procedure {self.procedure!r} needs lam in (0, 1)")
        elif self.procedure == "fdr09":
            if self.eta is None or not 0.0 < self.eta < 1.0:
                raise ValueError("procedure 'fdr09' needs eta in (0, 1)")
        elif self.procedure == "quantile":
            if self.k0 is None or not 1 <= self.k0 <= self.m:
                raise ValueError(f"procedure 'quantile' needs k0 in 1..{self.m}")
        else:
            raise ValueError(f"unknown procedure {self.procedure!r}")


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _storey_maxdep(m: int, alpha: float, lam: float, statement_form: bool) -> float:
    base = min(lam, alpha * (1.0 - lam) * m)
    if statement_form:
        extra = alpha * (1.0 - lam) * (1.0 + 1.0 / m) - lam
    else:
        extra = alpha * (1.0 - lam) * m / (m + 1.0) - lam
    return base + max(extra, 0.0)


def maxdep_fdr(q: MaxDepQuery, statement_form: bool = False) -> float:
    """Exact FDR of a procedure when all m p-values are one uniform draw.

    Everything is all-or-nothing in that model, so the FDR is the
    probability of rejecting, clamped to [0, 1].  For the Storey-type
    procedures two published variants of the overshoot term circulate;
    the default uses the derivation-consistent m/(m+1) factor and
    ``statement_form=True`` selects the (1+1/m) variant instead.
    """
    m, alpha = q.m, q.alpha
    if q.procedure == "br1s":
        val = min(q.lam, (1.0 - q.lam) * alpha * m)
    elif q.procedure == "fdr09":
        val = alpha / q.eta
    elif q.procedure in ("storey", "bky06", "br2s"):
        val = _storey_maxdep(m, alpha, q.lam, statement_form)
    else:  # quantile
        val = alpha / ((1.0 + alpha) - (q.k0 - 1) / m)
    return _clamp01(val)


def critical_mean(pi0: float, alpha: float) -> float | None:
    """Critical common alternative mean mu* above which the linear
    step-up rejects a proportion exceeding alpha + 1/m with probability
    tending to one (one-sided Gaussian shifts, random-effects limit).

    Defined only for pi0 < 1/(1+alpha); returns None otherwise (in that
    regime the rejected proportion stays below alpha + 1/m instead).
    """
    if not 0.0 < pi0 < 1.0:
        raise ValueError(f"pi0={pi0!r} outside (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha={alpha!r} outside (0, 1)")
    if pi0 >= 1.0 / (1.0 + alpha):
        return None
    inner = (1.0 / alpha - pi0) / (1.0 - pi0) * alpha * alpha
    if not 0.0 < inner < 1.0:
        return None
    return gaussian_upper_tail_inverse(alpha * alpha) - gaussian_upper_tail_inverse(inner)


def lambda_bounds(m: int, alpha: float) -> tuple[float, float]:
    """Calibration interval (lambda1, lambda2) for the maximal-dependence
    model: for lambda in [lambda1, lambda2] the Storey-type procedures
    have FDR exactly lambda there, and the one-stage adaptive collection
    does for lambda <= lambda2.  Both contain lambda = alpha.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha={alpha!r} outside (0, 1)")
    lam1 = alpha / (1.0 + alpha + 1.0 / m)
    lam2 = alpha / (alpha + 1.0 / m)
    return lam1, lam2


def lemma4_lhs_exact(k: int, q: float) -> float:
    """E[1/(1+Y)] for Y ~ Binomial(k-1, q), by exact pmf summation.

    Oracle for the bias bound E[1/(1+Y)] <= 1/(k*q) that underlies the
    plug-in estimators' FDR control.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q={q!r} outside (0, 1]")
    n = k - 1
    total = 0.0
    for y in range(n + 1):
        total += math.comb(n, y) * q ** y * (1.0 - q) ** (n - y) / (1.0 + y)
    return total
