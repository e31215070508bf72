"""Named procedure specifications, as used in experiment rosters and the CLI.

A spec is parsed from a compact token:

* ``lsu``, ``lsu-oracle``, ``holm`` take no parameter;
* ``storey``, ``bky06``, ``br2s``, ``br1s`` take an optional lambda
  suffix (``storey-0.5``); bare names and the literal suffix ``alpha``
  mean lambda = alpha at run time;
* ``fdr09`` takes an optional eta suffix (default 1/2);
* ``quant`` takes an optional fraction suffix in (0, 1]; the order
  statistic index is k0 = max(1, floor(frac*m)), default frac 1/2;
* ``br-dep`` is the FDR-first two-stage procedure (kappa = 2,
  alpha0 = alpha/4, alpha1 = alpha/2 unless overridden);
* ``br-dep-holm`` is the FWER-first two-stage procedure with Holm's
  step-down at alpha0 = alpha/2 and second stage at alpha1 = alpha/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .adaptive import EstimatorSpec, plug_in_step_up, threshold_br1s, threshold_fdr09
from .analytics import MaxDepQuery
from .core import (GroundTruth, PValueVector, RejectionResult, holm,
                   identity_shape, linear_collection, lsu_oracle, step_up)
from .dependent import two_stage_fdr, two_stage_fwer

_BARE = ("lsu-oracle", "br-dep-holm", "br-dep", "lsu", "holm")
_LAMBDA_FAMILIES = ("storey", "bky06", "br2s", "br1s")

ProcedureFn = Callable[[PValueVector, GroundTruth | None], RejectionResult]


@dataclass(frozen=True)
class ProcedureSpec:
    """A procedure name plus resolved parameters (None = derive defaults).

    ``frac`` positions the quantile order statistic relative to m;
    ``k0`` pins it absolutely and wins over ``frac`` when both are set.
    """

    name: str
    kind: str
    lam: float | None = None
    eta: float | None = None
    frac: float | None = None
    k0: int | None = None
    kappa: float | None = None
    alpha0: float | None = None
    alpha1: float | None = None


def parse_procedure(token: str) -> ProcedureSpec:
    """Parse one roster token; raises ValueError naming the bad token."""
    name = token.strip().lower()
    if not name:
        raise ValueError("empty procedure name")
    if name in _BARE:
        return ProcedureSpec(name=name, kind=name)
    for family in _LAMBDA_FAMILIES:
        if name == family:
            return ProcedureSpec(name=name, kind=family)
        if name.startswith(family + "-"):
            suffix = name[len(family) + 1:]
            if suffix == "alpha":
                return ProcedureSpec(name=name, kind=family)
            lam = _parse_param(name, suffix)
            if not 0.0 < lam < 1.0:
                raise ValueError(f"procedure {name!r}: lambda must be in (0, 1)")
            return ProcedureSpec(name=name, kind=family, lam=lam)
    if name == "fdr09" or name.startswith("fdr09-"):
        eta = 0.5
        if name != "fdr09":
            eta = _parse_param(name, name[len("fdr09-"):])
            if not 0.0 < eta < 1.0:
                raise ValueError(f"procedure {name!r}: eta must be in (0, 1)")
        return ProcedureSpec(name=name, kind="fdr09", eta=eta)
    if name == "quant" or name.startswith("quant-"):
        frac = 0.5
        if name != "quant":
            frac = _parse_param(name, name[len("quant-"):])
            if not 0.0 < frac <= 1.0:
                raise ValueError(f"procedure {name!r}: fraction must be in (0, 1]")
        return ProcedureSpec(name=name, kind="quant", frac=frac)
    raise ValueError(f"unknown procedure {token!r}")


def _parse_param(name: str, suffix: str) -> float:
    try:
        return float(suffix)
    except ValueError:
        raise ValueError(f"procedure {name!r}: cannot parse parameter {suffix!r}") from None


def parse_roster(text: str) -> tuple[ProcedureSpec, ...]:
    """Parse a comma-separated roster; empty text gives an empty roster."""
    tokens = [t for t in (s.strip() for s in text.split(",")) if t]
    return tuple(parse_procedure(t) for t in tokens)


def quantile_k0(spec: ProcedureSpec, m: int) -> int:
    if spec.k0 is not None:
        return spec.k0
    frac = spec.frac if spec.frac is not None else 0.5
    return max(1, math.floor(frac * m))


def make_procedure(spec: ProcedureSpec, m: int, alpha: float) -> ProcedureFn:
    """Resolve a spec into a callable (p, truth) -> RejectionResult.

    Static threshold collections are materialized once here, so per-call
    work stays linear in m.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha={alpha!r} outside (0, 1)")
    if spec.kind == "lsu":
        delta = linear_collection(m, alpha, m)
        return lambda p, truth: step_up(p, delta)
    if spec.kind == "lsu-oracle":
        def run(p, truth):
            if truth is None:
                raise ValueError("lsu-oracle needs ground truth")
            return lsu_oracle(p, alpha, truth)
        return run
    if spec.kind == "holm":
        return lambda p, truth: holm(p, alpha)
    if spec.kind == "br1s":
        delta = threshold_br1s(m, alpha, spec.lam if spec.lam is not None else alpha)
        return lambda p, truth: step_up(p, delta)
    if spec.kind == "fdr09":
        delta = threshold_fdr09(m, alpha, spec.eta)
        return lambda p, truth: step_up(p, delta)
    if spec.kind in ("storey", "bky06", "br2s"):
        est = EstimatorSpec(kind=spec.kind,
                            lam=spec.lam if spec.lam is not None else alpha)
        shape = identity_shape(m)
        return lambda p, truth: plug_in_step_up(p, alpha, est, beta=shape)
    if spec.kind == "quant":
        est = EstimatorSpec(kind="quantile", k0=quantile_k0(spec, m))
        shape = identity_shape(m)
        return lambda p, truth: plug_in_step_up(p, alpha, est, beta=shape)
    if spec.kind == "br-dep":
        a0 = spec.alpha0 if spec.alpha0 is not None else alpha / 4.0
        a1 = spec.alpha1 if spec.alpha1 is not None else alpha / 2.0
        kappa = spec.kappa if spec.kappa is not None else 2.0
        return lambda p, truth: two_stage_fdr(p, a0, a1, kappa=kappa)
    if spec.kind == "br-dep-holm":
        a0 = spec.alpha0 if spec.alpha0 is not None else alpha / 2.0
        a1 = spec.alpha1 if spec.alpha1 is not None else alpha / 2.0
        return lambda p, truth: two_stage_fwer(p, a0, a1)
    raise ValueError(f"unknown procedure kind {spec.kind!r}")


def maxdep_query(spec: ProcedureSpec, m: int, alpha: float) -> MaxDepQuery | None:
    """Closed-form maximal-dependence query for a spec, when one exists."""
    lam = spec.lam if spec.lam is not None else alpha
    if spec.kind == "br1s":
        return MaxDepQuery("br1s", m, alpha, lam=lam)
    if spec.kind == "fdr09":
        return MaxDepQuery("fdr09", m, alpha, eta=spec.eta)
    if spec.kind in ("storey", "bky06", "br2s"):
        return MaxDepQuery(spec.kind, m, alpha, lam=lam)
    if spec.kind == "quant":
        return MaxDepQuery("quantile", m, alpha, k0=quantile_k0(spec, m))
    return None
