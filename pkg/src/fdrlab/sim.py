"""Equicorrelated one-sided Gaussian simulation model and Monte Carlo engine.

One replicate draws X_i = mu_i + sqrt(rho)*U + sqrt(1-rho)*Z_i with U and
the Z_i i.i.d. standard normal, takes p_i as the Gaussian upper tail of
X_i, and runs every procedure in the roster.  mu_i = 0 for the m0 null
hypotheses, mu_bar for the rest, so null p-values are exactly uniform;
rho = 0 gives independence, rho = 1 with pi0 = 1 is the maximal
dependence model.

Determinism contract: replicate r draws from a counter-based substream
keyed by (seed, r), and replicates are accumulated in fixed-size chunks
merged in index order, so results depend only on the configuration and
seed, never on how many workers ran them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytics import gaussian_upper_tail, gaussian_upper_tail_inverse
from .core import GroundTruth, PValueVector
from .roster import ProcedureSpec, make_procedure

CHUNK = 512  # replicates per accumulation chunk; fixed so worker count cannot reorder sums

_ORACLE = ProcedureSpec(name="lsu-oracle", kind="lsu-oracle")


@dataclass(frozen=True)
class SimConfig:
    """One experiment cell: model parameters, level, budget and roster."""

    m: int
    pi0: float
    rho: float
    mu_bar: float
    alpha: float
    reps: int
    seed: int
    procedures: tuple[ProcedureSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "procedures", tuple(self.procedures))
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError(f"pi0={self.pi0!r} outside [0, 1]")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho={self.rho!r} outside [0, 1]")
        if not self.mu_bar >= 0.0:
            raise ValueError(f"mu_bar={self.mu_bar!r} must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha={self.alpha!r} outside (0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")

    @property
    def m0(self) -> int:
        # round-half-to-even; the paper's grids use exact integer cells
        return round(self.pi0 * self.m)


@dataclass(frozen=True)
class ProcedureCounts:
    """Confusion counts of one procedure on one replicate."""

    false_discoveries: int
    discoveries: int
    true_discoveries: int
    non_discoveries: int
    false_non_discoveries: int

    def __post_init__(self) -> None:
        if self.false_discoveries + self.true_discoveries != self.discoveries:
            raise ValueError("discovery counts are inconsistent")

    @property
    def fdp(self) -> float:
        return self.false_discoveries / self.discoveries if self.discoveries else 0.0

    @property
    def fnp(self) -> float:
        return (self.false_non_discoveries / self.non_discoveries
                if self.non_discoveries else 0.0)


@dataclass(frozen=True)
class ReplicateOutcome:
    """Counts for every procedure of the roster, in roster order."""

    per_procedure: tuple[ProcedureCounts, ...]


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    """Counter-based substream for one replicate, independent of scheduling."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed, spawn_key=(rep,))))


def gen_equicorrelated(cfg: SimConfig, rng: np.random.Generator
                       ) -> tuple[PValueVector, GroundTruth]:
    """Draw one replicate of the model; the first m0 hypotheses are null.

    Normal draws go through the inverse upper tail so the stream is a
    pure function of the uniform bits.
    """
    u = rng.random(cfg.m + 1)
    shared = gaussian_upper_tail_inverse(u[0])
    sr = math.sqrt(cfg.rho)
    sc = math.sqrt(1.0 - cfg.rho)
    m0 = cfg.m0
    pvals = []
    for i in range(cfg.m):
        eps = sr * shared + sc * gaussian_upper_tail_inverse(u[i + 1])
        mu = 0.0 if i < m0 else cfg.mu_bar
        pvals.append(gaussian_upper_tail(mu + eps))
    truth = GroundTruth(tuple(i < m0 for i in range(cfg.m)))
    return PValueVector(tuple(pvals)), truth


def count_outcome(result, truth: GroundTruth) -> ProcedureCounts:
    m = truth.m
    m0 = truth.m0
    fd = sum(1 for i in result.rejected_indices() if truth.is_null[i])
    d = result.k
    td = d - fd
    return ProcedureCounts(
        false_discoveries=fd,
        discoveries=d,
        true_discoveries=td,
        non_discoveries=m - d,
        false_non_discoveries=(m - m0) - td,
    )


def run_replicate(p: PValueVector, truth: GroundTruth,
                  procedures: tuple[ProcedureSpec, ...], alpha: float
                  ) -> ReplicateOutcome:
    """Run every roster procedure on one drawn replicate."""
    if not procedures:
        raise ValueError("procedure roster is empty")
    fns = [make_procedure(spec, p.m, alpha) for spec in procedures]
    return ReplicateOutcome(tuple(count_outcome(fn(p, truth), truth) for fn in fns))


class MetricsAccumulator:
    """Running per-procedure sums over replicates.

    Owned by a single worker; partial accumulators are merged in chunk
    index order.  Count sums are exact integers.
    """

    __slots__ = ("n_procs", "n", "sum_fdp", "sum_fdp_sq", "sum_td", "sum_td_sq",
                 "sum_fnp", "sum_fnp_sq")

    def __init__(self, n_procs: int):
        self.n_procs = n_procs
        self.n = 0
        self.sum_fdp = [0.0] * n_procs
        self.sum_fdp_sq = [0.0] * n_procs
        self.sum_td = [0] * n_procs
        self.sum_td_sq = [0] * n_procs
        self.sum_fnp = [0.0] * n_procs
        self.sum_fnp_sq = [0.0] * n_procs

    def add(self, outcome: ReplicateOutcome) -> None:
        if len(outcome.per_procedure) != self.n_procs:
            raise ValueError("outcome does not match the accumulator's roster size")
        self.n += 1
        for j, c in enumerate(outcome.per_procedure):
            fdp = c.fdp
            fnp = c.fnp
            self.sum_fdp[j] += fdp
            self.sum_fdp_sq[j] += fdp * fdp
            self.sum_td[j] += c.true_discoveries
            self.sum_td_sq[j] += c.true_discoveries * c.true_discoveries
            self.sum_fnp[j] += fnp
            self.sum_fnp_sq[j] += fnp * fnp

    def merge(self, other: "MetricsAccumulator") -> None:
        if other.n_procs != self.n_procs:
            raise ValueError("cannot merge accumulators of different roster sizes")
        self.n += other.n
        for j in range(self.n_procs):
            self.sum_fdp[j] += other.sum_fdp[j]
            self.sum_fdp_sq[j] += other.sum_fdp_sq[j]
            self.sum_td[j] += other.sum_td[j]
            self.sum_td_sq[j] += other.sum_td_sq[j]
            self.sum_fnp[j] += other.sum_fnp[j]
            self.sum_fnp_sq[j] += other.sum_fnp_sq[j]


@dataclass(frozen=True)
class ProcedureMetrics:
    """Monte Carlo estimates for one procedure; power fields are None
    when pi0 = 1 (no false hypotheses) and relative power additionally
    when the oracle never rejected a false hypothesis."""

    procedure: str
    fdr_hat: float
    fdr_se: float
    power_abs: float | None
    power_abs_se: float | None
    power_rel: float | None
    power_rel_se: float | None
    fnr_hat: float
    fnr_se: float


def _mean_se(total: float, total_sq: float, n: int) -> tuple[float, float]:
    mean = total / n
    if n < 2:
        return mean, 0.0
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


def _run_chunk(cfg: SimConfig, start: int, stop: int) -> MetricsAccumulator:
    specs = list(cfg.procedures)
    oracle_idx = next((j for j, s in enumerate(specs) if s.kind == "lsu-oracle"), None)
    if oracle_idx is None:
        specs.append(_ORACLE)  # internal denominator for relative power
    fns = [make_procedure(s, cfg.m, cfg.alpha) for s in specs]
    acc = MetricsAccumulator(len(specs))
    for rep in range(start, stop):
        p, truth = gen_equicorrelated(cfg, replicate_rng(cfg.seed, rep))
        acc.add(ReplicateOutcome(tuple(
            count_outcome(fn(p, truth), truth) for fn in fns)))
    return acc


def _run_chunk_args(args) -> MetricsAccumulator:
    return _run_chunk(*args)


def monte_carlo(cfg: SimConfig, workers: int = 1) -> tuple[ProcedureMetrics, ...]:
    """Estimate FDR, absolute/relative power and FNR for every roster entry.

    Results are bit-identical for any ``workers`` value: chunk
    boundaries are fixed by CHUNK and partial sums merge in chunk order.
    Relative power is the ratio of means, mean true discoveries over the
    oracle's mean true discoveries.
    """
    if not cfg.procedures:
        return ()
    tasks = [(cfg, s, min(s + CHUNK, cfg.reps)) for s in range(0, cfg.reps, CHUNK)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_run_chunk_args, tasks))
    else:
        partials = [_run_chunk(*t) for t in tasks]
    acc = partials[0]
    for part in partials[1:]:
        acc.merge(part)

    specs = list(cfg.procedures)
    oracle_idx = next((j for j, s in enumerate(specs) if s.kind == "lsu-oracle"),
                      len(specs))  # appended internally when absent
    n = acc.n
    m1 = cfg.m - cfg.m0
    td_oracle_mean, td_oracle_se = _mean_se(acc.sum_td[oracle_idx],
                                            acc.sum_td_sq[oracle_idx], n)
    out = []
    for j, spec in enumerate(cfg.procedures):
        fdr_hat, fdr_se = _mean_se(acc.sum_fdp[j], acc.sum_fdp_sq[j], n)
        fnr_hat, fnr_se = _mean_se(acc.sum_fnp[j], acc.sum_fnp_sq[j], n)
        power_abs = power_abs_se = power_rel = power_rel_se = None
        if m1 > 0:
            td_mean, td_se = _mean_se(acc.sum_td[j], acc.sum_td_sq[j], n)
            power_abs = td_mean / m1
            power_abs_se = td_se / m1
            if td_oracle_mean > 0.0:
                power_rel = td_mean / td_oracle_mean
                if td_mean > 0.0:
                    # delta method, covariance with the oracle ignored
                    power_rel_se = power_rel * math.sqrt(
                        (td_se / td_mean) ** 2 + (td_oracle_se / td_oracle_mean) ** 2)
                else:
                    power_rel_se = td_se / td_oracle_mean
        out.append(ProcedureMetrics(
            procedure=spec.name,
            fdr_hat=fdr_hat, fdr_se=fdr_se,
            power_abs=power_abs, power_abs_se=power_abs_se,
            power_rel=power_rel, power_rel_se=power_rel_se,
            fnr_hat=fnr_hat, fnr_se=fnr_se,
        ))
    return tuple(out)
