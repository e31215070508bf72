"""Command line front end.

Subcommands:

* ``fdrlab experiment <spec-file>``: run a sweep described by a flat
  key=value grid file and emit one CSV row per (sweep value, procedure).
* ``fdrlab adjust <pvals.txt> --proc <name>``: apply one procedure to a
  file of p-values and report per-hypothesis rejections.
* ``fdrlab tables --m M --alpha A``: print the maximal-dependence
  closed-form FDR table and the lambda calibration bounds.

Exit codes: 0 success, 1 usage error, 2 input-data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .analytics import MaxDepQuery, lambda_bounds, maxdep_fdr
from .core import PValueVector
from .roster import ProcedureSpec, make_procedure, parse_procedure, parse_roster, quantile_k0
from .sim import SimConfig, monte_carlo

USAGE_ERROR = 1
DATA_ERROR = 2

_SWEEPABLE = ("pi0", "mu_bar", "rho")
_GRID_KEYS = ("sweep", "sweep_values", "m", "alpha", "pi0", "mu_bar", "rho",
              "reps", "seed", "procedures")


@dataclass(frozen=True)
class ExperimentGrid:
    """A parsed grid file: one swept parameter, fixed rest, roster."""

    sweep: str
    sweep_values: tuple[float, ...]
    m: int
    alpha: float
    pi0: float
    mu_bar: float
    rho: float
    reps: int
    seed: int
    procedures: tuple[ProcedureSpec, ...]

    def cell(self, value: float) -> SimConfig:
        fixed = {"pi0": self.pi0, "mu_bar": self.mu_bar, "rho": self.rho}
        fixed[self.sweep] = value
        return SimConfig(m=self.m, alpha=self.alpha, reps=self.reps, seed=self.seed,
                         procedures=self.procedures, **fixed)


class GridError(ValueError):
    pass


def parse_grid(text: str) -> ExperimentGrid:
    """Parse the flat key=value grid format; diagnostics name the key."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise GridError(f"line {lineno}: expected key = value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _GRID_KEYS:
            raise GridError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise GridError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    def require(key: str) -> str:
        if key not in raw:
            raise GridError(f"missing key {key!r}")
        return raw[key]

    def number(key: str, text_value: str) -> float:
        try:
            return float(text_value)
        except ValueError:
            raise GridError(f"key {key!r}: cannot parse number {text_value!r}") from None

    sweep = require("sweep")
    if sweep not in _SWEEPABLE:
        raise GridError(f"key 'sweep': must be one of {', '.join(_SWEEPABLE)}")
    sweep_values = tuple(number("sweep_values", t)
                         for t in require("sweep_values").split(",") if t.strip())
    if not sweep_values:
        raise GridError("key 'sweep_values': need at least one value")
    fixed = {}
    for key in _SWEEPABLE:
        if key == sweep:
            fixed[key] = 0.0  # placeholder, replaced per cell; a present value is ignored
        else:
            fixed[key] = number(key, require(key))
    try:
        procedures = parse_roster(require("procedures"))
    except ValueError as exc:
        raise GridError(f"key 'procedures': {exc}") from None
    try:
        grid = ExperimentGrid(
            sweep=sweep,
            sweep_values=sweep_values,
            m=int(number("m", require("m"))),
            alpha=number("alpha", require("alpha")),
            pi0=fixed["pi0"],
            mu_bar=fixed["mu_bar"],
            rho=fixed["rho"],
            reps=int(number("reps", raw.get("reps", "10000"))),
            seed=int(number("seed", raw.get("seed", "0"))),
            procedures=procedures,
        )
        for v in sweep_values:
            grid.cell(v)  # validates each swept value in its domain
    except GridError:
        raise
    except ValueError as exc:
        raise GridError(str(exc)) from None
    return grid


def _fmt(x: float | None) -> str:
    if x is None:
        return "nan"
    return f"{x:.6g}"


def _run_cell(cfg: SimConfig):
    return monte_carlo(cfg)


def cmd_experiment(args) -> int:
    try:
        with open(args.spec_file, encoding="utf-8") as fh:
            grid = parse_grid(fh.read())
    except OSError as exc:
        print(f"fdrlab: cannot read grid file: {exc}", file=sys.stderr)
        return DATA_ERROR
    except GridError as exc:
        print(f"fdrlab: bad grid file: {exc}", file=sys.stderr)
        return DATA_ERROR
    if args.reps is not None:
        grid = dataclasses.replace(grid, reps=args.reps)
    if args.seed is not None:
        grid = dataclasses.replace(grid, seed=args.seed)

    cells = [grid.cell(v) for v in grid.sweep_values]
    if grid.procedures and args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    lines = ["sweep_name,sweep_value,procedure,fdr,fdr_se,power_abs,power_rel,fnr,reps,seed"]
    for value, metrics in zip(grid.sweep_values, results):
        for mt in metrics:
            lines.append(",".join([
                grid.sweep, _fmt(value), mt.procedure,
                _fmt(mt.fdr_hat), _fmt(mt.fdr_se), _fmt(mt.power_abs),
                _fmt(mt.power_rel), _fmt(mt.fnr_hat),
                str(grid.reps), str(grid.seed),
            ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def read_pvalues(path: str) -> list[float]:
    """Read newline-separated p-values; '#' lines and blanks are skipped.

    Raises ValueError with the offending line number on bad input.
    """
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                v = float(stripped)
            except ValueError:
                raise ValueError(f"line {lineno}: cannot parse p-value {stripped!r}") from None
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"line {lineno}: p-value {stripped} outside [0, 1]")
            values.append(v)
    if not values:
        raise ValueError("no p-values in input")
    return values


def _spec_with_flags(args) -> ProcedureSpec:
    spec = parse_procedure(args.proc)
    overrides = {}
    if args.lam is not None:
        overrides["lam"] = args.lam
    if args.k0 is not None:
        overrides["k0"] = args.k0
    if args.eta is not None:
        overrides["eta"] = args.eta
    if args.kappa is not None:
        overrides["kappa"] = args.kappa
    if args.alpha0 is not None:
        overrides["alpha0"] = args.alpha0
    if args.alpha1 is not None:
        overrides["alpha1"] = args.alpha1
    return dataclasses.replace(spec, **overrides) if overrides else spec


def cmd_adjust(args) -> int:
    try:
        spec = _spec_with_flags(args)
        make_procedure(spec, m=2, alpha=args.alpha)  # fail fast on bad parameters
    except ValueError as exc:
        print(f"fdrlab: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        values = read_pvalues(args.pvals_file)
    except OSError as exc:
        print(f"fdrlab: cannot read p-values: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"fdrlab: {args.pvals_file}: {exc}", file=sys.stderr)
        return DATA_ERROR

    p = PValueVector(tuple(values))
    try:
        result = make_procedure(spec, p.m, args.alpha)(p, None)
    except ValueError as exc:
        print(f"fdrlab: {exc}", file=sys.stderr)
        return USAGE_ERROR

    out = []
    for i, v in enumerate(p.values, start=1):
        out.append(f"{i}\t{v:.10g}\t{1 if result.rejected[i - 1] else 0}")
    out.append(f"# procedure: {spec.name}")
    out.append(f"# alpha: {_fmt(args.alpha)}")
    out.append(f"# rejections: {result.k}")
    out.append(f"# realized_threshold: {_fmt(result.realized_threshold)}")
    if result.estimator_value is not None:
        out.append(f"# estimator_value: {_fmt(result.estimator_value)}")
    sys.stdout.write("\n".join(out) + "\n")
    return 0


_TABLE_ROWS = ("br1s", "fdr09", "storey", "storey-0.5", "quant", "bky06", "br2s")


def cmd_tables(args) -> int:
    m, alpha = args.m, args.alpha
    lines = [f"maximal-dependence FDR closed forms (m={m}, alpha={_fmt(alpha)})"]
    header = f"{'procedure':<12}{'parameter':<16}{'fdr':>10}"
    lines.append(header)
    for token in _TABLE_ROWS:
        spec = parse_procedure(token)
        query = _table_query(spec, m, alpha)
        lines.append(f"{spec.name:<12}{_param_label(query):<16}{_fmt(maxdep_fdr(query)):>10}")
    lam1, lam2 = lambda_bounds(m, alpha)
    lines.append(f"lambda1 = {_fmt(lam1)}")
    lines.append(f"lambda2 = {_fmt(lam2)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _table_query(spec: ProcedureSpec, m: int, alpha: float) -> MaxDepQuery:
    from .roster import maxdep_query

    query = maxdep_query(spec, m, alpha)
    assert query is not None
    return query


def _param_label(q: MaxDepQuery) -> str:
    if q.procedure == "fdr09":
        return f"eta={_fmt(q.eta)}"
    if q.procedure == "quantile":
        return f"k0={q.k0}"
    return f"lambda={_fmt(q.lam)}"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdrlab",
                     description="Adaptive FDR procedures and Monte Carlo experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", parents=[], help="run a sweep from a grid file",
                         description="Run the Monte Carlo sweep described by a grid file "
                                     "and write CSV metrics.")
    exp.add_argument("spec_file")
    exp.add_argument("--out", help="write CSV here instead of stdout")
    exp.add_argument("--reps", type=int, help="override replicate count")
    exp.add_argument("--seed", type=int, help="override base seed")
    exp.add_argument("--threads", type=int, default=1, help="parallel grid cells")
    exp.set_defaults(run=cmd_experiment)

    adj = sub.add_parser("adjust", help="apply one procedure to a p-value file",
                         description="Reject hypotheses from a newline-separated "
                                     "p-value file.")
    adj.add_argument("pvals_file")
    adj.add_argument("--proc", required=True, help="procedure name, e.g. storey-0.5")
    adj.add_argument("--alpha", type=float, default=0.05)
    adj.add_argument("--lambda", dest="lam", type=float, help="estimator lambda")
    adj.add_argument("--k0", type=int, help="order statistic index for quant")
    adj.add_argument("--eta", type=float, help="cap parameter for fdr09")
    adj.add_argument("--kappa", type=float, help="transform constant for br-dep")
    adj.add_argument("--alpha0", type=float, help="first-stage level (two-stage)")
    adj.add_argument("--alpha1", type=float, help="second-stage level (two-stage)")
    adj.set_defaults(run=cmd_adjust)

    tab = sub.add_parser("tables", help="print closed-form FDR table",
                         description="Print maximal-dependence FDR values and "
                                     "lambda calibration bounds.")
    tab.add_argument("--m", type=int, required=True)
    tab.add_argument("--alpha", type=float, required=True)
    tab.set_defaults(run=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
