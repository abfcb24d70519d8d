"""Command-line front end.

Exit codes: 0 success, 1 failed check or validation, 2 numerical
non-convergence, 3 domain or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from ._io import columns_to_rows, csv_text, json_text, records
from .conditional import (
    BOTTOM, CENTERED, S_GIVEN_X1, conditional_law, confidence_band, export_grid,
    normalize_direction,
)
from .convolution import CLOSED_GK_DISTINCT, QUADRATURE, sum_law
from .errors import DomainError, NumericalError
from .generators import validate_generator
from .inference import SamplePairs, fit_clayton_pareto, sample_pairs
from .reproduce import reproduce
from .specfile import load_model_spec

EXIT_OK, EXIT_CHECK, EXIT_NUMERIC, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(DomainError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(args, header, rows, comment=None):
    if args.json:
        sys.stdout.write(json_text(records(header, rows)))
    else:
        sys.stdout.write(csv_text(header, rows, comment))


# subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        spec = load_model_spec(args.spec)
    except DomainError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_CHECK
    report = validate_generator(spec.generator, grid_size=args.grid)
    if args.json:
        out = {"ok": report.ok, "failures": report.failures,
               "model": spec.model.describe(), **{
                   k: getattr(report, k) for k in (
                       "boundary_error", "monotonicity_violations", "negative_density",
                       "convexity_violations", "max_density_derivative", "tail_value",
                       "tail_ok", "roundtrip_max_error")}}
        sys.stdout.write(json_text(out))
    else:
        print(f"model: {spec.model.describe()}")
        print(report.summary())
        print("OK" if report.ok else "FAILED: " + "; ".join(report.failures))
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_convolve(args) -> int:
    spec = load_model_spec(args.spec)
    if args.s_steps < 1:
        raise UsageError("--s-steps must be at least 1")
    if not 0 <= args.s_min <= args.s_max:
        raise UsageError("need 0 <= --s-min <= --s-max")
    method = {"auto": None, "closed": CLOSED_GK_DISTINCT, "quadrature": QUADRATURE}[args.method]
    law = sum_law(spec.model, method, spec.quad)
    s = np.linspace(args.s_min, args.s_max, args.s_steps)
    surv = np.asarray(law.survival(s), dtype=float)
    pdf = np.asarray(law.pdf(s), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        hazard = np.where(surv > 1e-14, pdf / np.maximum(surv, 1e-300), np.nan)
    rows = columns_to_rows(s, surv, pdf, hazard, [law.method_tag] * s.size)
    _emit(args, ["s", "survival", "pdf", "hazard", "method_tag"], rows)
    return EXIT_OK


def _conditioning_grid(args, model, direction):
    if args.grid_min is None and args.grid_max is None:
        return export_grid(model, direction, args.grid_steps)
    default = export_grid(model, direction, 2)
    lo = default[0] if args.grid_min is None else args.grid_min
    hi = default[-1] if args.grid_max is None else args.grid_max
    if not 0 <= lo <= hi:
        raise UsageError("need 0 <= --grid-min <= --grid-max")
    return np.linspace(lo, hi, args.grid_steps)


def _prediction_columns(model, direction, grid, q, kind):
    law = conditional_law(model, direction)
    cols = {"conditioning_value": grid, "median": law.quantile(0.5, grid)}
    for p in (0.5, 0.9):
        band = confidence_band(model, direction, p, CENTERED, grid)
        cols[f"lower{int(p * 100)}"] = band.lower.grid[1]
        cols[f"upper{int(p * 100)}"] = band.upper.grid[1]
    if kind == BOTTOM:
        for p in (0.5, 0.9):
            band = confidence_band(model, direction, p, BOTTOM, grid)
            cols[f"bottom{int(p * 100)}_upper"] = band.upper.grid[1]
    if q is not None:
        cols[f"q{q:g}"] = law.quantile(q, grid)
    cols["method_tag"] = [law.method_tag] * len(grid)
    return cols


def cmd_predict(args, kind=CENTERED) -> int:
    spec = load_model_spec(args.spec)
    direction = normalize_direction(args.direction)
    if kind == BOTTOM and direction != S_GIVEN_X1:
        raise UsageError("bottom bands are defined for --direction s-given-x1 only")
    if args.q is not None and not 0 < args.q < 1:
        raise UsageError("--q must lie in (0, 1)")
    if args.at is not None:
        cols = _prediction_columns(spec.model, direction, np.array([args.at]), args.q, kind)
        record = {k: (v[0] if isinstance(v, list) else float(np.asarray(v)[0]))
                  for k, v in cols.items()}
        record["direction"] = direction
        sys.stdout.write(json_text(record))
        return EXIT_OK
    grid = _conditioning_grid(args, spec.model, direction)
    cols = _prediction_columns(spec.model, direction, grid, args.q, kind)
    _emit(args, list(cols), columns_to_rows(*cols.values()))
    return EXIT_OK


def cmd_bands(args) -> int:
    return cmd_predict(args, kind=args.kind)


def cmd_simulate(args) -> int:
    spec = load_model_spec(args.spec)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    seed = args.seed if args.seed is not None else spec.seed
    if seed is None:
        raise UsageError("no seed given (use --seed or a spec seed)")
    pairs = sample_pairs(spec.model, args.n, seed)
    header = ["x1", "x2", "s"]
    rows = columns_to_rows(pairs.x1, pairs.x2, pairs.s)
    comment = (f"model={json.dumps(spec.raw, sort_keys=True, separators=(',', ':'))} "
               f"seed={seed}")
    text = (json_text({"model": spec.raw, "seed": seed, "records": records(header, rows)})
            if args.json else csv_text(header, rows, comment))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def read_sample_csv(path) -> SamplePairs:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    if reader.fieldnames is None or not {"x1", "x2"} <= set(reader.fieldnames):
        raise UsageError(f"{path}: expected columns x1, x2 (and optionally s)")
    try:
        data = [(float(r["x1"]), float(r["x2"])) for r in reader]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed number ({exc})") from None
    if len(data) < 2:
        raise UsageError(f"{path}: need at least two observations")
    x1, x2 = (np.array(c) for c in zip(*data))
    return SamplePairs(0, x1.size, x1, x2, x1 + x2)


def cmd_fit(args) -> int:
    fit = fit_clayton_pareto(read_sample_csv(args.data))
    sys.stdout.write(json_text(fit.as_dict()))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    checks = reproduce(args.example, args.out)
    failed = [c for c in checks if not c.passed]
    if args.json:
        sys.stdout.write(json_text([c.__dict__ for c in checks]))
    else:
        for c in checks:
            print(c.line())
        print(f"example {args.example}: {len(checks) - len(failed)}/{len(checks)} checks passed"
              f"; data written to {args.out}")
    for c in failed:
        print(f"failed: {c.name}", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ttesum", description=(
        "Sums of dependent lifetimes under time-transformed exponential models."))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, spec=True):
        p = sub.add_parser(name, help=help_text)
        if spec:
            p.add_argument("--spec", required=True, help="model spec JSON file")
        p.add_argument("--json", action="store_true", help="emit JSON records")
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check generator admissibility")
    p.add_argument("--grid", type=int, default=256, help="grid size for the checks")

    p = add("convolve", cmd_convolve, "survival, density and hazard of S")
    p.add_argument("--s-min", type=float, default=0.0)
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--s-steps", type=int, default=51)
    p.add_argument("--method", choices=["auto", "closed", "quadrature"], default="auto",
                   help="closed forms need a GK model")

    for name, func, text in (("predict", cmd_predict, "median regression and centered bands"),
                             ("bands", cmd_bands, "centered or bottom confidence bands")):
        p = add(name, func, text)
        p.add_argument("--direction", required=True,
                       help="s-given-x1 or x1-given-s")
        p.add_argument("--at", type=float, help="single conditioning value (JSON output)")
        p.add_argument("--q", type=float, help="extra quantile level column")
        p.add_argument("--grid-min", type=float)
        p.add_argument("--grid-max", type=float)
        p.add_argument("--grid-steps", type=int, default=50)
        if name == "bands":
            p.add_argument("--kind", choices=[CENTERED, BOTTOM], default=CENTERED)

    p = add("simulate", cmd_simulate, "draw (x1, x2, s) samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default stdout)")

    p = add("fit", cmd_fit, "Pareto II GK moment fit from a sample CSV", spec=False)
    p.add_argument("--data", required=True, help="CSV with x1, x2 columns")

    p = add("reproduce", cmd_reproduce, "worked examples with checks and plot data",
            spec=False)
    p.add_argument("example", type=int, choices=[1, 2, 3, 4])
    p.add_argument("--out", default="reproduce_out", help="directory for CSV files")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
