"""Command-line interface.

Exit codes: 0 success, 1 error, 2 when a detection command ran but found
nothing significant at the requested level.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import bounds, inference, pleiotropy, regions
from .data import estimate_dist, ingest_microdata, read_microdata_csv, read_table_json, yerushalmy
from .errors import ConfigConflictError, PsdetectError, ZeroVarianceError
from .oracle import run_oracle

EXIT_OK, EXIT_ERROR, EXIT_NOTHING_DETECTED = 0, 1, 2

DENOMINATOR_FLAGS = {"control-arm": "control-arm", "exact": "exact-monotone"}


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 so that 2 keeps meaning "nothing detected"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> list[Fraction]:
    """``a:b:step`` inclusive grid (or a single value) as exact rationals."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [Fraction(parts[0])]
        if len(parts) != 3:
            raise ValueError
        a, b, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ConfigConflictError(f"grid must be 'a:b:step' or a number, got {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigConflictError(f"grid {text!r} needs step > 0 and a <= b")
    n = int((b - a) / step)
    return [a + i * step for i in range(n + 1)]


# -- input ---------------------------------------------------------------------

def load_table(args, two_outcomes: bool = False):
    if args.data == "yerushalmy":
        if two_outcomes:
            raise ConfigConflictError("the bundled dataset has a mediator, not a second outcome")
        return yerushalmy()
    path = Path(args.data)
    fmt = args.format or ("csv" if path.suffix.lower() == ".csv" else "json")
    if two_outcomes:
        return pleiotropy.read_table(path, fmt)
    if fmt == "csv":
        return ingest_microdata(read_microdata_csv(path))
    return read_table_json(path)


def load_records(args):
    if args.data == "yerushalmy":
        from .data import expand_to_records

        return expand_to_records(yerushalmy())
    path = Path(args.data)
    if (args.format or path.suffix.lower().lstrip(".")) != "csv":
        raise ConfigConflictError("--region needs CSV microdata")
    return read_microdata_csv(path)


# -- inference ------------------------------------------------------------------

def contrast_for(report: bounds.BoundReport) -> inference.Contrast:
    if report.variant is not None:
        return inference.pleiotropy_contrast(report.y, report.m)
    if report.basis in (bounds.BASIS_RANDOMIZATION, regions.BASIS_SET_RANDOMIZATION):
        return inference.randomization_contrast(report.y, report.m)
    if report.roles == "swapped":
        return inference.swapped_monotone_contrast(report.y, report.m)
    return inference.monotone_contrast(report.y, report.m)


def attach_inference(report, table, args) -> dict:
    contrast = contrast_for(report)
    sided = "one-lower" if args.one_sided else "two"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", inference.ZeroVarianceWarning)
        if args.bootstrap:
            ci = inference.bootstrap_ci(contrast, table, args.level, sided, args.bootstrap, args.seed)
        else:
            ci = inference.wald_ci(contrast, table, args.level, sided)
    try:
        p = inference.test_null(contrast, table)
    except ZeroVarianceError:
        p = None
    doc = report.with_inference(ci=ci, p_value=p).to_dict()
    if p is None:
        doc["significant"] = report.detected
        doc.setdefault("notes", []).append("zero standard error: significance equals the point detection")
    else:
        doc["significant"] = bool(report.detected and p < 1 - args.level)
    return doc


# -- output ---------------------------------------------------------------------

TSV_COLUMNS = ("y", "m", "variant", "statistic", "statistic_exact", "detected", "significant",
               "lower_unstd", "lower_std", "ci_lower", "ci_upper", "p_value", "basis")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def report_rows(doc) -> list[dict]:
    rows = []
    for rep in doc.get("reports", []):
        row = dict(rep["target"])
        row.update({k: rep.get(k) for k in TSV_COLUMNS if k in rep})
        if "ci" in rep:
            row["ci_lower"], row["ci_upper"] = rep["ci"]["lower"], rep["ci"]["upper"]
        rows.append(row)
    return rows


def emit(doc: dict, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return
    rows = report_rows(doc) if "reports" in doc else doc.get("rows", [])
    if not rows:
        out.write(json.dumps(doc, sort_keys=True) + "\n")
        return
    cols = list(TSV_COLUMNS) if "reports" in doc else list(rows[0])
    out.write("\t".join(cols) + "\n")
    for row in rows:
        out.write("\t".join(_cell(row.get(c)) for c in cols) + "\n")


# -- commands -----------------------------------------------------------------

def _targets(args):
    if args.y is None and args.m is None:
        return list(bounds.SCAN_ORDER)
    if args.y is None or args.m is None:
        raise ConfigConflictError("give both --y and --m, or neither to scan all four")
    return [(args.y, args.m)]


def _no_grids(args):
    if getattr(args, "r_grid", None) or getattr(args, "q_grid", None):
        raise ConfigConflictError("--r-grid/--q-grid only apply to the sensitivity command")


def _binary_reports(args, targets):
    table = load_table(args)
    dist = estimate_dist(table)
    if args.assume_monotone_m:
        mode = DENOMINATOR_FLAGS[args.denominator]
        roles = "swapped" if args.swap_roles else "standard"
        reps = [bounds.monotone_bound(dist, y, m, mode, roles) for y, m in targets]
    else:
        if args.swap_roles or args.denominator != "control-arm":
            raise ConfigConflictError("--swap-roles and --denominator need --assume-monotone-m")
        reps = [bounds.randomization_bound(dist, y, m) for y, m in targets]
    return table, reps


def _region_reports(args):
    spec = regions.read_region(args.region)
    records = load_records(args)
    table = regions.coarsen(records, spec)
    sp = regions.SetProbabilities.from_records(records, spec)
    if args.assume_monotone_m:
        return table, [regions.set_monotone_bound(sp)]
    return table, [regions.set_bound(sp)]


def cmd_detect(args) -> int:
    _no_grids(args)
    if args.region:
        table, reps = _region_reports(args)
    else:
        table, reps = _binary_reports(args, list(bounds.SCAN_ORDER))
    docs = [attach_inference(r, table, args) for r in reps]
    emit({"command": "detect", "reports": docs}, args.output)
    return EXIT_OK if any(d["significant"] for d in docs) else EXIT_NOTHING_DETECTED


def cmd_bound(args) -> int:
    _no_grids(args)
    if args.region:
        table, reps = _region_reports(args)
    else:
        table, reps = _binary_reports(args, _targets(args))
    docs = [attach_inference(r, table, args) for r in reps]
    emit({"command": "bound", "reports": docs}, args.output)
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    if not args.assume_monotone_m:
        raise ConfigConflictError("sensitivity analysis departs from M1 >= M0; pass --assume-monotone-m")
    r_grid = parse_grid(args.r_grid or "0")
    q_grid = parse_grid(args.q_grid or "0")
    cells = []
    if args.region:
        spec = regions.read_region(args.region)
        sp = regions.SetProbabilities.from_records(load_records(args), spec)
        for r in r_grid:
            for q in q_grid:
                try:
                    rep = regions.set_sensitivity_adjust(sp, params=bounds.SensitivityParams(r, q))
                    cells.append(bounds.SweepCell(r, q, report=rep))
                except PsdetectError as exc:
                    cells.append(bounds.SweepCell(r, q, error=str(exc)))
    else:
        if args.y is None or args.m is None:
            raise ConfigConflictError("sensitivity needs --y and --m")
        dist = estimate_dist(load_table(args))
        cells = bounds.sensitivity_sweep(dist, args.y, args.m, r_grid, q_grid)
    rows = []
    for c in cells:
        row = {"r": float(c.r), "q": float(c.q), "valid": c.valid}
        if c.valid:
            d = c.report.to_dict()
            row.update(adjusted=d["statistic"], standardized=d["lower_std"], denominator=d["denominator"])
        else:
            row["error"] = c.error
        rows.append(row)
    emit({"command": "sensitivity", "rows": rows}, args.output)
    return EXIT_OK


def cmd_pleiotropy(args) -> int:
    _no_grids(args)
    table = load_table(args, two_outcomes=True)
    dist = pleiotropy.PleioDist.from_table(table)
    variants = [args.variant] if args.variant else list(pleiotropy.VARIANTS)
    docs = [attach_inference(pleiotropy.pleiotropy_test(dist, v), table, args) for v in variants]
    emit({"command": "pleiotropy", "reports": docs}, args.output)
    return EXIT_OK if any(d["significant"] for d in docs) else EXIT_NOTHING_DETECTED


def cmd_coarsen(args) -> int:
    if not args.region:
        raise ConfigConflictError("coarsen needs --region")
    table = regions.coarsen(load_records(args), regions.read_region(args.region))
    if args.output == "json":
        emit(table.to_json_dict(), "json")
    else:
        rows = [{"x": x, "m": m, "y": y, "count": table.counts[(x, m, y)]}
                for (x, m, y) in sorted(table.counts, reverse=True)]
        emit({"rows": rows}, "tsv")
    return EXIT_OK


def cmd_simulate(args) -> int:
    summary = run_oracle(seed=args.seed, n_populations=args.n, pop_size=args.pop_size)
    doc = summary.to_dict()
    if not args.check_identities:
        doc["note"] = "identity checks always run; --check-identities only makes that explicit"
    emit(doc, "json")
    return EXIT_OK if summary.ok else EXIT_ERROR


def reproduce_yerushalmy(level: float = 0.95) -> dict:
    """The four headline numbers for the bundled smoking / birth weight / mortality table."""
    table = yerushalmy()
    items = [
        ("conditional risk difference of death among low birth weight infants",
         inference.conditional_risk_difference(1, 1), "two"),
        ("monotone contrast y=0, m=1 (smoking prevents death among low birth weight)",
         inference.monotone_contrast(0, 1), "one-lower"),
        ("monotone contrast y=1, m=1 (smoking causes death among low birth weight)",
         inference.monotone_contrast(1, 1), "one-lower"),
        ("swapped roles y=0, m=0 (smoking causes low birth weight among survivors)",
         inference.swapped_monotone_contrast(0, 0), "one-lower"),
    ]
    rows = []
    for name, contrast, sided in items:
        est = contrast.estimate(table)
        ci = inference.wald_ci(contrast, table, level, sided)
        rows.append({
            "quantity": name,
            "estimate": round(float(est), 4),
            "estimate_exact": f"{est.numerator}/{est.denominator}",
            "se": round(ci.se, 6),
            "ci": ci.to_dict(),
            "p_value": inference.test_null(contrast, table),
        })
    return {"command": "reproduce", "dataset": "yerushalmy", "rows": rows}


def cmd_reproduce(args) -> int:
    doc = reproduce_yerushalmy(args.level)
    if args.output == "tsv":
        flat = [{"quantity": r["quantity"], "estimate": r["estimate"], "ci_lower": r["ci"]["lower"],
                 "ci_upper": r["ci"]["upper"], "sided": r["ci"]["sided"]} for r in doc["rows"]]
        emit({"rows": flat}, "tsv")
    else:
        emit(doc, "json")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def _common(p, data_required=True):
    p.add_argument("--data", required=data_required, help="path to a table/microdata file, or 'yerushalmy'")
    p.add_argument("--format", choices=("csv", "json"), help="input format (default: from the suffix)")
    p.add_argument("--output", choices=("json", "tsv"), default="json")


def _inference_flags(p):
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--one-sided", action="store_true", help="one-sided lower interval")
    p.add_argument("--bootstrap", type=int, default=0, metavar="N", help="percentile bootstrap with N replicates")
    p.add_argument("--seed", type=int, default=0)


def _analysis_flags(p, targets=True):
    if targets:
        p.add_argument("--y", type=int, choices=(0, 1))
        p.add_argument("--m", type=int, choices=(0, 1))
    p.add_argument("--assume-monotone-m", action="store_true",
                   help="assert that treatment never prevents the mediator (M1 >= M0)")
    p.add_argument("--denominator", choices=tuple(DENOMINATOR_FLAGS), default="control-arm")
    p.add_argument("--swap-roles", action="store_true", help="interchange mediator and outcome")
    p.add_argument("--region", help="region spec JSON (microdata input)")
    p.add_argument("--r-grid")
    p.add_argument("--q-grid")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psdetect", description="Detect and bound individual-level direct effects.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="scan all four (y, m) targets")
    _common(p)
    _analysis_flags(p, targets=False)
    _inference_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("bound", help="lower bounds for one (y, m) target or all four")
    _common(p)
    _analysis_flags(p)
    _inference_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sensitivity", help="sweep sensitivity parameters (r, q)")
    _common(p)
    _analysis_flags(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("pleiotropy", help="detect effects of treatment on both of two outcomes")
    _common(p)
    p.add_argument("--variant", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--r-grid")
    p.add_argument("--q-grid")
    _inference_flags(p)
    p.set_defaults(func=cmd_pleiotropy)

    p = sub.add_parser("coarsen", help="tally microdata into a binary membership table")
    _common(p)
    p.add_argument("--region", required=True)
    p.set_defaults(func=cmd_coarsen)

    p = sub.add_parser("simulate", help="exact identity and bound checks on random populations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000, help="populations per family")
    p.add_argument("--pop-size", type=int, default=100)
    p.add_argument("--check-identities", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="reproduce the bundled dataset analysis")
    p.add_argument("dataset", choices=("yerushalmy",))
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--output", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PsdetectError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"psdetect: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
