"""Command-line interface: ``logitdiag {describe,tabulate,fit,simulate,validate}``.

Exit codes: 0 success, 1 input or usage error, 2 statistical warning
(separation detected; the report is still printed), 3 failed validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import (
    DataError,
    describe_all,
    load_csv,
    load_schema,
    schema_to_json,
    tabulate,
    write_csv,
)
from .diagnostics import DegenerateBinError
from .estimator import FitConfig, FitError
from .report import build_report, render_descriptives, render_text
from .simulate import SpecError, generate, load_synth_spec
from .validation import run_battery

EXIT_OK, EXIT_INPUT, EXIT_SEPARATION, EXIT_VALIDATION = 0, 1, 2, 3


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, allow_nan=False, default=_json_default)
    sys.stdout.write("\n")


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _nan_to_none(obj):
    if isinstance(obj, float) and obj != obj:
        return None
    if isinstance(obj, dict):
        return {k: _nan_to_none(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_nan_to_none(v) for v in obj]
    return obj


def _load(args):
    return load_csv(args.csv, load_schema(args.schema))


def cmd_describe(args) -> int:
    ds = _load(args)
    rows = describe_all(ds)
    descriptions = {s.name: s.description for s in ds.specs}
    if args.json:
        _emit_json(_nan_to_none({
            r.variable: {**r.to_dict(), "description": descriptions[r.variable]} for r in rows
        }))
    else:
        print(render_descriptives(rows, descriptions))
    return EXIT_OK


def cmd_tabulate(args) -> int:
    ds = _load(args)
    edges = None
    if args.edges:
        try:
            edges = [float(v) for v in args.edges.split(",")]
        except ValueError:
            raise DataError(f"--edges must be comma-separated numbers, got {args.edges!r}") from None
    table = tabulate(ds, args.variable, edges)
    if args.json:
        _emit_json({table.variable: table.to_dict()})
    else:
        width = max(len("Bin"), *(len(label) for label, _, _ in table.bins))
        print(f"{table.variable} (n = {table.n})")
        print(f"{'Bin':<{width}}  {'Count':>6}  {'%':>7}")
        for label, count, pct in table.bins:
            print(f"{label:<{width}}  {count:>6}  {pct:>7.2f}")
    return EXIT_OK


def cmd_fit(args) -> int:
    ds = _load(args)
    cfg = FitConfig(max_iterations=args.max_iter, tolerance=args.tol, ridge=args.ridge)
    doc = build_report(ds, cv_threshold=args.cv_threshold, hl_groups=args.hl_groups,
                       alpha=args.alpha, cfg=cfg)
    if args.json:
        _emit_json(_nan_to_none(doc.to_dict()))
    else:
        sys.stdout.write(render_text(doc))
    return EXIT_SEPARATION if doc.separation else EXIT_OK


def cmd_simulate(args) -> int:
    spec = load_synth_spec(args.spec)
    if args.seed is not None:
        spec = spec.with_(seed=args.seed)
    ds = generate(spec, args.replicate)
    out = Path(args.out)
    with out.open("w", encoding="utf-8", newline="") as fh:
        write_csv(ds, fh)
    schema_path = Path(args.schema_out) if args.schema_out else out.with_suffix(".schema.json")
    schema_path.write_text(json.dumps(schema_to_json(ds.specs), indent=2) + "\n", encoding="utf-8")
    print(f"seed {spec.seed}, replicate {args.replicate}: wrote {ds.n} rows to {out} "
          f"(schema {schema_path}); response rate {ds.y.mean():.4f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = FitConfig(step_halving=args.inject_fault != "no-step-halving")
    checks = run_battery(seed=args.seed, replicates=args.replicates, cfg=cfg,
                         n_jobs=args.jobs, monte_carlo=not args.quick)
    if args.json:
        _emit_json(_nan_to_none({"checks": [c.to_dict() for c in checks],
                                 "passed": all(c.passed for c in checks)}))
    else:
        for c in checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail} ({c.seconds:.1f}s)")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logitdiag",
        description="Binary logit regression with goodness-of-fit and association diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("csv", help="comma-separated data file with a header row")
        p.add_argument("schema", help="JSON schema: list of {name, role, description}")
        p.add_argument("--json", action="store_true", help="emit JSON instead of a text table")

    p = sub.add_parser("describe", help="standard deviation, mean and CV per variable")
    data_args(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("tabulate", help="frequency table of one variable")
    data_args(p)
    p.add_argument("variable")
    p.add_argument("--edges", help="comma-separated bin edges for continuous variables (write --edges=-5,0,5 when the first edge is negative)")
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("fit", help="screen, fit and report the logit model")
    data_args(p)
    p.add_argument("--cv-threshold", type=float, default=10.0,
                   help="exclude predictors with CV below this percentage (0 disables)")
    p.add_argument("--hl-groups", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--ridge", type=float, default=0.0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="generate a dataset from a JSON specification")
    p.add_argument("spec")
    p.add_argument("out")
    p.add_argument("--seed", type=int, help="override the spec's seed")
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--schema-out", help="schema path (default: <out>.schema.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the oracle and Monte Carlo validation battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quick", action="store_true", help="skip the Monte Carlo checks")
    p.add_argument("--json", action="store_true")
    p.add_argument("--inject-fault", choices=["no-step-halving"], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (DataError, SpecError, FitError, DegenerateBinError, OSError, ValueError) as exc:
        print(f"logitdiag {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
