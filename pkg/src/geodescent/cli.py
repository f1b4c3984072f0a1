"""Command-line entry point.

Subcommands: ``run`` one config, ``batch`` a directory of configs,
``validate`` a config, ``fit`` a power law to a trace, ``compare`` traces.
Exit codes: 0 ok, 1 guarantee violation, 2 usage/config error.  Relative
output paths resolve under --out-root (or $GEODESCENT_OUTPUT_ROOT).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from geodescent import harness
from geodescent.traces import load_trace, trace_to_csv, write_plot_data


def _out_root(args) -> str:
    return args.out_root or os.environ.get(harness.OUTPUT_ROOT_ENV) or "."


def _cmd_run(args) -> int:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", harness.ConfigWarning)
            cfg = harness.load_config(args.config)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        result = harness.run_experiment(cfg, _out_root(args))
    except harness.ConfigError as e:
        for v in e.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2
    print(f"trace:  {result.trace_path}")
    print(f"report: {result.report_path}")
    for name, g in result.report["guarantees"].items():
        status = {True: "pass", False: "FAIL", None: "void"}[g["pass"]]
        slack = "n/a" if g["worst_slack"] is None else f"{g['worst_slack']:.3e}"
        print(f"  {name:<20} {status:<5} worst slack {slack}")
    for err in result.report["errors"]:
        print(f"  error: {err}", file=sys.stderr)
    return result.exit_code


def _cmd_batch(args) -> int:
    paths = sorted(
        os.path.join(args.directory, p)
        for p in os.listdir(args.directory)
        if p.endswith((".yaml", ".yml"))
    )
    if not paths:
        print(f"no configs found in {args.directory}", file=sys.stderr)
        return 2
    worst = 0
    for p in paths:
        ns = argparse.Namespace(config=p, out_root=args.out_root)
        code = _cmd_run(ns)
        print(f"[{p}] exit {code}")
        worst = max(worst, code)
    return worst


def _cmd_validate(args) -> int:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", harness.ConfigWarning)
            harness.load_config(args.config)
        for w in caught:
            print(f"warning: {w.message}")
    except harness.ConfigError as e:
        for v in e.violations:
            print(f"invalid: {v}")
        return 2
    print("ok")
    return 0


def _cmd_fit(args) -> int:
    try:
        data = load_trace(args.trace)
        fit = harness.fit_rate(data, args.k_from, args.k_to)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(json.dumps({"slope": fit.slope, "intercept": fit.intercept,
                      "r2": fit.r2, "window": list(fit.window)}, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    try:
        traces = [load_trace(p) for p in args.traces]
        labels = [os.path.splitext(os.path.basename(p))[0] for p in args.traces]
        cmp = harness.compare_report(traces, labels)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    root = _out_root(args)
    os.makedirs(root, exist_ok=True)
    csv_path = os.path.join(root, "comparison.csv")
    with open(csv_path, "w") as fh:
        fh.write(cmp.csv_text())
    for data, label in zip(traces, labels):
        write_plot_data(data, os.path.join(root, f"{label}.dat"))
    print(cmp.table_text())
    print(f"csv: {csv_path}")
    return 0


def _cmd_export(args) -> int:
    try:
        data = load_trace(args.trace)
        trace_to_csv(data, args.csv)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"csv: {args.csv}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="geodescent",
                                     description="Certified Riemannian descent experiments")
    parser.add_argument("--out-root", default=None,
                        help=f"output root (default: ${harness.OUTPUT_ROOT_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("config")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("batch", help="run every config in a directory")
    p.add_argument("directory")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("validate", help="validate a config without running it")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("fit", help="fit a power law to a trace's gap")
    p.add_argument("trace")
    p.add_argument("--from", dest="k_from", type=int, required=True)
    p.add_argument("--to", dest="k_to", type=int, required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("compare", help="tabulate several traces against the first")
    p.add_argument("traces", nargs="+")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("export", help="export a trace to CSV")
    p.add_argument("trace")
    p.add_argument("csv")
    p.set_defaults(func=_cmd_export)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
