#!/usr/bin/env python3
"""
CLI Tool for Non-Markovianity Witnesses

Usage:
    python run.py run configs/dephasing_sin.json
    python run.py sweep configs/lorentzian_weak.json --param model.bath.gamma_m --values 0.05 0.25 1 4 --out sweep.csv
    python run.py plot dephasing_sin_trajectory.csv --cols f vol --out dephasing.svg
    python run.py list-models

Exit codes: 0 clean, 3 a witness flagged a violation, 2 configuration or
input error, 4 numerical failure.
"""

import argparse
import json
import logging
import sys
from typing import Any, List, Optional

from src.batch.catalog import catalog_json, catalog_text
from src.batch.plotting import plot_csv
from src.batch.runner import run_file, sweep
from src.exceptions import NonMarkovError, NumericalError
from src.settings import get_settings
from src.witness.report import WitnessReport

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
EXIT_NUMERICAL = 4


def print_report(report: WitnessReport):
    """Print one line per witness plus the summary messages"""
    print(f"\n🔬 {report.scenario}  ({report.family}, d = {report.dim}, route {report.route})")
    for record in report.records:
        if not record.applicable:
            print(f"   ➖ {record.name:18s} inapplicable: {record.reason}")
        elif record.violated:
            print(f"   ⚠️  {record.name:18s} violated from t = {record.first_violation_time:.6g}")
        else:
            print(f"   ✅ {record.name:18s} monotone")

    print("\n" + "=" * 60)
    for message in report.summary.messages:
        print(f"📋 {message}")


def run_command(args) -> int:
    """Run one scenario"""
    result = run_file(args.config, out_dir=args.out_dir)
    print_report(result.report)
    print()
    for kind, path in result.outputs.items():
        print(f"💾 {kind}: {path}")
    return EXIT_VIOLATION if result.report.any_violation else EXIT_OK


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def sweep_command(args) -> int:
    """Run one scenario per parameter value"""
    values = [_parse_value(v) for v in args.values]
    print(f"\n📄 Sweeping {args.param} over {len(values)} values...")
    reports = sweep(args.config, args.param, values, args.out)

    print("\n" + "=" * 60)
    print("📊 Summary")
    print("=" * 60)
    for value, report in zip(values, reports):
        flagged = [r.name for r in report.records if r.violated]
        status = "⚠️  " + ", ".join(flagged) if flagged else "✅ no violation"
        print(f"  {json.dumps(value):24s} {status}")
    print(f"\n💾 summary: {args.out}")
    return EXIT_VIOLATION if any(r.any_violation for r in reports) else EXIT_OK


def plot_command(args) -> int:
    """Plot trajectory CSV columns to SVG"""
    columns = [c for item in args.cols for c in item.split(",") if c]
    path = plot_csv(args.csv, columns, args.out)
    print(f"📈 Plotted {', '.join(columns)} -> {path}")
    return EXIT_OK


def list_models_command(args) -> int:
    """List built-in families"""
    if args.json:
        print(catalog_json())
    else:
        print(catalog_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Non-Markovianity witnesses for quantum dynamical maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run.py run configs/dephasing_markovian.json --out-dir out
  python run.py run configs/pauli_eternal.json
  python run.py sweep configs/lorentzian_weak.json --param model.bath.gamma_m --values 0.05 0.25 1 4 --out out/sweep.csv
  python run.py plot out/dephasing_markovian_trajectory.csv --cols f lambda_abs_1 --out out/f.svg
  python run.py list-models --json
        """
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    run_parser = subparsers.add_parser('run', help='Run one scenario')
    run_parser.add_argument('config', help='Scenario JSON file')
    run_parser.add_argument('--out-dir', default=None, help='Directory for outputs (default: next to the config)')

    sweep_parser = subparsers.add_parser('sweep', help='Run a scenario for each value of one parameter')
    sweep_parser.add_argument('config', help='Scenario JSON file')
    sweep_parser.add_argument('--param', required=True, help='Dotted parameter path, e.g. model.bath.gamma_m')
    sweep_parser.add_argument('--values', nargs='*', default=[], help='Values as JSON literals')
    sweep_parser.add_argument('--out', required=True, help='Summary CSV path')

    plot_parser = subparsers.add_parser('plot', help='Plot trajectory CSV columns')
    plot_parser.add_argument('csv', help='Trajectory CSV')
    plot_parser.add_argument('--cols', nargs='+', required=True, help='Column names (lambda_abs_<k> allowed)')
    plot_parser.add_argument('--out', required=True, help='Output SVG path')

    list_parser = subparsers.add_parser('list-models', help='List built-in families')
    list_parser.add_argument('--json', action='store_true', help='Machine-readable output with example scenarios')

    return parser


COMMANDS = {
    'run': run_command,
    'sweep': sweep_command,
    'plot': plot_command,
    'list-models': list_models_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    command = COMMANDS.get(args.command)
    if command is None:
        parser.print_help()
        return EXIT_INPUT

    try:
        return command(args)
    except NumericalError as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NonMarkovError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
