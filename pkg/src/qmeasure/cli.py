"""Command line runner: ``qmeasure {simulate,verify,sweep,sample} CONFIG``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical validity error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import scenario
from .errors import ConfigError, QMeasureError
from .sampling import empirical_parameters, sample_positions, write_samples_csv

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

TABLE_HEADER = ["field", "numeric", "reference", "abs_error", "rel_error", "passed"]


def _output_dir(config: scenario.ScenarioConfig, override: str | None) -> Path:
    out = Path(override or config.output["directory"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _figures_wanted(config: scenario.ScenarioConfig, args) -> bool:
    return bool(args.figures or config.output.get("figures"))


def _with_grid_n(config: scenario.ScenarioConfig, n: int | None) -> scenario.ScenarioConfig:
    if n is None:
        return config
    if not 64 <= n <= scenario.MAX_N:
        raise ConfigError(f"grid n must lie in [64, {scenario.MAX_N}], got {n}")
    return replace(config, n=n)


def _write_json(obj, path: Path) -> Path:
    path.write_text(scenario.as_json(obj) + "\n", encoding="utf-8")
    return path


def cmd_simulate(args) -> int:
    config = _with_grid_n(scenario.load_config(args.config), args.n)
    out = _output_dir(config, args.output_dir)
    result = scenario.simulate(config)
    written = [_write_json(result.report(), out / config.output["report"])]
    fields = args.fields or config.output.get("fields_csv")
    if fields:
        result.write_fields_csv(out / fields)
        written.append(out / fields)
    if _figures_wanted(config, args):
        from .plotting import plot_readings
        written.append(plot_readings(result, out / f"{config.name}_readings.png"))
    for path in written:
        print(path)
    return EXIT_OK


def _table_rows(rows: list[scenario.Comparison]) -> list[list]:
    return [[r.field, repr(r.numeric), repr(r.reference), repr(r.abs_error),
             "" if r.rel_error is None else repr(r.rel_error), str(r.passed).lower()] for r in rows]


def cmd_verify(args) -> int:
    config = _with_grid_n(scenario.load_config(args.config), args.n)
    rows = scenario.verify(config, args.rtol, args.atol)
    table = _table_rows(rows)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    writer.writerows(table)
    target = args.table or config.output.get("table_csv")
    if target:
        path = _output_dir(config, args.output_dir) / target
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(TABLE_HEADER)
            w.writerows(table)
    failed = [r.field for r in rows if not r.passed]
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = scenario.load_config(args.config)
    if not args.sigma or not args.lam:
        raise ConfigError("sweep needs nonempty --sigma and --lambda lists")
    out = _output_dir(config, args.output_dir)
    rows = scenario.sweep(config, args.sigma, args.lam, args.mode, args.jobs)
    path = out / (args.csv or config.output["sweep_csv"])
    scenario.write_sweep_csv(rows, path)
    print(path)
    if _figures_wanted(config, args):
        from .plotting import plot_sweep
        print(plot_sweep(rows, out / f"{config.name}_sweep.png"))
    invalid = sum(not r["valid"] for r in rows)
    if invalid:
        print(f"{invalid} of {len(rows)} points flagged invalid", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    config = scenario.load_config(args.config)
    count = args.count if args.count is not None else config.sample_count
    seed = args.seed if args.seed is not None else config.seed
    if count is None or seed is None:
        raise ConfigError("sampling needs a count and a seed (config 'sampling' or --count/--seed)")
    out = _output_dir(config, args.output_dir)
    result = scenario.simulate(config)
    samples = sample_positions(result.reading_R, count, seed)
    path = out / config.output["samples_csv"]
    write_samples_csv(samples, path, config.name)
    mean, std, sem = empirical_parameters(samples)
    resolved = result.report()["config"]
    resolved["sampling"] = {"count": count, "seed": seed}
    summary = {
        "config": resolved, "samples_csv": str(path), "algorithm": samples.algorithm,
        "mean_x": mean, "std_x": std, "sem_x": sem,
        "reference_mean_x": result.params_R.mean_x, "reference_std_x": result.params_R.std_x,
    }
    print(json.dumps(summary, indent=2))
    if _figures_wanted(config, args):
        from .plotting import plot_samples
        plot_samples(samples, result.reading_R, out / f"{config.name}_samples.png")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmeasure", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_override=False):
        p.add_argument("config", help="scenario JSON file")
        p.add_argument("-o", "--output-dir", help="directory for output files (default: config output.directory)")
        if grid_override:
            p.add_argument("--n", type=int, help="grid points, overriding the config and the automatic choice")

    p = sub.add_parser("simulate", help="run one scenario and write its JSON report")
    common(p, grid_override=True)
    p.add_argument("--fields", metavar="CSV", help="also write x, rho_I, J_I, rho_R, J_R to this file")
    p.add_argument("--figures", action="store_true", help="render reading plots as PNG")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="compare the numerical report with the closed forms")
    common(p, grid_override=True)
    p.add_argument("--rtol", type=float, help="relative tolerance for nonzero targets")
    p.add_argument("--atol", type=float, help="absolute tolerance for zero targets")
    p.add_argument("--table", metavar="CSV", help="also write the comparison table to this file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="scan device widths and write one CSV row per (sigma, lambda)")
    common(p)
    p.add_argument("--sigma", type=float, nargs="*", default=[], help="density kernel widths")
    p.add_argument("--lambda", dest="lam", type=float, nargs="*", default=[], help="current kernel widths")
    p.add_argument("--mode", choices=("numeric", "analytic"), default="numeric")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--csv", help="output CSV name (default: config output.sweep_csv)")
    p.add_argument("--figures", action="store_true", help="render epsilon against sigma as PNG")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="draw positions from the recorded density")
    common(p)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--figures", action="store_true", help="render a histogram against rho_R as PNG")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QMeasureError as exc:
        print(f"numerical validity error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
