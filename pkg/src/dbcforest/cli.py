"""Command line interface: ``dbcforest {train,predict,analyze,stats,bench}``."""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
import time

import numpy as np

from . import bench, stats
from .cascade import (HALVE_ERROR, STRATEGIES, STRATEGY_ALIASES, TA_MODES, CascadeConfig,
                      fit, predict, write_diagnostics)
from .data import DataError, load_csv
from .persistence import ModelFormatError, load_model, save_model
from .screening import compare_thresholds, read_trace, write_trace

log = logging.getLogger("dbcforest")

STRATEGY_CHOICES = sorted(set(STRATEGIES) | set(STRATEGY_ALIASES))


def _label_column(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def _add_data_args(p):
    p.add_argument("--data", required=True, help="CSV file")
    p.add_argument("--label-column", type=_label_column, default=-1,
                   help="label column index or header name (default: last)")
    p.add_argument("--header", action="store_true", help="first row is a header")


def _add_config_args(p):
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, default="dbc")
    p.add_argument("--trees", type=int, default=50, help="trees per cascade forest")
    p.add_argument("--folds", type=int, default=3, help="CV folds inside each level")
    p.add_argument("--bin-size", type=int, default=100)
    p.add_argument("--ta-mode", choices=TA_MODES, default=HALVE_ERROR)
    p.add_argument("--ta", type=float, default=None, help="fixed target accuracy")
    p.add_argument("--max-levels", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--scan", action="store_true", help="multi-grained scanning")
    p.add_argument("--scan-windows", type=lambda s: [int(w) for w in s.split(",")],
                   default=None, help="comma-separated window sizes")
    p.add_argument("--scan-trees", type=int, default=30)
    p.add_argument("--scan-stride", type=int, default=1)
    p.add_argument("--scan-folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> CascadeConfig:
    return CascadeConfig(
        strategy=args.strategy, trees_per_forest=args.trees, folds=args.folds,
        bin_size=args.bin_size, ta_mode=args.ta_mode, target_accuracy=args.ta,
        max_levels=args.max_levels, max_depth=args.max_depth, scan=args.scan,
        scan_windows=args.scan_windows, scan_trees=args.scan_trees,
        scan_stride=args.scan_stride, scan_folds=args.scan_folds, seed=args.seed)


def _write_report(report: bench.RunReport, path):
    text = report.to_json() + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(_timing_path(path), "w", encoding="utf-8") as fh:
            json.dump(report.timing_dict(), fh, indent=2)
    else:
        sys.stdout.write(text)


def _timing_path(path: str) -> str:
    stem = path[:-5] if path.endswith(".json") else path
    return stem + ".timing.json"


def cmd_train(args) -> int:
    ds = load_csv(args.data, args.label_column, args.header)
    config = _config(args)
    if args.cv:
        reports = bench.cross_validate(ds, config, cv=args.cv, seed=args.seed,
                                       dataset_name=args.data)
        report = next(iter(reports.values()))
        _write_report(report, args.report)
        log.info("cv accuracy %s over %d folds", report.summary(), args.cv)
        if not args.model:
            return 0

    traces = []
    t0 = time.perf_counter()
    model, diags = fit(ds, config, callback=traces.append if args.trace else None)
    seconds = time.perf_counter() - t0
    pred, _ = predict(model, ds.features)
    save_model(model, args.model or "model.json")
    log.info("trained %d level(s) in %.2fs; wrote %s", model.depth, seconds,
             args.model or "model.json")
    if args.diagnostics:
        write_diagnostics(args.diagnostics, diags)
    if args.trace:
        write_trace(args.trace, traces[0].ranked)
    if not args.cv:
        fold = bench.FoldResult(0, 100.0 * float(np.mean(pred == ds.labels)), model.depth,
                                1.0, diags, 0.0, seconds)
        _write_report(bench.RunReport(args.data, config.to_dict(), args.seed, [fold]),
                      args.report)
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    if args.no_labels:
        X = np.loadtxt(args.data, delimiter=",", ndmin=2, skiprows=1 if args.header else 0)
        labels = None
    else:
        ds = load_csv(args.data, args.label_column, args.header, classes=model.label_names)
        X, labels = ds.features, ds.labels
    if X.shape[1] != model.feature_count:
        raise DataError(f"model expects {model.feature_count} features, "
                        f"data has {X.shape[1]}")
    classes, exit_level, conf = predict(model, X, return_confidence=True)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["id", "predicted", "confidence", "exit_level"])
        for i, (c, p, e) in enumerate(zip(classes, conf, exit_level)):
            w.writerow([i, model.label_names[c], repr(float(p)), int(e)])
    finally:
        if args.out:
            out.close()
    if labels is not None:
        log.info("accuracy %.4f on %d rows", float(np.mean(classes == labels)), len(labels))
    return 0


def cmd_analyze(args) -> int:
    ranked = read_trace(args.trace)
    table = compare_thresholds(ranked, args.ta, args.bin_size)
    if args.json:
        print(json.dumps(table, indent=2))
        return 0
    def fmt(v):
        if v is None:
            return "NONE"
        return f"{v:.6g}" if isinstance(v, float) else str(v)
    print(f"{'':<12}{'gate':>12}{'screened':>10}{'accuracy':>10}")
    print(f"{'prefix':<12}{fmt(table['prefix_gate']):>12}{table['prefix_screened']:>10}"
          f"{fmt(table['prefix_accuracy']):>10}")
    print(f"{'binning':<12}{fmt(table['binning_gate']):>12}{table['binning_screened']:>10}"
          f"{fmt(table['binning_accuracy']):>10}")
    print(f"mis-partitioned: {table['mis_partitioned']}  (n={table['n']}, "
          f"TA={args.ta}, bin size={args.bin_size})")
    return 0


def cmd_stats(args) -> int:
    out = {}
    if args.table:
        table = stats.read_table(args.table)
        N, k = table.accuracies.shape
        ranks = table.ranks()
        out["models"] = table.model_names
        out["mean_ranks"] = ranks.mean(axis=0).tolist()
        out["friedman"] = stats.friedman_statistic(table.accuracies)
        out["friedman_critical"] = args.f_critical
        out["nemenyi_cd"] = stats.nemenyi_cd(k, N, args.q)
        print(f"{'dataset':<16}" + "".join(f"{m:>12}" for m in table.model_names))
        for name, row in zip(table.dataset_names, ranks):
            print(f"{name:<16}" + "".join(f"{r:>12.2f}" for r in row))
        print(f"{'mean rank':<16}" + "".join(f"{r:>12.2f}" for r in out["mean_ranks"]))
        print(f"Friedman statistic {out['friedman']:.3f} "
              f"({'reject' if out['friedman'] > args.f_critical else 'accept'} "
              f"at critical {args.f_critical})")
        print(f"Nemenyi critical difference {out['nemenyi_cd']:.3f} (q={args.q})")
    if args.folds:
        cols, _, scores = stats.read_grid(args.folds)
        out["paired_t"] = {}
        for i, j in itertools.combinations(range(len(cols)), 2):
            t = stats.paired_t_statistic(scores[:, i], scores[:, j])
            out["paired_t"][f"{cols[i]}|{cols[j]}"] = t
            print(f"paired t {cols[i]} vs {cols[j]}: {t:.3f} "
                  f"({'Y' if t > args.t_critical else 'N'})")
    if not out:
        raise DataError("stats needs --table and/or --folds")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
    return 0


def cmd_bench(args) -> int:
    if args.data:
        ds = load_csv(args.data, args.label_column, args.header)
        name = args.data
    else:
        ds = bench.builtin_dataset(args.dataset, seed=args.seed)
        name = args.dataset
    config = _config(args)
    strategies = [s.strip() for s in args.strategies.split(",")]
    reports = bench.cross_validate(ds, config, cv=args.cv, seed=args.seed,
                                   strategies=strategies, dataset_name=name)
    print(bench.comparison_table(reports))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({s: r.to_dict(timing=True) for s, r in reports.items()}, fh, indent=2)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbcforest",
                                     description="Deep forest with confidence screening")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a cascade (optionally cross-validate)")
    _add_data_args(p)
    _add_config_args(p)
    p.add_argument("--cv", type=int, default=0, help="report k-fold CV accuracy")
    p.add_argument("--model", help="model output path (.json or .json.gz)")
    p.add_argument("--report", help="report JSON path (default: stdout)")
    p.add_argument("--diagnostics", help="per-level diagnostics CSV")
    p.add_argument("--trace", help="level-1 confidence trace CSV for `analyze`")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a saved model")
    p.add_argument("--model", required=True)
    _add_data_args(p)
    p.add_argument("--no-labels", action="store_true", help="data has no label column")
    p.add_argument("--out", help="predictions CSV (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="compare prefix and binning gates on a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--ta", type=float, required=True)
    p.add_argument("--bin-size", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stats", help="Friedman / Nemenyi / paired t statistics")
    p.add_argument("--table", help="CSV: dataset rows x model columns (accuracy %%)")
    p.add_argument("--folds", help="CSV: fold rows x model columns for paired t")
    p.add_argument("--q", type=float, default=stats.Q_CRITICAL)
    p.add_argument("--f-critical", type=float, default=stats.F_CRITICAL)
    p.add_argument("--t-critical", type=float, default=stats.T_CRITICAL)
    p.add_argument("--json", help="also write the statistics to this JSON file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="cross-validate several strategies side by side")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dataset", default="iris", help="digits, iris or synthetic")
    g.add_argument("--data", help="CSV file instead of a builtin dataset")
    p.add_argument("--label-column", type=_label_column, default=-1)
    p.add_argument("--header", action="store_true")
    _add_config_args(p)
    p.add_argument("--strategies", default="gcforest,gccs,dbc")
    p.add_argument("--cv", type=int, default=5)
    p.add_argument("--out", help="write all reports (with timings) as JSON")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (DataError, ModelFormatError, ValueError, OSError) as exc:
        print(f"dbcforest: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
