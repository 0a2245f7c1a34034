"""Command-line interface for training, prediction, and the benchmark studies."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .data import impute_missing, load_csv, save_dataset_csv, save_dataset_json
from .diversity import dissimilarity_matrix, mean_pairwise_dissimilarity, \
    save_dissimilarity_csv
from .forest import METHODS, ForestConfig, fit_forest, load_forest, predict_rows, \
    save_forest
from .harness import StudyConfig, PAPER_REPETITIONS, run_study
from .report import format_table, write_report
from .simulate import SimSpec
from .tree import GrowthParams


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetforest",
        description="Tree ensembles with depth-weighted feature sampling, "
                    "plus the benchmark studies around them.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="emit a synthetic dataset")
    sim.add_argument("--kind", choices=("sim1", "sim2"), default="sim1")
    sim.add_argument("--n", type=int, default=1000, help="sample count")
    sim.add_argument("--features", type=int, default=30, help="sim2 feature count")
    sim.add_argument("--n-informative", type=int, default=30,
                     help="sim2 informative feature count")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", required=True, help="output file path")

    fit = sub.add_parser("fit", help="train a forest on a CSV and serialize it")
    _add_data_flags(fit)
    fit.add_argument("--method", choices=METHODS, default="hrf")
    _add_forest_flags(fit)
    fit.add_argument("--min-samples-split", type=int, default=2)
    fit.add_argument("--max-depth", type=int, default=None)
    fit.add_argument("--min-impurity-decrease", type=float, default=0.0)
    fit.add_argument("--out", required=True, help="forest JSON path")

    pred = sub.add_parser("predict", help="predict labels for a CSV of features")
    pred.add_argument("--forest", required=True, help="forest JSON path")
    pred.add_argument("--data", required=True, help="CSV of feature columns")
    pred.add_argument("--out", default=None, help="predictions CSV (default stdout)")

    div = sub.add_parser("diversity", help="pairwise dissimilarity of a forest")
    div.add_argument("--forest", required=True, help="forest JSON path")
    div.add_argument("--beta", type=int, default=1)
    div.add_argument("--out", required=True, help="output directory")

    study = sub.add_parser("study", help="run one of the simulation studies")
    study.add_argument("kind", choices=("bias", "diversity", "noise"))
    study.add_argument("--reps", type=int, default=None)
    study.add_argument("--samples", type=int, default=1000)
    study.add_argument("--features", type=int, default=30,
                       help="noise study: total feature count")
    _add_forest_flags(study)
    study.add_argument("--paper-scale", action="store_true",
                       help="use the publication repetition counts")
    study.add_argument("--no-plots", action="store_true")
    study.add_argument("--out", required=True, help="output directory")

    comp = sub.add_parser("compare", help="repeated-split method comparison on a CSV")
    _add_data_flags(comp)
    comp.add_argument("--methods", default="bagging,rf,hrf",
                      help="comma-separated subset of bagging,rf,hrf")
    comp.add_argument("--reps", type=int, default=None)
    _add_forest_flags(comp)
    comp.add_argument("--folds", type=int, default=5)
    comp.add_argument("--train-fraction", type=float, default=0.8)
    comp.add_argument("--tune-once", action="store_true",
                      help="tune hrf on the first split only")
    comp.add_argument("--paper-scale", action="store_true")
    comp.add_argument("--no-plots", action="store_true")
    comp.add_argument("--out", required=True, help="output directory")

    prof = sub.add_parser("noise-profile",
                          help="estimate the noise-feature share of a CSV")
    _add_data_flags(prof)
    prof.add_argument("--seed", type=int, default=0)
    prof.add_argument("--no-plots", action="store_true")
    prof.add_argument("--out", required=True, help="output directory")

    return parser


def _add_data_flags(cmd):
    cmd.add_argument("--data", required=True, help="CSV path")
    cmd.add_argument("--target", required=True, help="target column name")
    cmd.add_argument("--missing-token", default="", help="cell text marking missing")


def _add_forest_flags(cmd):
    cmd.add_argument("--trees", type=int, default=100)
    cmd.add_argument("--m", type=int, default=None, help="candidate features per node")
    cmd.add_argument("--alpha", type=float, default=0.5)
    cmd.add_argument("--beta", type=int, default=1)
    if not any(a.dest == "seed" for a in cmd._actions):
        cmd.add_argument("--seed", type=int, default=0)


def _cmd_simulate(args) -> int:
    spec = SimSpec(kind=args.kind, n=args.n, p=args.features,
                   n_informative=args.n_informative, seed=args.seed)
    data = spec.generate()
    if args.format == "csv":
        save_dataset_csv(data, args.out)
    else:
        save_dataset_json(data, args.out)
    print(f"wrote {data.n}x{data.p} dataset ({args.kind}) to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    data = impute_missing(load_csv(args.data, args.target, args.missing_token))
    growth = GrowthParams(min_samples_split=args.min_samples_split,
                          max_depth=args.max_depth,
                          min_impurity_decrease=args.min_impurity_decrease)
    config = ForestConfig(method=args.method, n_trees=args.trees, m=args.m,
                          alpha=args.alpha, beta=args.beta, growth=growth,
                          seed=args.seed)
    forest = fit_forest(data, np.arange(data.n), config)
    save_forest(forest, args.out)
    print(f"trained {config.method} with {forest.n_trees} trees "
          f"on {data.n}x{data.p} rows; wrote {args.out}")
    return 0


def _cmd_predict(args) -> int:
    forest = load_forest(args.forest)
    features, names = _read_feature_matrix(args.data, forest)
    predicted = predict_rows(forest, features)
    class_names = forest.class_names or [str(k) for k in range(forest.n_classes)]
    rows = [[i, int(label), class_names[label]] for i, label in enumerate(predicted)]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "class_id", "class_name"])
            writer.writerows(rows)
        print(f"wrote {len(rows)} predictions to {args.out}")
    else:
        print(format_table("predictions", {
            "columns": ["row", "class_id", "class_name"], "rows": rows}, max_rows=None))
    return 0


def _read_feature_matrix(path, forest):
    """Numeric feature matrix matching the forest's columns (extras ignored)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("CSV is empty: no header row")
        header = [h.strip() for h in header]
        rows = list(reader)
    if not rows:
        raise ValueError("CSV has no data rows")
    names = forest.feature_names
    if names and all(n in header for n in names):
        take = [header.index(n) for n in names]
    elif len(header) == forest.n_features:
        take = list(range(len(header)))
        names = header
    else:
        raise ValueError(
            f"CSV columns do not match the forest's {forest.n_features} features")
    out = np.empty((len(rows), len(take)), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"row {i + 2} has {len(row)} cells, expected {len(header)}")
        try:
            out[i] = [float(row[j]) for j in take]
        except ValueError:
            raise ValueError(f"non-numeric feature cell at row {i + 2}") from None
    return out, names


def _cmd_diversity(args) -> int:
    forest = load_forest(args.forest)
    matrix = dissimilarity_matrix(forest, args.beta)
    mean_ds, skipped = mean_pairwise_dissimilarity(forest, args.beta)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_dissimilarity_csv(matrix, out / "dissimilarity_matrix.csv")
    summary = {"mean_ds": mean_ds, "skipped_pairs": skipped, "n_trees": forest.n_trees}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                      encoding="utf-8")
    print(f"mean dissimilarity {mean_ds:.4f} over "
          f"{forest.n_trees * (forest.n_trees - 1) // 2 - skipped} pairs "
          f"({skipped} skipped); wrote {out}")
    return 0


def _cmd_study(args) -> int:
    reps = args.reps
    if reps is None and args.paper_scale:
        reps = PAPER_REPETITIONS[args.kind]
    cfg = StudyConfig(study=args.kind, repetitions=reps, samples=args.samples,
                      features=args.features, trees=args.trees, m=args.m,
                      alpha=args.alpha, beta=args.beta, seed=args.seed)
    return _emit_report(cfg, args.out, not args.no_plots)


def _cmd_compare(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    reps = args.reps
    if reps is None and args.paper_scale:
        reps = PAPER_REPETITIONS["compare"]
    cfg = StudyConfig(study="compare", methods=methods, repetitions=reps,
                      trees=args.trees, m=args.m, alpha=args.alpha, beta=args.beta,
                      seed=args.seed, train_fraction=args.train_fraction,
                      folds=args.folds, tune_once=args.tune_once,
                      csv_path=args.data, target_column=args.target,
                      missing_token=args.missing_token)
    return _emit_report(cfg, args.out, not args.no_plots)


def _cmd_noise_profile(args) -> int:
    cfg = StudyConfig(study="noise_profile", seed=args.seed, csv_path=args.data,
                      target_column=args.target, missing_token=args.missing_token)
    return _emit_report(cfg, args.out, not args.no_plots)


def _emit_report(cfg: StudyConfig, out_dir, plots: bool) -> int:
    report = run_study(cfg)
    written = write_report(report, out_dir, plots=plots)
    for name, table in report.tables.items():
        if name == "tree_feature_depths":
            continue  # thousands of rows; the CSV has them all
        print(format_table(name, table))
        print()
    print("summary:", json.dumps(report.summary, indent=2))
    print("wrote:", ", ".join(str(p) for p in written))
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "diversity": _cmd_diversity,
    "study": _cmd_study,
    "compare": _cmd_compare,
    "noise-profile": _cmd_noise_profile,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
