"""Benchmark driver: simulation studies, CV tuning, and method comparison."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .data import (Dataset, SplitPlan, impute_missing, kfold_indices, load_csv,
                   split_train_test)
from .diversity import mean_pairwise_dissimilarity
from .forest import METHODS, ForestConfig, accuracy, fit_forest, predict_rows
from .report import StudyReport, make_provenance
from .rng import NodeStreams
from .simulate import gen_sim1, gen_sim2, informative_count_for_ratio
from .stats import wilcoxon_signed_rank
from .tree import GrowthParams, feature_depths, grow_tree, impurity_importance

SIGNIFICANCE = 0.05
DESK_REPETITIONS = {"bias": 20, "diversity": 20, "noise": 10, "compare": 10}
PAPER_REPETITIONS = {"bias": 100, "diversity": 100, "noise": 100, "compare": 50}
DEFAULT_NOISE_RATIOS = tuple(i / 10 for i in range(10))
GRID_ALPHAS = tuple(i / 10 for i in range(10))


@dataclass
class StudyConfig:
    """Fully determines one study run; echoed verbatim into its report."""

    study: str
    methods: tuple[str, ...] = METHODS
    repetitions: int | None = None  # None -> desk-scale default for the study
    samples: int = 1000
    features: int = 30  # width of the noise-study design
    noise_ratios: tuple[float, ...] = DEFAULT_NOISE_RATIOS
    trees: int = 100
    m: int | None = None
    alpha: float = 0.5
    beta: int = 1
    seed: int = 0
    train_fraction: float | None = None  # None -> 0.7 for studies, 0.8 for compare
    folds: int = 5
    tune_once: bool = False
    csv_path: str | None = None
    target_column: str | None = None
    missing_token: str = ""

    def __post_init__(self):
        if not self.methods:
            raise ValueError("methods is empty")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
        if self.repetitions is not None and self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def resolved(self) -> "StudyConfig":
        reps = self.repetitions
        if reps is None:
            reps = DESK_REPETITIONS.get(self.study, 10)
        fraction = self.train_fraction
        if fraction is None:
            fraction = 0.8 if self.study == "compare" else 0.7
        return replace(self, repetitions=reps, train_fraction=fraction)

    def to_dict(self) -> dict:
        return {
            "study": self.study,
            "methods": list(self.methods),
            "repetitions": self.repetitions,
            "samples": self.samples,
            "features": self.features,
            "noise_ratios": [float(r) for r in self.noise_ratios],
            "trees": self.trees,
            "m": self.m,
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "folds": self.folds,
            "tune_once": self.tune_once,
            "csv_path": self.csv_path,
            "target_column": self.target_column,
            "missing_token": self.missing_token,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "StudyConfig":
        obj = dict(obj)
        obj["methods"] = tuple(obj["methods"])
        obj["noise_ratios"] = tuple(obj["noise_ratios"])
        return cls(**obj)


def _forest_config(cfg: StudyConfig, method: str, seed: int) -> ForestConfig:
    # bagging always offers every feature; an m override only narrows rf/hrf
    m = None if method == "bagging" else cfg.m
    return ForestConfig(method=method, n_trees=cfg.trees, m=m, alpha=cfg.alpha,
                        beta=cfg.beta, seed=seed)


def _rep_seeds(master: int, key: tuple[int, ...], count: int) -> list[int]:
    state = np.random.SeedSequence(master, spawn_key=key).generate_state(count, dtype=np.uint64)
    return [int(v) for v in state]


def run_bias_study(cfg: StudyConfig) -> StudyReport:
    """Where do features land in the trees?  Repeatedly fits each method on
    fresh shrinking-range simulation data and records every tree's
    earliest-use depth per feature."""
    cfg = cfg.resolved()
    names = [f"X{j + 1}" for j in range(5)]
    depth_rows = []
    sums = {method: np.zeros(5) for method in cfg.methods}
    counts = {method: 0 for method in cfg.methods}
    for rep in range(cfg.repetitions):
        sim_seed, split_seed, fit_seed = _rep_seeds(cfg.seed, (rep,), 3)
        data = gen_sim1(cfg.samples, sim_seed)
        plan = split_train_test(data, cfg.train_fraction, split_seed)
        for method in cfg.methods:
            forest = fit_forest(data, plan.train_indices, _forest_config(cfg, method, fit_seed))
            for t_idx, tree in enumerate(forest.trees):
                depths = feature_depths(tree, beta=1)
                depth_rows.append([method, rep, t_idx] + [float(v) for v in depths])
                sums[method] += depths
                counts[method] += 1

    mean_rows = []
    per_method = {}
    for method in cfg.methods:
        means = sums[method] / counts[method]
        spread = float(means.max() - means.min())
        mean_rows.append([method] + [float(v) for v in means] + [spread])
        per_method[method] = {"mean_depths": [float(v) for v in means], "spread": spread}

    summary = {"per_method": per_method}
    if "bagging" in per_method:
        means = per_method["bagging"]["mean_depths"]
        summary["bagging_depth_strictly_increasing"] = bool(
            all(means[j] < means[j + 1] for j in range(4)))
    if all(m in per_method for m in METHODS):
        spreads = {m: per_method[m]["spread"] for m in METHODS}
        summary["spread_ordering_hrf_rf_bagging"] = bool(
            spreads["hrf"] < spreads["rf"] < spreads["bagging"])
        summary["spreads"] = spreads

    tables = {
        "mean_feature_depth": {"columns": ["method"] + names + ["spread"], "rows": mean_rows},
        "tree_feature_depths": {"columns": ["method", "repetition", "tree"] + names,
                                "rows": depth_rows},
    }
    return StudyReport("bias", cfg.to_dict(), make_provenance(), summary, tables)


def run_diversity_study(cfg: StudyConfig) -> StudyReport:
    """Mean pairwise structural dissimilarity per method on the
    shrinking-range simulation."""
    cfg = cfg.resolved()
    rows = []
    series = {method: [] for method in cfg.methods}
    for rep in range(cfg.repetitions):
        sim_seed, split_seed, fit_seed = _rep_seeds(cfg.seed, (rep,), 3)
        data = gen_sim1(cfg.samples, sim_seed)
        plan = split_train_test(data, cfg.train_fraction, split_seed)
        for method in cfg.methods:
            forest = fit_forest(data, plan.train_indices, _forest_config(cfg, method, fit_seed))
            mean_ds, skipped = mean_pairwise_dissimilarity(forest, beta=1)
            rows.append([method, rep, float(mean_ds), int(skipped)])
            series[method].append(float(mean_ds))

    summary = {"mean_by_method": {m: float(np.mean(series[m])) for m in cfg.methods}}
    if all(m in series for m in METHODS):
        ordered = sum(1 for b, r, h in zip(series["bagging"], series["rf"], series["hrf"])
                      if b < r < h)
        summary["ordering_bagging_rf_hrf_repetitions"] = int(ordered)
        summary["repetitions"] = cfg.repetitions

    tables = {"dissimilarity": {
        "columns": ["method", "repetition", "mean_dissimilarity", "skipped_pairs"],
        "rows": rows,
    }}
    return StudyReport("diversity", cfg.to_dict(), make_provenance(), summary, tables)


def run_noise_study(cfg: StudyConfig) -> StudyReport:
    """Accuracy of hrf against bagging and rf as the share of pure-noise
    features grows."""
    cfg = cfg.resolved()
    needed = {"bagging", "rf", "hrf"}
    if not needed.issubset(cfg.methods):
        raise ValueError("noise study needs methods bagging, rf and hrf")
    rows = []
    per_ratio = []
    for ratio_idx, ratio in enumerate(cfg.noise_ratios):
        informative = informative_count_for_ratio(cfg.features, ratio)
        diffs_bagging = []
        diffs_rf = []
        for rep in range(cfg.repetitions):
            sim_seed, split_seed, fit_seed = _rep_seeds(cfg.seed, (ratio_idx, rep), 3)
            data = gen_sim2(cfg.samples, cfg.features, informative, sim_seed)
            plan = split_train_test(data, cfg.train_fraction, split_seed)
            acc = {}
            for method in ("bagging", "rf", "hrf"):
                forest = fit_forest(data, plan.train_indices,
                                    _forest_config(cfg, method, fit_seed))
                acc[method] = accuracy(forest, data, plan.test_indices)
            db = acc["hrf"] - acc["bagging"]
            dr = acc["hrf"] - acc["rf"]
            diffs_bagging.append(db)
            diffs_rf.append(dr)
            rows.append([float(ratio), rep, informative, acc["bagging"], acc["rf"],
                         acc["hrf"], db, dr])
        per_ratio.append({
            "noise_ratio": float(ratio),
            "informative_features": informative,
            "median_hrf_minus_bagging": float(np.median(diffs_bagging)),
            "median_hrf_minus_rf": float(np.median(diffs_rf)),
        })

    tables = {"accuracy": {
        "columns": ["noise_ratio", "repetition", "informative_features",
                    "bagging", "rf", "hrf", "hrf_minus_bagging", "hrf_minus_rf"],
        "rows": rows,
    }}
    summary = {"per_ratio": per_ratio}
    return StudyReport("noise", cfg.to_dict(), make_provenance(), summary, tables)


def tune_hrf_cv(dataset: Dataset, plan: SplitPlan, k: int = 5, alphas=None, betas=None,
                base_config: ForestConfig | None = None, fold_seed: int = 0) -> dict:
    """Grid-search (alpha, beta) by k-fold CV accuracy on the train side.

    The defaults sweep alpha over 0.0..0.9 and beta over 1..min(10, p).
    Ties go to the smaller alpha, then the smaller beta.
    """
    if alphas is None:
        alphas = GRID_ALPHAS
    if betas is None:
        betas = tuple(range(1, min(10, dataset.p) + 1))
    base = base_config if base_config is not None else ForestConfig(method="hrf")
    if plan.folds is not None and len(plan.folds) == k:
        folds = plan.folds
    else:
        folds = kfold_indices(plan, k, fold_seed).folds
    train_sides = [np.concatenate([f for j, f in enumerate(folds) if j != i])
                   for i in range(len(folds))]
    best = None
    for alpha in alphas:
        for beta in betas:
            config = replace(base, method="hrf", alpha=float(alpha), beta=int(beta))
            fold_accs = []
            for held_out, train_side in zip(folds, train_sides):
                forest = fit_forest(dataset, train_side, config)
                predicted = predict_rows(forest, dataset.features[held_out])
                fold_accs.append(np.mean(predicted == dataset.labels[held_out]))
            score = float(np.mean(fold_accs))
            if best is None or score > best["cv_accuracy"]:
                best = {"alpha": float(alpha), "beta": int(beta), "cv_accuracy": score}
    return best


def compare_methods(cfg: StudyConfig) -> StudyReport:
    """Repeated-split comparison on one CSV dataset with paired testing.

    Per repetition: a fresh train/test split (seed = master seed +
    repetition index), per-repetition CV tuning for hrf (or once, when
    ``tune_once``), untuned defaults for bagging/rf, then test accuracy.
    Each method pair gets a two-sided Wilcoxon signed-rank verdict at the
    0.05 level.
    """
    cfg = cfg.resolved()
    if len(cfg.methods) < 2:
        raise ValueError("compare needs at least two methods")
    if cfg.csv_path is None or cfg.target_column is None:
        raise ValueError("compare needs csv_path and target_column")
    data = impute_missing(load_csv(cfg.csv_path, cfg.target_column, cfg.missing_token))

    # Duplicate method entries are allowed (self-comparison); key by position.
    labels = []
    tally: dict[str, int] = {}
    for method in cfg.methods:
        tally[method] = tally.get(method, 0) + 1
        labels.append(method if tally[method] == 1 else f"{method}_{tally[method]}")

    acc: list[list[float]] = [[] for _ in cfg.methods]
    rows = []
    tuned_cache: dict | None = None
    for rep in range(cfg.repetitions):
        rep_seed = cfg.seed + rep
        plan = split_train_test(data, cfg.train_fraction, rep_seed)
        tuned = None
        row = [rep]
        for pos, method in enumerate(cfg.methods):
            config = _forest_config(cfg, method, rep_seed)
            if method == "hrf":
                if tuned is None:
                    if cfg.tune_once and tuned_cache is not None:
                        tuned = tuned_cache
                    else:
                        tuned = tune_hrf_cv(data, plan, cfg.folds,
                                            base_config=config, fold_seed=rep_seed)
                        if cfg.tune_once:
                            tuned_cache = tuned
                config = replace(config, alpha=tuned["alpha"], beta=tuned["beta"])
            forest = fit_forest(data, plan.train_indices, config)
            acc[pos].append(accuracy(forest, data, plan.test_indices))
            row.append(acc[pos][-1])
        if tuned is not None:
            row += [tuned["alpha"], tuned["beta"], tuned["cv_accuracy"]]
        rows.append(row)

    test_rows = []
    pairwise = []
    for pos_a, pos_b in combinations(range(len(cfg.methods)), 2):
        diffs = np.asarray(acc[pos_a]) - np.asarray(acc[pos_b])
        result = wilcoxon_signed_rank(diffs)
        mean_diff = float(diffs.mean())
        if result.p_value < SIGNIFICANCE and mean_diff > 0:
            verdict = "+"
        elif result.p_value < SIGNIFICANCE and mean_diff < 0:
            verdict = "-"
        else:
            verdict = "tie"
        wtl = {"wins": int(verdict == "+"), "ties": int(verdict == "tie"),
               "losses": int(verdict == "-")}
        test_rows.append([labels[pos_a], labels[pos_b], mean_diff, result.statistic,
                          result.p_value, verdict])
        pairwise.append({"first": labels[pos_a], "second": labels[pos_b],
                         "mean_diff": mean_diff, "statistic": result.statistic,
                         "p_value": result.p_value, "verdict": verdict, "wtl": wtl})

    columns = ["repetition"] + labels
    if any(method == "hrf" for method in cfg.methods):
        columns += ["hrf_alpha", "hrf_beta", "hrf_cv_accuracy"]
    tables = {
        "accuracy": {"columns": columns, "rows": rows},
        "tests": {"columns": ["first", "second", "mean_diff", "statistic",
                              "p_value", "verdict"], "rows": test_rows},
    }
    summary = {
        "mean_accuracy": {label: float(np.mean(acc[pos]))
                          for pos, label in enumerate(labels)},
        "pairwise": pairwise,
        "significance": SIGNIFICANCE,
    }
    return StudyReport("compare", cfg.to_dict(), make_provenance(), summary, tables)


def noise_feature_fraction(importances) -> float:
    """Share of features whose normalized importance falls below 1/p."""
    imp = np.asarray(importances, dtype=np.float64)
    return float(np.mean(imp < 1.0 / imp.size))


def noise_profile(dataset: Dataset, seed: int = 0) -> dict:
    """Single deep-tree importance profile and the implied noise share."""
    if dataset.has_missing():
        raise ValueError("impute the dataset before profiling")
    tree = grow_tree(dataset, np.arange(dataset.n), None,
                     GrowthParams(), NodeStreams(seed, 0))
    importances = impurity_importance(tree, dataset.n)
    return {
        "noise_proportion": noise_feature_fraction(importances),
        "threshold": 1.0 / dataset.p,
        "importances": [float(v) for v in importances],
        "feature_names": list(dataset.feature_names),
    }


def estimate_noise_proportion(dataset: Dataset, seed: int = 0) -> float:
    return noise_profile(dataset, seed)["noise_proportion"]


def run_noise_profile(cfg: StudyConfig) -> StudyReport:
    cfg = cfg.resolved()
    if cfg.csv_path is None or cfg.target_column is None:
        raise ValueError("noise-profile needs csv_path and target_column")
    data = impute_missing(load_csv(cfg.csv_path, cfg.target_column, cfg.missing_token))
    profile = noise_profile(data, cfg.seed)
    rows = [[name, imp, bool(imp < profile["threshold"])]
            for name, imp in zip(profile["feature_names"], profile["importances"])]
    tables = {"feature_importance": {
        "columns": ["feature", "importance", "is_noise"], "rows": rows,
    }}
    summary = {"noise_proportion": profile["noise_proportion"],
               "threshold": profile["threshold"]}
    return StudyReport("noise_profile", cfg.to_dict(), make_provenance(), summary, tables)


STUDY_RUNNERS = {
    "bias": run_bias_study,
    "diversity": run_diversity_study,
    "noise": run_noise_study,
    "compare": compare_methods,
    "noise_profile": run_noise_profile,
}


def run_study(cfg: StudyConfig) -> StudyReport:
    try:
        runner = STUDY_RUNNERS[cfg.study]
    except KeyError:
        raise ValueError(f"unknown study {cfg.study!r}") from None
    return runner(cfg)
