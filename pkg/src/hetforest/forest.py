"""Ensemble engines: bagging, random forest, and the heterogeneous variant.

All three share one training loop; they differ only in how the candidate
features for a node are drawn. Bagging offers every feature, random forest
draws a uniform subset, and the heterogeneous forest draws a weighted
subset whose weights favor features that sat deep in (or were absent from)
the earlier trees: after each tree, per-feature earliest split depths are
folded into an exponentially discounted running total, and the normalized
totals become the next tree's sampling weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as _rng
from .tree import (DecisionTree, GrowthParams, feature_depths, grow_tree,
                   predict_batch, tree_from_dict, tree_to_dict)

METHODS = ("bagging", "rf", "hrf")

WEIGHT_TOLERANCE = 1e-9


@dataclass
class ForestConfig:
    """Training configuration for any of the three ensemble methods.

    m : candidate features per node; None resolves to the method default
        (all features for bagging, floor(sqrt(p)) otherwise).
    alpha : memory factor in [0, 1); how strongly earlier trees keep
        influencing the sampling weights (heterogeneous method only).
    beta : depth offset granted to features a tree never used, raising their
        future sampling weight (heterogeneous method only).
    """

    method: str = "rf"
    n_trees: int = 100
    m: int | None = None
    alpha: float = 0.5
    beta: int = 1
    growth: GrowthParams = field(default_factory=GrowthParams)
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")

    def resolved_m(self, p: int) -> int:
        if self.m is None:
            m = p if self.method == "bagging" else max(1, int(math.isqrt(p)))
        else:
            m = self.m
        if not 1 <= m <= p:
            raise ValueError(f"m must lie in [1, {p}], got {m}")
        return m


@dataclass
class DepthLedger:
    """Running record of per-tree feature depths and the sampling weights.

    tree_depths : one earliest-depth vector per tree built so far.
    cumulative : discounted depth totals after the latest tree.
    weights : cumulative normalized to sum 1; the sampling weights for the
        next tree (uniform before any tree exists).
    """

    tree_depths: list[np.ndarray]
    cumulative: np.ndarray
    weights: np.ndarray

    @classmethod
    def initial(cls, p: int) -> "DepthLedger":
        return cls([], np.zeros(p), np.full(p, 1.0 / p))


def update_weights(ledger: DepthLedger, depths, alpha: float, tree_number: int) -> DepthLedger:
    """Fold one tree's depth vector into the ledger and refresh the weights.

    The first tree resets the running total; later trees add their depths to
    ``alpha`` times the previous total. Weights are the total divided by its
    sum. ``tree_number`` is 1-based.
    """
    d = np.asarray(depths, dtype=np.float64)
    if tree_number != len(ledger.tree_depths) + 1:
        raise ValueError("tree_number does not match the ledger history")
    cumulative = d.copy() if tree_number == 1 else d + alpha * ledger.cumulative
    total = cumulative.sum()
    if total <= 0:
        raise ValueError("cumulative depths sum to zero; cannot form weights")
    ledger.tree_depths.append(d)
    ledger.cumulative = cumulative
    ledger.weights = cumulative / total
    return ledger


@dataclass
class Forest:
    trees: list[DecisionTree]
    config: ForestConfig
    n_features: int
    n_classes: int
    ledger: DepthLedger | None = None
    feature_names: list[str] | None = None
    class_names: list[str] | None = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def bootstrap_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws with replacement from {0..n-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.integers(0, n, size=n)


def sample_candidate_features(weights, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw m distinct feature indices by sequential weighted sampling.

    Each draw is proportional to the remaining weights (drawn features are
    zeroed, implicitly renormalizing the rest). If the positive-weight
    features run out first, the remaining slots are filled uniformly at
    random from the zero-weight features, so exclusion stays soft.
    """
    w = np.asarray(weights, dtype=np.float64)
    p = w.size
    if not 1 <= m <= p:
        raise ValueError(f"m must lie in [1, {p}], got {m}")
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > WEIGHT_TOLERANCE:
        raise ValueError("weights must sum to 1")
    remaining = w.copy()
    chosen: list[int] = []
    for _ in range(m):
        cum = np.cumsum(remaining)
        total = cum[-1]
        if total <= 0.0:
            break
        j = int(np.searchsorted(cum, rng.random() * total, side="right"))
        if j >= p or remaining[j] <= 0.0:  # float edge: r landed at/after the last mass
            j = int(np.flatnonzero(remaining > 0)[-1])
        chosen.append(j)
        remaining[j] = 0.0
    if len(chosen) < m:
        leftover = np.setdiff1d(np.arange(p), np.asarray(chosen, dtype=np.intp))
        extra = rng.choice(leftover, size=m - len(chosen), replace=False)
        chosen.extend(int(v) for v in extra)
    return np.asarray(chosen, dtype=np.int64)


def _make_sampler(method: str, weights: np.ndarray | None, m: int, p: int):
    if method == "bagging" or m == p:
        return None  # every feature is a candidate; no randomness consumed
    if method == "rf":
        weights = np.full(p, 1.0 / p)
    return lambda rng: sample_candidate_features(weights, m, rng)


def fit_forest(dataset, train_indices, config: ForestConfig) -> Forest:
    """Train an ensemble on the given rows.

    Trees are built in order; for the heterogeneous method each tree's
    candidate weights come from the ledger state left by its predecessors
    (uniform for the first tree). Randomness derives entirely from
    ``config.seed`` via per-tree and per-node streams (see :mod:`.rng`),
    so identical inputs give an identical forest.
    """
    train = np.sort(np.asarray(train_indices, dtype=np.intp))
    if train.size == 0:
        raise ValueError("train side is empty")
    p = dataset.p
    m = config.resolved_m(p)
    config = replace(config, m=m)  # echo the resolved value
    hrf = config.method == "hrf"
    ledger = DepthLedger.initial(p) if hrf else None
    trees: list[DecisionTree] = []
    for b in range(config.n_trees):
        boot = bootstrap_sample(train.size, _rng.bootstrap_rng(config.seed, b))
        rows = train[boot]
        weights = ledger.weights if hrf else None
        sampler = _make_sampler(config.method, weights, m, p)
        tree = grow_tree(dataset, rows, sampler, config.growth,
                         _rng.NodeStreams(config.seed, b))
        trees.append(tree)
        if hrf:
            update_weights(ledger, feature_depths(tree, config.beta), config.alpha, b + 1)
    return Forest(trees=trees, config=config, n_features=p,
                  n_classes=dataset.n_classes, ledger=ledger,
                  feature_names=list(dataset.feature_names),
                  class_names=list(dataset.class_names))


def predict_majority(forest: Forest, x) -> int:
    """Majority vote over the trees; vote ties go to the smallest class id."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (forest.n_features,):
        raise ValueError(f"expected a vector of {forest.n_features} features")
    votes = predict_rows(forest, x[None, :])[0]
    return int(votes)


def predict_rows(forest: Forest, x) -> np.ndarray:
    """Majority-vote predictions for every row of a matrix."""
    x = np.asarray(x, dtype=np.float64)
    ballots = np.zeros((x.shape[0], forest.n_classes), dtype=np.int64)
    rows = np.arange(x.shape[0])
    for tree in forest.trees:
        ballots[rows, predict_batch(tree, x)] += 1
    return np.argmax(ballots, axis=1)  # first max = smallest class id


def accuracy(forest: Forest, dataset, test_indices) -> float:
    """Fraction of the given rows whose majority vote matches the label."""
    idx = np.asarray(test_indices, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("test side is empty")
    predicted = predict_rows(forest, dataset.features[idx])
    return float(np.mean(predicted == dataset.labels[idx]))


def forest_to_dict(forest: Forest) -> dict:
    cfg = forest.config
    obj = {
        "format": "hetforest.forest.v1",
        "config": {
            "method": cfg.method,
            "n_trees": cfg.n_trees,
            "m": cfg.m,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "growth": {
                "min_samples_split": cfg.growth.min_samples_split,
                "max_depth": cfg.growth.max_depth,
                "min_impurity_decrease": cfg.growth.min_impurity_decrease,
            },
            "seed": cfg.seed,
        },
        "n_features": forest.n_features,
        "n_classes": forest.n_classes,
        "feature_names": forest.feature_names,
        "class_names": forest.class_names,
        "trees": [tree_to_dict(t) for t in forest.trees],
        "ledger": None,
    }
    if forest.ledger is not None:
        obj["ledger"] = {
            "tree_depths": [[float(v) for v in d] for d in forest.ledger.tree_depths],
            "cumulative": [float(v) for v in forest.ledger.cumulative],
            "weights": [float(v) for v in forest.ledger.weights],
        }
    return obj


def forest_from_dict(obj: dict) -> Forest:
    cfg = obj["config"]
    config = ForestConfig(method=cfg["method"], n_trees=cfg["n_trees"], m=cfg["m"],
                          alpha=cfg["alpha"], beta=cfg["beta"],
                          growth=GrowthParams(**cfg["growth"]), seed=cfg["seed"])
    ledger = None
    if obj.get("ledger") is not None:
        led = obj["ledger"]
        ledger = DepthLedger(
            [np.asarray(d, dtype=np.float64) for d in led["tree_depths"]],
            np.asarray(led["cumulative"], dtype=np.float64),
            np.asarray(led["weights"], dtype=np.float64),
        )
    return Forest(trees=[tree_from_dict(t) for t in obj["trees"]], config=config,
                  n_features=int(obj["n_features"]), n_classes=int(obj["n_classes"]),
                  ledger=ledger, feature_names=obj.get("feature_names"),
                  class_names=obj.get("class_names"))


def save_forest(forest: Forest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(forest_to_dict(forest), fh, indent=2)
        fh.write("\n")


def load_forest(path) -> Forest:
    with open(path, encoding="utf-8") as fh:
        return forest_from_dict(json.load(fh))
