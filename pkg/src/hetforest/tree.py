"""CART-style classification tree with pluggable per-node candidate features.

Growth is greedy: at every node a caller-supplied sampler proposes the
candidate features, the best (feature, midpoint-threshold) pair by Gini
decrease splits the node, and rows with ``value <= threshold`` go left.
All tie-breaks take the smallest item (feature index, threshold, class id)
so growth is fully deterministic for a given node-stream seed.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .rng import NodeStreams


@dataclass
class GrowthParams:
    """Stopping rules for tree growth.

    A node is split only when it is impure, has at least
    ``min_samples_split`` rows, sits above ``max_depth``, and some candidate
    split improves weighted Gini by strictly more than
    ``min_impurity_decrease`` (so a zero-gain split never fires).
    """

    min_samples_split: int = 2
    max_depth: int | None = None
    min_impurity_decrease: float = 0.0

    def __post_init__(self):
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_impurity_decrease < 0:
            raise ValueError("min_impurity_decrease must be >= 0")


@dataclass
class TreeNode:
    """Split node (feature/threshold/children) or leaf (class counts)."""

    depth: int
    n_rows: int
    feature: int | None = None
    threshold: float | None = None
    gain: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class DecisionTree:
    root: TreeNode
    n_features: int
    n_classes: int
    params: GrowthParams = field(default_factory=GrowthParams)

    def iter_nodes(self):
        """Preorder walk, left child before right."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def used_features(self) -> np.ndarray:
        """Boolean mask of features appearing in at least one split."""
        used = np.zeros(self.n_features, dtype=bool)
        for node in self.iter_nodes():
            if not node.is_leaf:
                used[node.feature] = True
        return used

    def n_splits(self) -> int:
        return sum(1 for node in self.iter_nodes() if not node.is_leaf)


@dataclass
class SplitChoice:
    feature: int
    threshold: float
    gain: float


def gini(counts) -> float:
    """Gini impurity ``1 - sum((c/n)^2)`` of a class-count vector."""
    c = np.asarray(counts, dtype=np.float64)
    if c.size == 0:
        raise ValueError("empty class counts")
    if (c < 0).any():
        raise ValueError("negative class counts")
    n = c.sum()
    if n < 1:
        raise ValueError("class counts sum to zero")
    q = c / n
    return float(1.0 - np.dot(q, q))


def best_split(dataset, row_indices, candidate_features,
               min_impurity_decrease: float = 0.0) -> SplitChoice | None:
    """Best (feature, threshold) over the candidates, or None.

    Thresholds are midpoints between consecutive distinct sorted values of a
    feature restricted to the given rows. The winner maximizes weighted Gini
    decrease; ties go to the smallest feature index, then the smallest
    threshold. Returns None when no candidate beats
    ``min_impurity_decrease`` strictly.
    """
    rows = np.asarray(row_indices, dtype=np.intp)
    if rows.size < 2:
        raise ValueError("need at least two rows to split")
    feats = np.unique(np.asarray(candidate_features, dtype=np.intp))
    if feats.size == 0:
        raise ValueError("candidate_features is empty")
    return _best_split_arrays(dataset.features, dataset.labels, rows, feats,
                              dataset.n_classes, min_impurity_decrease)


def _best_split_arrays(x, y, rows, features, n_classes, min_decrease):
    # Gini decrease is computed as (sum(l^2)/n_l + sum(r^2)/n_r - sum(c^2)/n)/n,
    # which cancels exactly for proportionally-split integer counts and so
    # keeps zero-gain splits at exactly zero. All candidate features are
    # scanned in one vectorized pass; `features` must be sorted ascending so
    # that argmax tie-breaks pick the smallest feature index.
    n = rows.size
    m = features.size
    y_sub = y[rows]
    sub = x[np.ix_(rows, features)]
    order = np.argsort(sub, axis=0, kind="stable")
    cols = np.arange(m)
    xs = sub[order, cols]
    boundary = xs[1:] > xs[:-1]
    if not boundary.any():
        return None
    ys = y_sub[order]
    totals = np.bincount(y_sub, minlength=n_classes).astype(np.float64)
    parent_sq = float(np.dot(totals, totals)) / n
    left_sq = np.zeros((n - 1, m))
    right_sq = np.zeros((n - 1, m))
    for k in range(n_classes):
        cum = np.cumsum(ys == k, axis=0)[:-1]
        left_sq += cum * cum
        rest = totals[k] - cum
        right_sq += rest * rest
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    gains = (left_sq / n_left + right_sq / (n - n_left) - parent_sq) / n
    gains[~boundary] = -np.inf
    best_cut = np.argmax(gains, axis=0)  # first max per column = smallest threshold
    per_feature = gains[best_cut, cols]
    j = int(np.argmax(per_feature))  # first max = smallest feature index
    gain = float(per_feature[j])
    if not gain > min_decrease:
        return None
    t = int(best_cut[j])
    threshold = 0.5 * (xs[t, j] + xs[t + 1, j])
    return SplitChoice(int(features[j]), float(threshold), gain)


def grow_tree(dataset, row_indices, sampler, params: GrowthParams | None = None,
              streams: NodeStreams | None = None) -> DecisionTree:
    """Grow a tree on the given rows (a bootstrap multiset is fine).

    ``sampler(rng)`` returns the candidate feature indices for one node and
    is called once per splittable node, in preorder, with that node's
    derived stream; ``sampler=None`` offers every feature and consumes no
    randomness. Rows are sorted up front so growth does not depend on their
    order.
    """
    params = params if params is not None else GrowthParams()
    streams = streams if streams is not None else NodeStreams(0, 0)
    rows = np.sort(np.asarray(row_indices, dtype=np.intp))
    if rows.size == 0:
        raise ValueError("row_indices is empty")
    x = dataset.features
    y = dataset.labels
    n_classes = dataset.n_classes
    everything = np.arange(dataset.p)

    limit = sys.getrecursionlimit()
    if limit < rows.size + 1000:
        sys.setrecursionlimit(rows.size + 1000)

    def build(node_rows, depth):
        n = node_rows.size
        counts = np.bincount(y[node_rows], minlength=n_classes)
        pure = counts.max() == n
        depth_ok = params.max_depth is None or depth < params.max_depth
        if not pure and n >= params.min_samples_split and depth_ok:
            if sampler is None:
                candidates = everything
            else:
                rng = streams.next_rng()
                candidates = np.unique(np.asarray(sampler(rng), dtype=np.intp))
            choice = _best_split_arrays(x, y, node_rows, candidates, n_classes,
                                        params.min_impurity_decrease)
            if choice is not None:
                go_left = x[node_rows, choice.feature] <= choice.threshold
                left = build(node_rows[go_left], depth + 1)
                right = build(node_rows[~go_left], depth + 1)
                return TreeNode(depth=depth, n_rows=n, feature=choice.feature,
                                threshold=choice.threshold, gain=choice.gain,
                                left=left, right=right)
        return TreeNode(depth=depth, n_rows=n, counts=counts)

    root = build(rows, 0)
    return DecisionTree(root=root, n_features=dataset.p, n_classes=n_classes,
                        params=params)


def predict(tree: DecisionTree, x) -> int:
    """Route one sample to a leaf and return its majority class."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tree.n_features,):
        raise ValueError(f"expected a vector of {tree.n_features} features")
    node = tree.root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return int(np.argmax(node.counts))  # first max = smallest class id


def predict_batch(tree: DecisionTree, x) -> np.ndarray:
    """Vectorized :func:`predict` over the rows of a matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != tree.n_features:
        raise ValueError(f"expected a matrix with {tree.n_features} columns")
    out = np.empty(x.shape[0], dtype=np.int64)
    stack = [(tree.root, np.arange(x.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = int(np.argmax(node.counts))
        else:
            go_left = x[idx, node.feature] <= node.threshold
            stack.append((node.right, idx[~go_left]))
            stack.append((node.left, idx[go_left]))
    return out


def feature_depths(tree: DecisionTree, beta: int = 1) -> np.ndarray:
    """Earliest split depth per feature, root depth being 0.

    A feature never used for splitting is placed ``beta`` levels below the
    deepest split, i.e. at ``(max split depth) + beta``; for a split-free
    tree every feature sits at ``beta``.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    depths = np.full(tree.n_features, np.inf)
    deepest = 0
    for node in tree.iter_nodes():
        if not node.is_leaf:
            if node.depth < depths[node.feature]:
                depths[node.feature] = node.depth
            if node.depth > deepest:
                deepest = node.depth
    depths[~np.isfinite(depths)] = deepest + beta
    return depths


def impurity_importance(tree: DecisionTree, n_total: int) -> np.ndarray:
    """Per-feature Gini importance, normalized to sum to 1.

    Each split contributes its impurity decrease weighted by the fraction of
    the ``n_total`` training rows it saw. Undefined for split-free trees.
    """
    importance = np.zeros(tree.n_features)
    found = False
    for node in tree.iter_nodes():
        if not node.is_leaf:
            found = True
            importance[node.feature] += node.n_rows / n_total * node.gain
    if not found:
        raise ValueError("tree has no splits; importance is undefined")
    return importance / importance.sum()


def tree_to_dict(tree: DecisionTree) -> dict:
    return {
        "n_features": tree.n_features,
        "n_classes": tree.n_classes,
        "growth": {
            "min_samples_split": tree.params.min_samples_split,
            "max_depth": tree.params.max_depth,
            "min_impurity_decrease": tree.params.min_impurity_decrease,
        },
        "root": _node_to_dict(tree.root),
    }


def tree_from_dict(obj: dict) -> DecisionTree:
    params = GrowthParams(**obj["growth"])
    return DecisionTree(root=_node_from_dict(obj["root"], 0),
                        n_features=int(obj["n_features"]),
                        n_classes=int(obj["n_classes"]), params=params)


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"depth": node.depth, "counts": [int(c) for c in node.counts]}
    return {
        "depth": node.depth,
        "feature": node.feature,
        "threshold": node.threshold,
        "n": node.n_rows,
        "gain": node.gain,
        "children": [_node_to_dict(node.left), _node_to_dict(node.right)],
    }


def _node_from_dict(obj: dict, depth: int) -> TreeNode:
    if "counts" in obj:
        counts = np.asarray(obj["counts"], dtype=np.int64)
        return TreeNode(depth=int(obj["depth"]), n_rows=int(counts.sum()), counts=counts)
    left = _node_from_dict(obj["children"][0], depth + 1)
    right = _node_from_dict(obj["children"][1], depth + 1)
    return TreeNode(depth=int(obj["depth"]), n_rows=int(obj["n"]),
                    feature=int(obj["feature"]), threshold=float(obj["threshold"]),
                    gain=float(obj["gain"]), left=left, right=right)
