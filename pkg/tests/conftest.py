import numpy as np
import pytest

from hetforest.data import Dataset, save_dataset_csv
from hetforest.forest import Forest, ForestConfig
from hetforest.tree import DecisionTree, TreeNode


def leaf(depth, counts=(1, 1)):
    counts = np.asarray(counts, dtype=np.int64)
    return TreeNode(depth=depth, n_rows=int(counts.sum()), counts=counts)


def split(depth, feature, left, right, threshold=0.5, gain=0.1):
    return TreeNode(depth=depth, n_rows=left.n_rows + right.n_rows, feature=feature,
                    threshold=threshold, gain=gain, left=left, right=right)


def chain_tree(feature_by_depth, p, n_classes=2):
    """Tree whose d-th level splits on feature_by_depth[d]; other child a leaf."""
    node = leaf(len(feature_by_depth))
    for depth in reversed(range(len(feature_by_depth))):
        node = split(depth, feature_by_depth[depth], node, leaf(depth + 1))
    return DecisionTree(root=node, n_features=p, n_classes=n_classes)


@pytest.fixture
def deep_example_tree():
    """Five-feature tree: feature 0 at the root, feature 1 at depths 1 and 3,
    feature 2 at depth 2, features 3 and 4 unused; deepest split depth 3."""
    inner = split(3, 1, leaf(4), leaf(4))
    level2 = split(2, 2, inner, leaf(3))
    level1 = split(1, 1, level2, leaf(2))
    root = split(0, 0, level1, leaf(1))
    return DecisionTree(root=root, n_features=5, n_classes=2)


@pytest.fixture
def toy_quartet():
    """Four five-feature trees with earliest-use depths
    [0,2,1,-,-], [0,-,1,2,-], [2,3,-,0,1] and [2,1,-,0,1]."""
    t1 = chain_tree([0, 2, 1], p=5)
    t2 = chain_tree([0, 2, 3], p=5)
    t3 = chain_tree([3, 4, 0, 1], p=5)
    below = split(2, 0, leaf(3), leaf(3))
    left = split(1, 1, below, leaf(2))
    right = split(1, 4, leaf(2), leaf(2))
    t4 = DecisionTree(root=split(0, 3, left, right), n_features=5, n_classes=2)
    return [t1, t2, t3, t4]


@pytest.fixture
def toy_quartet_forest(toy_quartet):
    return Forest(trees=toy_quartet, config=ForestConfig(method="bagging", n_trees=4, m=5),
                  n_features=5, n_classes=2)


def make_blobs_dataset(n_per_class=50, n_features=4, n_classes=3, spread=1.0, seed=2024):
    """Well-separated Gaussian blobs: linearly separable by wide margins."""
    rng = np.random.default_rng(seed)
    centers = np.arange(n_classes)[:, None] * 10.0 * np.ones(n_features)
    x = np.vstack([c + rng.normal(0.0, spread, (n_per_class, n_features))
                   for c in centers])
    y = np.repeat(np.arange(n_classes), n_per_class)
    names = [f"f{j + 1}" for j in range(n_features)]
    classes = [f"c{k}" for k in range(n_classes)]
    return Dataset(x, y, names, classes)


@pytest.fixture
def blobs_dataset():
    return make_blobs_dataset()


@pytest.fixture
def blobs_csv(tmp_path, blobs_dataset):
    path = tmp_path / "blobs.csv"
    save_dataset_csv(blobs_dataset, path, target_name="label")
    return path
