"""Structural dissimilarity between trees in an ensemble.

Each tree is summarized by feature dominance: a used feature scores
``(deepest earliest-use depth) + 1 - (its own earliest-use depth)``, so
root-adjacent features score high and unused features score 0. Two trees
are compared by a chi-square homogeneity test on their stacked dominance
rows, and the statistic is standardized with the Wilson-Hilferty cube-root
transform so values with different degrees of freedom share a scale.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .tree import DecisionTree, feature_depths


@dataclass
class DominanceVector:
    values: np.ndarray
    used: np.ndarray


@dataclass
class DissimilarityResult:
    chi2: float
    df: int
    ds: float | None  # None when df < 1

    @property
    def defined(self) -> bool:
        return self.ds is not None


def dominance(depths, used_mask) -> DominanceVector:
    """Dominance scores from earliest split depths and a used-feature mask.

    Unused features score 0. The depth offset applied to unused features when
    extracting depth vectors plays no role here.
    """
    d = np.asarray(depths, dtype=np.float64)
    used = np.asarray(used_mask, dtype=bool)
    values = np.zeros(d.size)
    if used.any():
        if not np.isfinite(d[used]).all():
            raise ValueError("used features must have finite depths")
        deepest = d[used].max()
        values[used] = deepest + 1.0 - d[used]
    return DominanceVector(values=values, used=used)


def tree_dominance(tree: DecisionTree, beta: int = 1) -> DominanceVector:
    return dominance(feature_depths(tree, beta), tree.used_features())


def chi2_homogeneity(row_a, row_b) -> tuple[float, int]:
    """Chi-square homogeneity statistic for a 2-row nonnegative table.

    Columns whose sum is 0 are dropped before forming expected counts;
    df = (kept columns) - 1. A zero row sum leaves the test undefined and
    raises (callers skip such pairs).
    """
    a = np.asarray(getattr(row_a, "values", row_a), dtype=np.float64)
    b = np.asarray(getattr(row_b, "values", row_b), dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("rows must be 1-d and of equal length")
    if (a < 0).any() or (b < 0).any():
        raise ValueError("table entries must be nonnegative")
    sum_a = a.sum()
    sum_b = b.sum()
    if sum_a <= 0 or sum_b <= 0:
        raise ValueError("zero row sum; homogeneity test undefined")
    keep = (a + b) > 0
    a = a[keep]
    b = b[keep]
    col = a + b
    total = sum_a + sum_b
    expected_a = col * (sum_a / total)
    expected_b = col * (sum_b / total)
    chi2 = float((((a - expected_a) ** 2) / expected_a).sum()
                 + (((b - expected_b) ** 2) / expected_b).sum())
    return chi2, int(keep.sum()) - 1


def wilson_hilferty(chi2: float, k: int) -> float:
    """Cube-root standardization of a chi-square value with k >= 1 df."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if chi2 < 0:
        raise ValueError("chi2 must be >= 0")
    center = 1.0 - 2.0 / (9.0 * k)
    scale = np.sqrt(2.0 / (9.0 * k))
    return float((np.cbrt(chi2 / k) - center) / scale)


def pair_dissimilarity(dom_a: DominanceVector, dom_b: DominanceVector) -> DissimilarityResult:
    chi2, df = chi2_homogeneity(dom_a, dom_b)
    ds = wilson_hilferty(chi2, df) if df >= 1 else None
    return DissimilarityResult(chi2=chi2, df=df, ds=ds)


def dissimilarity_matrix(forest, beta: int = 1) -> np.ndarray:
    """Symmetric matrix of pairwise dissimilarities; NaN marks the diagonal
    and pairs whose test is undefined."""
    doms = [tree_dominance(t, beta) for t in forest.trees]
    n = len(doms)
    out = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                result = pair_dissimilarity(doms[i], doms[j])
            except ValueError:
                continue
            if result.defined:
                out[i, j] = out[j, i] = result.ds
    return out


def mean_pairwise_dissimilarity(forest, beta: int = 1) -> tuple[float, int]:
    """Mean dissimilarity over all tree pairs, plus the skipped-pair count.

    Pairs with an undefined test (a dominance row summing to 0, or fewer
    than two nonzero columns) are excluded from the mean.
    """
    if forest.n_trees < 2:
        raise ValueError("need at least two trees")
    doms = [tree_dominance(t, beta) for t in forest.trees]
    total = 0.0
    defined = 0
    skipped = 0
    for i in range(len(doms)):
        for j in range(i + 1, len(doms)):
            try:
                result = pair_dissimilarity(doms[i], doms[j])
            except ValueError:
                skipped += 1
                continue
            if result.defined:
                total += result.ds
                defined += 1
            else:
                skipped += 1
    if defined == 0:
        raise ValueError("all pairs undefined; no dissimilarity to average")
    return total / defined, skipped


def save_dissimilarity_csv(matrix: np.ndarray, path) -> None:
    """B x B matrix as CSV with blank diagonal/undefined cells."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        n = matrix.shape[0]
        writer.writerow(["tree"] + [str(j) for j in range(n)])
        for i in range(n):
            row = ["" if np.isnan(v) else repr(float(v)) for v in matrix[i]]
            writer.writerow([str(i)] + row)
