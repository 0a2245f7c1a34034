"""Paired-comparison statistics for the benchmark harness."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_LIMIT = 20  # largest sample size handled by the exact distribution


@dataclass
class WilcoxonResult:
    statistic: float  # min of the positive/negative rank sums
    p_value: float
    n_used: int  # sample size after dropping zero differences
    method: str  # "exact" | "normal" | "degenerate"


def wilcoxon_signed_rank(diffs) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired differences.

    Zero differences are dropped and absolute values are ranked with average
    ranks on ties. The statistic is ``min(W+, W-)``. With at most
    ``EXACT_LIMIT`` nonzero differences the p-value comes from the exact
    distribution over all sign assignments; beyond that, from a normal
    approximation with tie and continuity corrections. With no nonzero
    differences the p-value is 1.
    """
    d = np.asarray(diffs, dtype=np.float64)
    if d.size < 1:
        raise ValueError("diffs is empty")
    d = d[d != 0]
    r = d.size
    if r == 0:
        return WilcoxonResult(0.0, 1.0, 0, "degenerate")
    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if r <= EXACT_LIMIT:
        return WilcoxonResult(w, _exact_p(ranks, w), r, "exact")
    return WilcoxonResult(w, _normal_p(d, ranks, w), r, "normal")


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # mean of positions i..j, 1-based
        i = j + 1
    return ranks


def _exact_p(ranks: np.ndarray, w: float) -> float:
    # P(min(W+, W-) <= w) over the 2^r equally likely sign assignments.
    # Doubling the ranks makes average ranks integral, so the distribution
    # of 2*W+ is a subset-sum count.
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    s = int(doubled.sum())
    counts = np.zeros(s + 1, dtype=np.float64)
    counts[0] = 1.0
    for step in doubled:
        counts[step:] += counts[:s + 1 - step].copy()
    w2 = int(round(2.0 * w))
    low = counts[:w2 + 1].sum()
    high = counts[s - w2:].sum()
    overlap = counts[w2] if s - w2 <= w2 else 0.0
    return float(min(1.0, (low + high - overlap) / 2.0 ** len(doubled)))


def _normal_p(d: np.ndarray, ranks: np.ndarray, w: float) -> float:
    r = d.size
    mean = r * (r + 1) / 4.0
    _, tie_sizes = np.unique(np.abs(d), return_counts=True)
    tie_term = float(((tie_sizes ** 3) - tie_sizes).sum()) / 2.0
    variance = (r * (r + 1) * (2 * r + 1) - tie_term) / 24.0
    z = (w - mean + 0.5) / math.sqrt(variance)  # w <= mean; continuity toward it
    p = math.erfc(-z / math.sqrt(2.0))  # = 2 * Phi(z)
    return float(min(1.0, p))
