"""Synthetic binary-classification generators for the benchmark studies.

Both designs draw integer features and set the class probability with a
logistic link on a median-centered linear score, which pins the marginal
class balance near one half regardless of the feature scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset

SIM1_RANGES = (128, 64, 32, 16, 8)


@dataclass
class SimSpec:
    """CLI-facing description of one synthetic dataset."""

    kind: str  # sim1 | sim2
    n: int = 1000
    p: int = 30  # sim2 only
    n_informative: int = 30  # sim2 only
    seed: int = 0

    def generate(self) -> Dataset:
        if self.kind == "sim1":
            return gen_sim1(self.n, self.seed)
        if self.kind == "sim2":
            return gen_sim2(self.n, self.p, self.n_informative, self.seed)
        raise ValueError(f"unknown simulation kind {self.kind!r}")


def make_binary_target(eta, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli labels with success probability sigmoid(eta - median(eta)).

    The median is taken over the full sample (midpoint of the two central
    order statistics for even n).
    """
    eta = np.asarray(eta, dtype=np.float64)
    if eta.size < 1:
        raise ValueError("eta is empty")
    prob = 1.0 / (1.0 + np.exp(-(eta - np.median(eta))))
    return (rng.random(eta.size) < prob).astype(np.int64)


def gen_sim1(n: int = 1000, seed: int = 0) -> Dataset:
    """Five equally informative integer features with shrinking ranges.

    Feature j is uniform on {0..r_j} for r = (128, 64, 32, 16, 8); the class
    score is their plain sum, so any preference among them during tree
    growth reflects the split search, not the signal.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    x = np.empty((n, len(SIM1_RANGES)), dtype=np.float64)
    for j, high in enumerate(SIM1_RANGES):
        x[:, j] = rng.integers(0, high + 1, size=n)
    labels = make_binary_target(x.sum(axis=1), rng)
    names = [f"X{j + 1}" for j in range(len(SIM1_RANGES))]
    return Dataset(x, labels, names, ["0", "1"])


def gen_sim2(n: int = 1000, p: int = 30, n_informative: int = 30, seed: int = 0) -> Dataset:
    """p integer features uniform on {0..4}; only the first ``n_informative``
    enter the class score, the rest are pure noise."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 1 <= n_informative <= p:
        raise ValueError(f"n_informative must lie in [1, {p}], got {n_informative}")
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 5, size=(n, p)).astype(np.float64)
    labels = make_binary_target(x[:, :n_informative].sum(axis=1), rng)
    names = [f"X{j + 1}" for j in range(p)]
    return Dataset(x, labels, names, ["0", "1"])


def informative_count_for_ratio(p: int, noise_ratio: float) -> int:
    """Informative-feature count for a target noise ratio (rounded)."""
    if not 0.0 <= noise_ratio < 1.0:
        raise ValueError("noise_ratio must lie in [0, 1)")
    return max(1, min(p, round(p * (1.0 - noise_ratio))))
