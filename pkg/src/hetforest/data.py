"""Dataset container, CSV ingestion, imputation, and partitioning."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass
class Dataset:
    """Numeric classification dataset.

    features : (n, p) float64 matrix; NaN marks a missing cell prior to
        imputation.
    labels : (n,) int64 class ids in {0..K-1}; every class occurs at least
        once.
    feature_names / class_names : column and class labels.
    ordinal_columns : boolean mask, True where a column holds ordinal codes
        for category strings (selects mode- instead of mean-imputation).
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    class_names: list[str]
    ordinal_columns: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        n, p = self.features.shape
        if n < 1 or p < 1:
            raise ValueError("dataset needs at least one row and one feature")
        if len(self.feature_names) != p:
            raise ValueError("feature_names length does not match feature count")
        k = len(self.class_names)
        if k < 2:
            raise ValueError("fewer than 2 classes")
        if self.labels.shape != (n,):
            raise ValueError("labels length does not match row count")
        if self.labels.min() < 0 or self.labels.max() >= k:
            raise ValueError("labels must lie in {0..K-1}")
        if np.unique(self.labels).size != k:
            raise ValueError("every class id must appear at least once")
        if self.ordinal_columns is None:
            self.ordinal_columns = np.zeros(p, dtype=bool)
        else:
            self.ordinal_columns = np.asarray(self.ordinal_columns, dtype=bool)
            if self.ordinal_columns.shape != (p,):
                raise ValueError("ordinal_columns mask must have one entry per feature")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def has_missing(self) -> bool:
        return bool(np.isnan(self.features).any())


@dataclass
class SplitPlan:
    """Disjoint train/test row indices, optionally with CV folds over train."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    folds: list[np.ndarray] | None = None

    def __post_init__(self):
        self.train_indices = np.asarray(self.train_indices, dtype=np.int64)
        self.test_indices = np.asarray(self.test_indices, dtype=np.int64)


def load_csv(path, target_column: str, missing_token: str = "") -> Dataset:
    """Read a headered CSV into a :class:`Dataset`.

    Columns whose observed cells all parse as finite numbers become numeric
    features; other columns are ordinal-encoded (distinct observed strings
    sorted lexicographically and mapped to codes 0,1,2,...). Cells equal to
    ``missing_token`` (after stripping whitespace) become NaN. The target is
    label-encoded by first appearance.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("CSV is empty: no header row")
        rows = list(reader)
    header = [h.strip() for h in header]
    if target_column not in header:
        raise ValueError(f"target column {target_column!r} not found in header")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"row {i + 2} has {len(row)} cells, expected {width}")
    if not rows:
        raise ValueError("CSV has no data rows")
    target_idx = header.index(target_column)

    class_names: list[str] = []
    class_codes: dict[str, int] = {}
    labels = np.empty(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        cell = row[target_idx].strip()
        if cell == missing_token:
            raise ValueError(f"missing value in target column at row {i + 2}")
        if cell not in class_codes:
            class_codes[cell] = len(class_names)
            class_names.append(cell)
        labels[i] = class_codes[cell]
    if len(class_names) < 2:
        raise ValueError("fewer than 2 classes in target column")

    feature_cols = [j for j in range(width) if j != target_idx]
    feature_names = [header[j] for j in feature_cols]
    features = np.empty((len(rows), len(feature_cols)), dtype=np.float64)
    ordinal = np.zeros(len(feature_cols), dtype=bool)
    for out_j, j in enumerate(feature_cols):
        cells = [row[j].strip() for row in rows]
        observed = [c for c in cells if c != missing_token]
        values = _try_numeric(observed)
        if values is not None:
            it = iter(values)
            col = [np.nan if c == missing_token else next(it) for c in cells]
        else:
            codes = {s: float(k) for k, s in enumerate(sorted(set(observed)))}
            col = [np.nan if c == missing_token else codes[c] for c in cells]
            ordinal[out_j] = True
        features[:, out_j] = col
    return Dataset(features, labels, feature_names, class_names, ordinal)


def _try_numeric(cells: list[str]) -> list[float] | None:
    # All-or-nothing: a single unparseable or non-finite cell makes the
    # column categorical ("nan"/"inf" strings must not leak in as numbers).
    out = []
    for c in cells:
        try:
            v = float(c)
        except ValueError:
            return None
        if not math.isfinite(v):
            return None
        out.append(v)
    return out


def impute_missing(d: Dataset) -> Dataset:
    """Fill NaN cells: column mean for numeric, column mode for ordinal.

    Mode ties resolve to the smallest code. A column with no observed value
    is an error. Idempotent.
    """
    if not d.has_missing():
        return replace(d, features=d.features.copy())
    x = d.features.copy()
    for j in range(d.p):
        col = x[:, j]
        missing = np.isnan(col)
        if not missing.any():
            continue
        if missing.all():
            raise ValueError(f"column {d.feature_names[j]!r} is entirely missing")
        observed = col[~missing]
        if d.ordinal_columns[j]:
            codes, counts = np.unique(observed, return_counts=True)
            fill = codes[np.argmax(counts)]  # np.unique sorts: first max = smallest code
        else:
            fill = observed.mean()
        col[missing] = fill
    return replace(d, features=x)


def split_train_test(d: Dataset, train_fraction: float, seed: int) -> SplitPlan:
    """Random train/test partition: floor(n * fraction) rows go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = d.n
    n_train = int(math.floor(n * train_fraction))
    if n_train < 1 or n - n_train < 1:
        raise ValueError(f"degenerate split: {n_train} train / {n - n_train} test rows")
    perm = np.random.default_rng(seed).permutation(n)
    return SplitPlan(perm[:n_train], perm[n_train:])


def kfold_indices(plan: SplitPlan, k: int, seed: int) -> SplitPlan:
    """Shuffle the train side and deal it into k folds of near-equal size."""
    t = plan.train_indices.size
    if k < 2 or k > t:
        raise ValueError(f"k must be in [2, {t}], got {k}")
    shuffled = np.random.default_rng(seed).permutation(plan.train_indices)
    folds = [np.asarray(f) for f in np.array_split(shuffled, k)]
    return SplitPlan(plan.train_indices, plan.test_indices, folds)


def dataset_to_json_dict(d: Dataset) -> dict:
    if d.has_missing():
        raise ValueError("cannot serialize a dataset with missing cells; impute first")
    return {
        "feature_names": list(d.feature_names),
        "class_names": list(d.class_names),
        "features": [[float(v) for v in row] for row in d.features],
        "labels": [int(v) for v in d.labels],
    }


def dataset_from_json_dict(obj: dict) -> Dataset:
    return Dataset(
        np.asarray(obj["features"], dtype=np.float64),
        np.asarray(obj["labels"], dtype=np.int64),
        [str(s) for s in obj["feature_names"]],
        [str(s) for s in obj["class_names"]],
    )


def save_dataset_json(d: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataset_to_json_dict(d), fh, indent=2)
        fh.write("\n")


def load_dataset_json(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return dataset_from_json_dict(json.load(fh))


def save_dataset_csv(d: Dataset, path, target_name: str = "target") -> None:
    """Write features plus a trailing target column of class names."""
    if d.has_missing():
        raise ValueError("cannot serialize a dataset with missing cells; impute first")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + [target_name])
        for row, label in zip(d.features, d.labels):
            writer.writerow([_compact_number(v) for v in row] + [d.class_names[label]])


def _compact_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))
