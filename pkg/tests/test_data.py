import json

import numpy as np
import pytest

from hetforest.data import (Dataset, dataset_from_json_dict, dataset_to_json_dict,
                            impute_missing, kfold_indices, load_csv,
                            save_dataset_csv, split_train_test)


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_basic_parse(self, tmp_path):
        path = write_csv(tmp_path, "a,b,y\n1,2,yes\n3,4,no\n5,6,yes\n")
        d = load_csv(path, "y")
        assert d.n == 3 and d.p == 2 and d.n_classes == 2
        assert d.feature_names == ["a", "b"]
        assert d.class_names == ["yes", "no"]  # first-appearance order
        assert d.labels.tolist() == [0, 1, 0]
        np.testing.assert_array_equal(d.features, [[1, 2], [3, 4], [5, 6]])

    def test_missing_token_becomes_nan(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\n,v\n3,u\n")
        d = load_csv(path, "y")
        assert np.isnan(d.features[1, 0])
        assert not np.isnan(d.features[0, 0])

    def test_custom_missing_token(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\nNA,v\n3,u\n")
        d = load_csv(path, "y", missing_token="NA")
        assert np.isnan(d.features[1, 0])

    def test_single_class_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\n2,u\n")
        with pytest.raises(ValueError, match="fewer than 2 classes"):
            load_csv(path, "y")

    def test_absent_target_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\n2,v\n")
        with pytest.raises(ValueError, match="target column"):
            load_csv(path, "z")

    def test_row_arity_mismatch_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,b,y\n1,2,u\n3,v\n")
        with pytest.raises(ValueError, match="row 3"):
            load_csv(path, "y")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_csv(tmp_path / "nope.csv", "y")

    def test_ordinal_encoding_sorted_bijection(self, tmp_path):
        path = write_csv(tmp_path, "color,y\nred,u\nblue,v\ngreen,u\nblue,v\n")
        d = load_csv(path, "y")
        assert d.ordinal_columns.tolist() == [True]
        # lexicographic: blue=0, green=1, red=2
        assert d.features[:, 0].tolist() == [2.0, 0.0, 1.0, 0.0]
        observed = sorted({"red", "blue", "green"})
        codes = sorted(set(d.features[:, 0]))
        assert codes == [float(k) for k in range(len(observed))]

    def test_nan_string_treated_as_category(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\nnan,v\n2,u\n")
        d = load_csv(path, "y")
        assert d.ordinal_columns.tolist() == [True]
        assert not np.isnan(d.features).any()

    def test_missing_target_cell_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,y\n1,u\n2,\n3,v\n")
        with pytest.raises(ValueError, match="target column at row 3"):
            load_csv(path, "y")


class TestImpute:
    def test_numeric_mean(self):
        d = Dataset(np.array([[1.0], [np.nan], [3.0]]), np.array([0, 1, 0]),
                    ["a"], ["u", "v"])
        filled = impute_missing(d)
        assert filled.features[1, 0] == 2.0
        assert not filled.has_missing()

    def test_ordinal_mode_smallest_on_tie(self):
        d = Dataset(np.array([[0.0], [0.0], [1.0], [np.nan]]),
                    np.array([0, 1, 0, 1]), ["a"], ["u", "v"],
                    ordinal_columns=np.array([True]))
        assert impute_missing(d).features[3, 0] == 0.0
        tied = Dataset(np.array([[0.0], [1.0], [np.nan]]), np.array([0, 1, 0]),
                       ["a"], ["u", "v"], ordinal_columns=np.array([True]))
        assert impute_missing(tied).features[2, 0] == 0.0

    def test_all_missing_column_rejected(self):
        d = Dataset(np.array([[np.nan, 1.0], [np.nan, 2.0]]), np.array([0, 1]),
                    ["a", "b"], ["u", "v"])
        with pytest.raises(ValueError, match="entirely missing"):
            impute_missing(d)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for trial in range(20):
            x = rng.normal(size=(12, 4))
            x[rng.random((12, 4)) < 0.3] = np.nan
            x[0] = 1.0  # keep every column observed somewhere
            labels = rng.integers(0, 2, 12)
            labels[:2] = [0, 1]
            d = Dataset(x, labels, list("abcd"), ["u", "v"],
                        ordinal_columns=np.array([True, False, False, True]))
            once = impute_missing(d)
            twice = impute_missing(once)
            np.testing.assert_array_equal(once.features, twice.features)


class TestSplits:
    def test_fraction_floor(self):
        d = _tiny(10)
        plan = split_train_test(d, 0.8, seed=0)
        assert plan.train_indices.size == 8 and plan.test_indices.size == 2
        plan = split_train_test(d, 0.999, seed=0)
        assert plan.train_indices.size == 9 and plan.test_indices.size == 1

    def test_deterministic(self):
        d = _tiny(30)
        a = split_train_test(d, 0.7, seed=9)
        b = split_train_test(d, 0.7, seed=9)
        np.testing.assert_array_equal(a.train_indices, b.train_indices)
        np.testing.assert_array_equal(a.test_indices, b.test_indices)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            split_train_test(_tiny(3), 0.01, seed=0)
        with pytest.raises(ValueError):
            split_train_test(_tiny(2), 0.99, seed=0)

    def test_partition_over_many_seeds(self):
        d = _tiny(23)
        for seed in range(120):
            plan = split_train_test(d, 0.7, seed=seed)
            both = np.concatenate([plan.train_indices, plan.test_indices])
            np.testing.assert_array_equal(np.sort(both), np.arange(23))

    def test_kfold_sizes(self):
        d = _tiny(14)
        plan = split_train_test(d, 10 / 14, seed=1)
        folds = kfold_indices(plan, 5, seed=2).folds
        assert sorted(f.size for f in folds) == [2, 2, 2, 2, 2]
        plan11 = split_train_test(_tiny(13), 11 / 13, seed=1)
        folds11 = kfold_indices(plan11, 5, seed=2).folds
        assert [f.size for f in folds11] == [3, 2, 2, 2, 2]

    def test_kfold_partitions_train(self):
        d = _tiny(29)
        for seed in range(40):
            plan = split_train_test(d, 0.75, seed=seed)
            folds = kfold_indices(plan, 4, seed=seed).folds
            merged = np.sort(np.concatenate(folds))
            np.testing.assert_array_equal(merged, np.sort(plan.train_indices))

    def test_kfold_bad_k(self):
        plan = split_train_test(_tiny(10), 0.8, seed=0)
        with pytest.raises(ValueError):
            kfold_indices(plan, 1, seed=0)
        with pytest.raises(ValueError):
            kfold_indices(plan, 9, seed=0)


class TestSerialization:
    def test_json_round_trip(self):
        d = _tiny(6)
        obj = dataset_to_json_dict(d)
        assert set(obj) == {"feature_names", "class_names", "features", "labels"}
        back = dataset_from_json_dict(json.loads(json.dumps(obj)))
        np.testing.assert_array_equal(back.features, d.features)
        np.testing.assert_array_equal(back.labels, d.labels)
        assert back.class_names == d.class_names

    def test_json_rejects_missing(self):
        d = Dataset(np.array([[np.nan], [1.0]]), np.array([0, 1]), ["a"], ["u", "v"])
        with pytest.raises(ValueError, match="impute"):
            dataset_to_json_dict(d)

    def test_csv_round_trip(self, tmp_path):
        d = _tiny(8)
        path = tmp_path / "round.csv"
        save_dataset_csv(d, path, target_name="y")
        back = load_csv(path, "y")
        np.testing.assert_allclose(back.features, d.features)
        assert back.labels.tolist() == d.labels.tolist()


class TestDatasetInvariants:
    def test_class_coverage_enforced(self):
        with pytest.raises(ValueError, match="every class id"):
            Dataset(np.ones((3, 1)), np.array([0, 0, 0]), ["a"], ["u", "v"])

    def test_label_range_enforced(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 1)), np.array([0, 2]), ["a"], ["u", "v"])

    def test_needs_two_classes(self):
        with pytest.raises(ValueError, match="fewer than 2"):
            Dataset(np.ones((2, 1)), np.array([0, 0]), ["a"], ["u"])


def _tiny(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=(n, 2))
    y = (np.arange(n) % 2).astype(np.int64)
    return Dataset(x, y, ["a", "b"], ["u", "v"])
