import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from factree import tree, errors
from factree.tree import FitConfig, Leaf, Internal

from . import oracles
from .util import make_dataset, random_dataset

##
## cost
##

@pytest.mark.parametrize('targets, expected', [
    ([[3.0, -1.0]], 0.0),
    ([0, 0, 10, 10], 50.0),
    ([[0, 0], [2, 2]], 4.0),
    ])
def test_node_sse(targets, expected):
    assert tree.node_sse(targets) == expected

def test_node_sse_empty():
    with pytest.raises(errors.EmptyNode):
        tree.node_sse(np.empty((0, 2)))

@pytest.mark.parametrize('values, expected', [
    ([0, 1, 2, 3], [0.5, 1.5, 2.5]),
    ([1, 1, 1], []),
    ([3, 1, 1, 2], [1.5, 2.5]),
    ])
def test_candidate_thresholds(values, expected):
    assert tree.candidate_thresholds(values) == expected

def test_candidate_threshold_between_adjacent_floats():
    a = 1.0
    b = np.nextafter(a, 2.0)
    (t,) = tree.candidate_thresholds([a, b])
    assert a < t <= b

def test_split_cost():
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], [0, 0, 10, 10])
    rows = np.arange(4)

    split = tree.split_cost(ds, rows, 0, 1.5)
    assert split.cost == 0
    assert (split.left_count, split.right_count) == (2, 2)

    split = tree.split_cost(ds, rows, 0, 0.5)
    assert split.cost == pytest.approx(200 / 3, rel=1e-12)
    assert (split.left_count, split.right_count) == (1, 3)

def test_split_cost_joint():
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]],
        [[0, 10], [0, 10], [10, 0], [10, 0]])
    assert tree.split_cost(ds, np.arange(4), 0, 1.5).cost == 0

@pytest.mark.parametrize('threshold, min_samples_leaf', [
    (-1.0, 1),
    (3.5, 1),
    (0.5, 2),
    ])
def test_split_cost_degenerate(threshold, min_samples_leaf):
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], [0, 0, 10, 10])
    with pytest.raises(errors.DegenerateSplit):
        tree.split_cost(ds, np.arange(4), 0, threshold, min_samples_leaf)

##
## split search
##

def test_best_split_separable(separable):
    split = tree.best_split(separable, np.arange(4))
    assert split.feature == 0
    assert split.threshold == 0.5
    assert split.cost == 0

def test_best_split_constant_features():
    ds = make_dataset(np.ones((5, 3)), np.arange(5))
    assert tree.best_split(ds, np.arange(5)) is None

def test_best_split_tie_goes_to_lowest_feature():
    x = [[0, 0, 0], [1, 1, 1], [2, 2, 2], [3, 3, 3]]
    ds = make_dataset(x, [0, 0, 10, 10])
    split = tree.best_split(ds, np.arange(4))
    assert (split.feature, split.threshold) == (0, 1.5)

def test_best_split_tie_goes_to_smallest_threshold():
    # thresholds 0.5 and 2.5 both isolate one of the two outer points
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], [5, 0, 0, 5])
    split = tree.best_split(ds, np.arange(4))
    assert split.threshold == 0.5

def test_best_split_tie_with_rounded_costs():
    # both features separate rows 0-5 from 6-11 but sort them differently,
    # so their running sums round differently
    x0 = np.arange(12.0)
    x1 = np.array([5, 3, 0, 4, 1, 2, 11, 7, 9, 6, 10, 8], dtype=float)
    X = np.column_stack([x0, x1, np.zeros(12)])
    rng = np.random.default_rng(11)
    for _ in range(500):
        y = np.r_[rng.normal(0, 0.01, 6), rng.normal(1, 0.01, 6)]
        split = tree.best_split(make_dataset(X, y), np.arange(12))
        assert (split.feature, split.threshold) == (0, 5.5)

def test_best_split_mirrored_threshold_tie():
    X = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]]
    rng = np.random.default_rng(12)
    for _ in range(500):
        a, b = rng.normal(size=2)
        split = tree.best_split(make_dataset(X, [a, b, b, a]), np.arange(4))
        if split is not None:
            assert split.threshold == 0.5

def test_best_split_min_samples_leaf():
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], [10, 0, 0, 0])
    assert tree.best_split(ds, np.arange(4)).threshold == 0.5
    split = tree.best_split(ds, np.arange(4), FitConfig(min_samples_leaf=2))
    assert (split.left_count, split.right_count) == (2, 2)
    assert tree.best_split(ds, np.arange(4), FitConfig(min_samples_leaf=3)) is None

def test_best_split_min_cost_drop():
    ds = make_dataset([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], [0, 0, 10, 10])
    assert tree.best_split(ds, np.arange(4), FitConfig(min_cost_drop=100.0)) is not None
    assert tree.best_split(ds, np.arange(4), FitConfig(min_cost_drop=100.1)) is None

def test_best_split_feature_subset(separable):
    assert tree.best_split(separable, np.arange(4), FitConfig(features=(1, 2))) is None

def test_best_split_matches_oracle_n32():
    rng = np.random.default_rng(32)
    ds = random_dataset(rng, 32, 2)
    split = tree.best_split(ds, np.arange(32))
    feature, _, left, cost = oracles.brute_force_split(ds.features, ds.targets)

    assert split.feature == feature
    assert np.array_equal(ds.features[:, split.feature] < split.threshold, left)
    assert split.cost == pytest.approx(cost, rel=1e-12)

@pytest.mark.parametrize('distinct', [True, False])
def test_fit_matches_brute_force(distinct):
    rng = np.random.default_rng(1000 + distinct)
    for _ in range(200):
        n = int(rng.integers(2, 65))
        T = int(rng.integers(1, 6))
        ds = random_dataset(rng, n, T, distinct)

        fitted = tree.fit(ds, FitConfig(max_depth=1))
        expected = oracles.brute_force_split(ds.features, ds.targets)

        if expected is None or expected[3] >= oracles.sse(ds.targets):
            assert fitted.root.is_leaf
            continue

        feature, _, left, cost = expected
        root = fitted.root
        if distinct:
            assert root.feature == feature
        # features on a grid can induce the same partition
        assert np.array_equal(ds.features[:, root.feature] < root.threshold, left)
        assert fitted.total_sse_after == pytest.approx(cost, rel=1e-12, abs=1e-12)

def test_joint_cost_is_sum_of_single_costs():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(4, 40))
        T = int(rng.integers(2, 6))
        ds = random_dataset(rng, n, T)
        rows = np.arange(n)
        feature = int(rng.integers(0, 3))
        thresholds = tree.candidate_thresholds(ds.features[:, feature])
        threshold = thresholds[int(rng.integers(0, len(thresholds)))]

        joint = tree.split_cost(ds, rows, feature, threshold).cost
        singles = sum(tree.split_cost(ds.select([name]), rows, feature, threshold).cost
            for name in ds.target_names)
        assert joint == pytest.approx(singles, rel=1e-12)

##
## fitting
##

def test_fit_separable(separable):
    fitted = tree.fit(separable)
    root = fitted.root

    assert isinstance(root, Internal)
    assert (root.feature, root.threshold) == (0, 0.5)
    assert root.left == Leaf((0.0,), 2, 0.0)
    assert root.right == Leaf((10.0,), 2, 0.0)
    assert fitted.total_sse_before == 100.0
    assert fitted.total_sse_after == 0.0
    assert fitted.depth == 1

def test_fit_constant_targets():
    rng = np.random.default_rng(3)
    ds = make_dataset(rng.normal(size=(10, 3)), np.full((10, 2), 0.25))
    fitted = tree.fit(ds)
    assert fitted.root.is_leaf
    assert fitted.root.prediction == (0.25, 0.25)
    assert fitted.total_sse_before == fitted.total_sse_after == 0.0

@pytest.mark.parametrize('max_depth', [1, 2, 3])
def test_fit_depth_and_counts(max_depth):
    rng = np.random.default_rng(max_depth)
    ds = random_dataset(rng, 60, 2)
    fitted = tree.fit(ds, FitConfig(max_depth=max_depth, min_samples_leaf=3))

    assert fitted.depth <= max_depth
    assert fitted.count == ds.n
    assert sum(leaf.count for leaf in fitted.leaves()) == ds.n
    assert all(leaf.count >= 3 for leaf in fitted.leaves())
    assert fitted.total_sse_after <= fitted.total_sse_before

def test_leaf_predictions_are_means():
    rng = np.random.default_rng(11)
    ds = random_dataset(rng, 50, 3)
    fitted = tree.fit(ds, FitConfig(max_depth=2))

    for leaf, rows in zip(fitted.leaves(), tree.partition(fitted, ds)):
        assert leaf.count == len(rows)
        assert np.allclose(leaf.prediction, ds.targets[rows].mean(axis=0), rtol=0, atol=1e-15)
        assert np.allclose(tree.predict_many(fitted, ds.features[rows]).mean(axis=0),
            leaf.prediction, rtol=1e-14, atol=0)

def test_leaf_prediction_is_optimal():
    rng = np.random.default_rng(12)
    ds = random_dataset(rng, 40, 2)
    fitted = tree.fit(ds)
    for leaf, rows in zip(fitted.leaves(), tree.partition(fitted, ds)):
        y = ds.targets[rows]
        for _ in range(20):
            other = np.array(leaf.prediction) + rng.normal(scale=0.1, size=2)
            assert np.sum((y - other) ** 2) >= leaf.sse

def test_joint_sse_is_sum_of_target_sse():
    rng = np.random.default_rng(13)
    ds = random_dataset(rng, 40, 3)
    fitted = tree.fit(ds, FitConfig(max_depth=2))
    per_target = sum(tree.node_sse(ds.targets[rows][:, i])
        for rows in tree.partition(fitted, ds) for i in range(ds.T))
    assert fitted.total_sse_after == pytest.approx(per_target, rel=1e-12)

##
## invariances
##

def _left_rows(fitted, ds):
    root = fitted.root
    return ds.features[:, root.feature] < root.threshold

def test_translation_invariance():
    rng = np.random.default_rng(21)
    for _ in range(50):
        ds = random_dataset(rng, int(rng.integers(5, 40)), 2)
        shift = np.zeros(2)
        shift[int(rng.integers(0, 2))] = rng.normal(scale=10)
        moved = make_dataset(ds.features, ds.targets + shift)

        a, b = tree.fit(ds), tree.fit(moved)
        assert a.root.feature == b.root.feature
        assert np.array_equal(_left_rows(a, ds), _left_rows(b, moved))
        assert np.allclose(np.array(b.root.left.prediction) - a.root.left.prediction,
            shift, atol=1e-9)

def test_monotone_transform_invariance():
    rng = np.random.default_rng(22)
    for _ in range(50):
        ds = random_dataset(rng, int(rng.integers(5, 40)), 2)
        j = int(rng.integers(0, 3))
        features = np.array(ds.features)
        features[:, j] = np.exp(features[:, j]) * 3 + 1
        moved = make_dataset(features, ds.targets)

        a, b = tree.fit(ds), tree.fit(moved)
        assert a.root.feature == b.root.feature
        assert np.array_equal(_left_rows(a, ds), _left_rows(b, moved))

def test_permutation_invariance():
    rng = np.random.default_rng(23)
    for _ in range(50):
        ds = random_dataset(rng, int(rng.integers(5, 40)), 3)
        order = rng.permutation(ds.n)
        # dates stay sorted; only the rows move
        shuffled = make_dataset(ds.features[order], ds.targets[order])

        a, b = tree.fit(ds), tree.fit(shuffled)
        assert (a.root.feature, a.root.threshold) == (b.root.feature, b.root.threshold)
        assert np.allclose(a.root.left.prediction, b.root.left.prediction, rtol=1e-12)
        assert a.total_sse_after == pytest.approx(b.total_sse_after, rel=1e-12)

@given(st.lists(st.tuples(
        st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)),
    min_size=2, max_size=30))
def test_cost_drop_is_nonnegative(rows):
    x = [[a, 0, 0] for a, _ in rows]
    y = [b for _, b in rows]
    ds = make_dataset(x, y)
    split = tree.best_split(ds, np.arange(ds.n))
    if split is not None:
        assert split.cost <= tree.node_sse(ds.targets)

##
## evaluation
##

def test_predict(separable):
    fitted = tree.fit(separable)
    assert tree.predict(fitted, [-5, 0, 0]).tolist() == [0.0]
    # equality goes right
    assert tree.predict(fitted, [0.5, 0, 0]).tolist() == [10.0]

def test_predict_single_leaf():
    t = tree.Tree(Leaf((0.5, -0.5), 3, 0.0), ('a', 'b'))
    for x in ([0, 0, 0], [100, -100, 5]):
        assert tree.predict(t, x).tolist() == [0.5, -0.5]

def test_feature_importances(separable):
    fitted = tree.fit(separable)
    assert tree.feature_importances(fitted, separable).tolist() == [1.0, 0.0, 0.0]

    leaf = tree.Tree(Leaf((0.0,), 4, 100.0), ('y',))
    assert tree.feature_importances(leaf, separable).tolist() == [0.0, 0.0, 0.0]

##
## config and serialization
##

@pytest.mark.parametrize('kwargs', [
    {'max_depth': 0},
    {'max_depth': 1.5},
    {'min_samples_leaf': 0},
    {'min_cost_drop': -1.0},
    {'min_cost_drop': float('nan')},
    {'features': ()},
    {'features': (3,)},
    ])
def test_invalid_config(kwargs):
    with pytest.raises(errors.InvalidConfig):
        FitConfig(**kwargs)

def test_tree_dict_round_trip():
    rng = np.random.default_rng(31)
    ds = random_dataset(rng, 40, 2)
    fitted = tree.fit(ds, FitConfig(max_depth=2))
    assert tree.tree_from_dict(tree.tree_to_dict(fitted)) == fitted

@pytest.mark.parametrize('name', ['tree.json', 'tree.msgpack'])
def test_write_read_tree(tmp_path, separable, name):
    fitted = tree.fit(separable)
    path = str(tmp_path / name)
    tree.write_tree(fitted, path)
    assert tree.read_tree(path) == fitted

def test_tree_from_invalid_dict():
    with pytest.raises(errors.DecodeError):
        tree.tree_from_dict({'root': {'feature': 0}})

##
## performance
##

def test_fit_performance():
    rng = np.random.default_rng(100)
    ds = random_dataset(rng, 100_000, 5)
    start = time.perf_counter()
    tree.fit(ds)
    assert time.perf_counter() - start < 1.0

def test_sweep_beats_brute_force():
    rng = np.random.default_rng(101)
    ds = random_dataset(rng, 400, 5)
    rows = np.arange(ds.n)

    start = time.perf_counter()
    expected = oracles.brute_force_split(ds.features, ds.targets)
    brute = time.perf_counter() - start

    sweeps = []
    for _ in range(5):
        start = time.perf_counter()
        split = tree.best_split(ds, rows)
        sweeps.append(time.perf_counter() - start)

    feature, _, left, _ = expected
    assert split.feature == feature
    assert np.array_equal(ds.features[:, feature] < split.threshold, left)
    assert brute >= 100 * min(sweeps)
