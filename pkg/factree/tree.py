"""Depth-limited binary regression trees over the three factor features,
for one target or several jointly.

A split (feature j, threshold k) sends a row left iff `x[j] < k`. The cost of
a split is the summed squared error of both children against their means,
summed over all targets, and the greedy search picks the split with the
lowest cost. Candidate thresholds are midpoints between consecutive distinct
feature values; ties go to the lowest feature index, then the smallest
threshold.

The search sorts each feature once and sweeps running sums of the targets
and their squares, so every candidate of a feature is costed in one pass.
"""
import os
from dataclasses import dataclass, field

import numpy as np

from . import logs
from . import codec
from . import errors
from . import utils
from .ingest import FEATURES

log = logs.get(__name__)

# sweep costs this close (relative) to the lowest one count as tied
TIE_RTOL = 1e-12

@dataclass(frozen=True)
class FitConfig:
    max_depth: int = 1
    min_samples_leaf: int = 1
    min_cost_drop: float = 0.0
    # feature indices the search may split on
    features: tuple = (0, 1, 2)

    def __post_init__(self):
        object.__setattr__(self, 'features', tuple(sorted(set(self.features))))
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise errors.InvalidConfig('max_depth must be an integer >= 1: {!r}'.format(
                self.max_depth))
        if int(self.min_samples_leaf) != self.min_samples_leaf or self.min_samples_leaf < 1:
            raise errors.InvalidConfig('min_samples_leaf must be an integer >= 1: {!r}'.format(
                self.min_samples_leaf))
        if not self.min_cost_drop >= 0:
            raise errors.InvalidConfig('min_cost_drop must be >= 0: {!r}'.format(
                self.min_cost_drop))
        if not self.features or not set(self.features) <= set(range(len(FEATURES))):
            raise errors.InvalidConfig('features must be a nonempty subset of {}: {!r}'.format(
                tuple(range(len(FEATURES))), self.features))

    def to_dict(self):
        return {
            'max_depth': self.max_depth,
            'min_samples_leaf': self.min_samples_leaf,
            'min_cost_drop': self.min_cost_drop,
            'features': list(self.features),
            }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['max_depth']), int(d['min_samples_leaf']),
            float(d['min_cost_drop']), tuple(d.get('features', (0, 1, 2))))

@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    left_count: int
    right_count: int
    cost: float

    @property
    def count(self):
        return self.left_count + self.right_count

    @property
    def feature_name(self):
        return FEATURES[self.feature]

@dataclass(frozen=True)
class Leaf:
    prediction: tuple
    count: int
    sse: float

    is_leaf = True

    @property
    def depth(self):
        return 0

@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: object
    right: object

    is_leaf = False

    @property
    def count(self):
        return self.left.count + self.right.count

    @property
    def sse(self):
        """Summed error of the leaves below this node."""
        return self.left.sse + self.right.sse

    @property
    def depth(self):
        return 1 + max(self.left.depth, self.right.depth)

    @property
    def feature_name(self):
        return FEATURES[self.feature]

@dataclass(frozen=True)
class Tree:
    root: object
    target_names: tuple
    config: FitConfig = field(default_factory=FitConfig)
    total_sse_before: float = 0.0
    total_sse_after: float = 0.0

    @property
    def depth(self):
        return self.root.depth

    @property
    def count(self):
        return self.root.count

    def leaves(self):
        """Leaves in left-to-right order."""
        return leaves(self.root)

def leaves(node):
    out = []
    stack = [node]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            out.append(node)
        else:
            stack.extend((node.right, node.left))
    return out

##
## cost
##

def node_sse(targets):
    """Summed squared error of a k x T block of targets around its column
    means, summed over the T columns."""
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets.reshape(-1, 1)
    if targets.shape[0] == 0:
        raise errors.EmptyNode('node has no samples')
    centered = targets - targets.mean(axis=0)
    return float(np.sum(centered * centered))

def _midpoint(a, b):
    mid = a + (b - a) / 2
    # adjacent floats: keep a strictly left of the threshold
    return b if mid <= a else mid

def candidate_thresholds(feature_values):
    """Midpoints between consecutive distinct sorted values."""
    values = np.unique(np.asarray(feature_values, dtype=float))
    return [_midpoint(a, b) for a, b in zip(values[:-1], values[1:])]

def split_cost(dataset, rows, feature, threshold, min_samples_leaf=1):
    """Costs the split of *rows* on *feature* at *threshold*."""
    rows = np.asarray(rows)
    left = dataset.features[rows, feature] < threshold
    left_count = int(left.sum())
    right_count = len(rows) - left_count

    if min(left_count, right_count) < max(min_samples_leaf, 1):
        raise errors.DegenerateSplit(
            '{} < {!r} gives children of {} and {} rows (min_samples_leaf={})'.format(
                FEATURES[feature], threshold, left_count, right_count, min_samples_leaf))

    y = dataset.targets[rows]
    cost = node_sse(y[left]) + node_sse(y[~left])
    return SplitCandidate(int(feature), float(threshold), left_count, right_count, cost)

def _scan_feature(x, y, min_samples_leaf):
    """Costs every split position of one feature with running sums.

    Returns the sorted feature values, the cost of putting the first i+1
    sorted rows left (for i in 0..k-2) and a mask of the positions that are
    valid splits.
    """
    order = np.argsort(x, kind='stable')
    xs = x[order]
    # centering keeps the running sums small
    ys = y[order] - y.mean(axis=0)

    k = len(xs)
    sums = np.cumsum(ys, axis=0)
    squares = np.cumsum(ys * ys, axis=0)
    total, total_sq = sums[-1], squares[-1]
    sums, squares = sums[:-1], squares[:-1]

    n_left = np.arange(1, k, dtype=float)[:, None]
    n_right = k - n_left

    left = squares - sums * sums / n_left
    right = (total_sq - squares) - (total - sums) ** 2 / n_right
    cost = np.sum(left + right, axis=1)

    n_left = n_left[:, 0]
    valid = ((xs[:-1] < xs[1:])
        & (n_left >= min_samples_leaf)
        & (k - n_left >= min_samples_leaf))
    return xs, cost, valid

def best_split(dataset, rows, config=None):
    """Returns the lowest-cost `SplitCandidate` for *rows*, or None if there
    is no valid split or the cost drop is not positive and at least
    `config.min_cost_drop`."""
    config = config or FitConfig()
    rows = np.asarray(rows)
    msl = config.min_samples_leaf
    if len(rows) < 2 * msl:
        return None

    y = dataset.targets[rows]
    scans = []
    for feature in config.features:
        xs, cost, valid = _scan_feature(dataset.features[rows, feature], y, msl)
        positions = np.flatnonzero(valid)
        if positions.size:
            scans.append((feature, xs, positions, cost[positions]))

    if not scans:
        return None

    # the same partition reached through a different row order can cost a
    # few ulps more or less, so near-equal costs tie
    parent = node_sse(y)
    lowest = min(float(costs.min()) for _, _, _, costs in scans)
    limit = lowest + TIE_RTOL * max(abs(lowest), parent)
    for feature, xs, positions, costs in scans:
        tied = np.flatnonzero(costs <= limit)
        if tied.size:
            # positions are in ascending threshold order
            i = positions[tied[0]]
            threshold = _midpoint(xs[i], xs[i + 1])
            break

    split = split_cost(dataset, rows, feature, threshold, msl)
    drop = parent - split.cost
    if drop <= 0 or drop < config.min_cost_drop:
        log.debug('no split: drop %.6g on %s rows', drop, len(rows))
        return None
    return split

##
## fitting
##

def _leaf(targets):
    return Leaf(tuple(float(m) for m in targets.mean(axis=0)), int(len(targets)),
        node_sse(targets))

def _grow(dataset, rows, config, depth):
    if depth < config.max_depth:
        split = best_split(dataset, rows, config)
        if split is not None:
            left = dataset.features[rows, split.feature] < split.threshold
            log.debug('depth %s: %s < %.6g (%s/%s rows, cost %.6g)', depth,
                split.feature_name, split.threshold, split.left_count,
                split.right_count, split.cost)
            return Internal(split.feature, split.threshold,
                _grow(dataset, rows[left], config, depth + 1),
                _grow(dataset, rows[~left], config, depth + 1))
    return _leaf(dataset.targets[rows])

def fit(dataset, config=None):
    """Fits a tree to all target columns of *dataset* jointly."""
    config = config or FitConfig()
    rows = np.arange(dataset.n)
    root = _grow(dataset, rows, config, 0)

    tree = Tree(root, tuple(dataset.target_names), config,
        node_sse(dataset.targets), float(sum(leaf.sse for leaf in leaves(root))))
    log.debug('fitted %s (depth %s): sse %.6g -> %.6g', ','.join(tree.target_names),
        tree.depth, tree.total_sse_before, tree.total_sse_after)
    return tree

##
## evaluation
##

def predict(tree, x):
    """Returns the prediction vector of the leaf reached by one feature
    vector *x*."""
    node = tree.root
    while not node.is_leaf:
        node = node.left if x[node.feature] < node.threshold else node.right
    return np.array(node.prediction)

def apply(tree, X):
    """Returns the index (into `tree.leaves()`) of the leaf each row of *X*
    reaches."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.empty(len(X), dtype=int)
    counter = [0]

    def walk(node, rows):
        if node.is_leaf:
            out[rows] = counter[0]
            counter[0] += 1
            return
        left = X[rows, node.feature] < node.threshold
        walk(node.left, rows[left])
        walk(node.right, rows[~left])

    walk(tree.root, np.arange(len(X)))
    return out

def predict_many(tree, X):
    """Predictions for every row of *X* as an m x T array."""
    predictions = np.array([leaf.prediction for leaf in tree.leaves()])
    return predictions[apply(tree, X)]

def partition(tree, dataset):
    """Row indices of *dataset* reaching each leaf, in leaf order."""
    leaf_ids = apply(tree, dataset.features)
    return [np.flatnonzero(leaf_ids == i) for i in range(len(tree.leaves()))]

def feature_importances(tree, dataset):
    """Share of the total error drop achieved by splits on each feature
    (length 3, sums to 1 unless the tree is a single leaf)."""
    drops = np.zeros(len(FEATURES))

    def walk(node, rows):
        if node.is_leaf:
            return
        left = dataset.features[rows, node.feature] < node.threshold
        y = dataset.targets[rows]
        drops[node.feature] += node_sse(y) - node_sse(y[left]) - node_sse(y[~left])
        walk(node.left, rows[left])
        walk(node.right, rows[~left])

    walk(tree.root, np.arange(dataset.n))
    total = drops.sum()
    return drops / total if total > 0 else drops

##
## serialization
##

def node_to_dict(node):
    if node.is_leaf:
        return {
            'prediction': list(node.prediction),
            'count': node.count,
            'sse': node.sse,
            }
    return {
        'feature': node.feature,
        'threshold': node.threshold,
        'left': node_to_dict(node.left),
        'right': node_to_dict(node.right),
        }

def node_from_dict(d):
    if 'prediction' in d:
        return Leaf(tuple(float(v) for v in d['prediction']), int(d['count']),
            float(d['sse']))
    return Internal(int(d['feature']), float(d['threshold']),
        node_from_dict(d['left']), node_from_dict(d['right']))

def tree_to_dict(tree):
    return {
        'target_names': list(tree.target_names),
        'config': tree.config.to_dict(),
        'total_sse_before': tree.total_sse_before,
        'total_sse_after': tree.total_sse_after,
        'root': node_to_dict(tree.root),
        }

def tree_from_dict(d):
    try:
        return Tree(node_from_dict(d['root']), tuple(d['target_names']),
            FitConfig.from_dict(d['config']), float(d['total_sse_before']),
            float(d['total_sse_after']))
    except (KeyError, TypeError, ValueError) as e:
        raise errors.DecodeError('invalid tree: {!r}'.format(e))

def parse_tree(raw, codec_name='json'):
    """Decodes a tree serialized with *codec_name*."""
    d = codec.get(codec_name)._decode(raw)
    if not isinstance(d, dict):
        raise errors.DecodeError('invalid tree: expected a mapping')
    return tree_from_dict(d)

def read_tree(path):
    """Reads a tree saved by `write_tree`; the codec follows the extension
    (JSON unless it names another codec)."""
    return parse_tree(utils.path.read_bytes(path), codec.for_path(path) or 'json')

def write_tree(tree, path):
    data = codec.get(codec.for_path(path) or 'json')._encode(tree_to_dict(tree))
    utils.path.write_bytes(path, data)
    log.info('tree written: %s', os.path.basename(path))
