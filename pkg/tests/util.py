import os

import numpy as np

from factree.ingest import Dataset

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

def fixture_path(name):
    return os.path.join(FIXTURES, name)

def read_fixture(name):
    with open(fixture_path(name), 'rb') as fp:
        return fp.read()

def make_dataset(features, targets, names=None):
    """Dataset over consecutive calendar days."""
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets.reshape(-1, 1)
    n = len(features)
    dates = np.datetime64('2020-01-01') + np.arange(n)
    names = names or tuple('T{}'.format(i) for i in range(targets.shape[1]))
    return Dataset(dates, features, targets, tuple(names))

def random_dataset(rng, n, T, distinct=True):
    """Random features and targets; *distinct* draws continuous values,
    otherwise features repeat on a coarse grid."""
    if distinct:
        features = rng.normal(size=(n, 3))
    else:
        features = rng.integers(-3, 4, size=(n, 3)) / 2.0
    targets = rng.normal(size=(n, T)) * rng.uniform(0.5, 3.0, size=T)
    return make_dataset(features, targets)
