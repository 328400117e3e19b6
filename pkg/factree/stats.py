"""Descriptive statistics for return series: the count/mean/std/quartile
summary, bias-adjusted skewness and excess kurtosis, and the sample
covariance matrix."""
from dataclasses import dataclass

import numpy as np
import scipy.stats

from . import logs
from . import errors
from .ingest import FEATURES

log = logs.get(__name__)

QUANTILES = (0.25, 0.5, 0.75)

@dataclass(frozen=True)
class StatsSummary:
    """Summary of one series. `std` is None below 2 observations, `skew`
    below 3 and `excess_kurtosis` below 4; both are also None for a series
    with zero variance."""
    count: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float
    skew: float = None
    excess_kurtosis: float = None

    @property
    def variance(self):
        return None if self.std is None else self.std ** 2

    def to_dict(self):
        return {
            'count': self.count,
            'mean': self.mean,
            'std': self.std,
            'min': self.min,
            '25%': self.q25,
            '50%': self.median,
            '75%': self.q75,
            'max': self.max,
            'skew': self.skew,
            'kurtosis': self.excess_kurtosis,
            }

@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    labels: tuple
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'labels', tuple(self.labels))

    def __getitem__(self, key):
        a, b = key
        return self.values[self.labels.index(a), self.labels.index(b)]

    def to_dict(self):
        return {a: dict(zip(self.labels, row.tolist()))
            for a, row in zip(self.labels, self.values)}

@dataclass(frozen=True)
class StatsTable:
    """Summaries keyed by column name (targets first, then factors) and the
    covariance matrix of the targets."""
    summaries: dict
    covariance: CovarianceMatrix
    n: int

def _series(x):
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise errors.EmptySeries('cannot summarize an empty series')
    if not np.isfinite(x).all():
        raise errors.StatsError('series contains non-finite values')
    return x

def _check_moment_input(x, minimum, what):
    x = _series(x)
    if x.size < minimum:
        raise errors.TooShort('{} needs at least {} observations, got {}'.format(
            what, minimum, x.size))
    # a constant series has exactly zero central moments
    if np.all(x == x[0]):
        raise errors.ZeroVariance('{} is undefined for a constant series'.format(what))
    return x

def skewness(x):
    """Bias-adjusted sample skewness (G1)."""
    x = _check_moment_input(x, 3, 'skewness')
    return float(scipy.stats.skew(x, bias=False))

def excess_kurtosis(x):
    """Bias-adjusted sample excess kurtosis (G2); 0 for a normal sample."""
    x = _check_moment_input(x, 4, 'kurtosis')
    return float(scipy.stats.kurtosis(x, fisher=True, bias=False))

def describe(x):
    """Returns a `StatsSummary` of *x*: sample std with n-1 denominator,
    quartiles by linear interpolation between order statistics."""
    x = _series(x)
    n = x.size

    q25, median, q75 = (float(q) for q in np.quantile(x, QUANTILES))
    constant = bool(np.all(x == x[0]))

    def moment(func, minimum):
        if n < minimum or constant:
            return None
        return func(x)

    return StatsSummary(
        count=n,
        mean=float(np.mean(x)),
        std=float(np.std(x, ddof=1)) if n >= 2 else None,
        min=float(np.min(x)),
        q25=q25,
        median=median,
        q75=q75,
        max=float(np.max(x)),
        skew=moment(skewness, 3),
        excess_kurtosis=moment(excess_kurtosis, 4),
        )

def covariance_matrix(targets, labels=None):
    """Sample covariance matrix (n-1 denominator) of the columns of
    *targets*."""
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets.reshape(-1, 1)
    n, T = targets.shape
    if n < 2:
        raise errors.TooShort('covariance needs at least 2 rows, got {}'.format(n))
    if labels is None:
        labels = tuple(str(i) for i in range(T))

    centered = targets - targets.mean(axis=0)
    values = centered.T @ centered / (n - 1)
    # exact symmetry
    values = (values + values.T) / 2
    return CovarianceMatrix(labels, values)

def summarize(dataset, include_factors=True):
    """Summaries for every target column (and the three factors) plus the
    target covariance matrix."""
    summaries = {}
    for i, name in enumerate(dataset.target_names):
        summaries[name] = describe(dataset.targets[:, i])
    if include_factors:
        for i, name in enumerate(FEATURES):
            if name in summaries:
                raise errors.StatsError('target name clashes with factor: {}'.format(name))
            summaries[name] = describe(dataset.features[:, i])

    log.debug('summarized %s columns over %s rows', len(summaries), dataset.n)
    return StatsTable(summaries,
        covariance_matrix(dataset.targets, dataset.target_names), dataset.n)
