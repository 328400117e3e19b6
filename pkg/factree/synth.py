"""Seeded synthetic datasets: heavy-tailed factor draws and target returns
with planted three-factor loadings."""
import numpy as np
import pandas as pd

from . import logs
from . import errors
from .ingest import Dataset, FEATURES

log = logs.get(__name__)

START_DATE = '2015-01-05'

# Student-t degrees of freedom for the factor draws
TAIL_DOF = 4
# daily scale of each factor (decimal returns)
FACTOR_SCALE = np.array([0.010, 0.005, 0.005])
FACTOR_MEAN = np.array([0.0004, 0.0, -0.0001])

NOISE_SCALE = 0.008
RF_DAILY = 0.00005

def default_loadings(tickers, rng):
    """(a, b, s, h) per ticker: zero intercept, market beta near 1."""
    return {t: (0.0, rng.uniform(0.6, 1.4), rng.uniform(-0.5, 0.5),
        rng.uniform(-0.5, 0.5)) for t in tickers}

def synthetic_dataset(n=1259, tickers=('A', 'B'), seed=0, loadings=None, start=START_DATE):
    """Returns a `Dataset` of *n* business days.

    Factors are scaled Student-t draws; each target is
    `a + b*mex + s*smb + h*hml + noise` with the given (or random) loadings.
    The same *seed* always yields the same dataset.
    """
    tickers = tuple(tickers)
    if n < 2:
        raise errors.TooShort('a dataset needs at least 2 rows, got {}'.format(n))
    if not tickers:
        raise errors.UsageError('at least one ticker is required')

    rng = np.random.default_rng(seed)
    if loadings is None:
        loadings = default_loadings(tickers, rng)
    missing = [t for t in tickers if t not in loadings]
    if missing:
        raise errors.UsageError('no loadings for: {}'.format(', '.join(missing)))

    # unit variance before scaling
    draws = rng.standard_t(TAIL_DOF, size=(n, len(FEATURES)))
    features = FACTOR_MEAN + FACTOR_SCALE * draws / np.sqrt(TAIL_DOF / (TAIL_DOF - 2))

    coef = np.array([loadings[t] for t in tickers], dtype=float)
    noise = rng.normal(0.0, NOISE_SCALE, size=(n, len(tickers)))
    targets = coef[:, 0] + features @ coef[:, 1:].T + noise

    dates = pd.bdate_range(start, periods=n).to_numpy().astype('datetime64[D]')
    log.debug('synthesized %s rows for %s (seed %s)', n, ', '.join(tickers), seed)
    return Dataset(dates, features, targets, tickers, rf=np.full(n, RF_DAILY))
