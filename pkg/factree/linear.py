"""Three-factor time-series regression by ordinary least squares:

    R(t) [- rf(t)] = a + b*mex(t) + s*smb(t) + h*hml(t) + e(t)
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import logs
from . import errors

log = logs.get(__name__)

# smallest |R[i, i]| relative to the largest before the design is rank deficient
RANK_TOLERANCE = 1e-12

@dataclass(frozen=True)
class FactorLoadings:
    a: float
    b: float
    s: float
    h: float
    r_squared: float
    residual_variance: float
    n: int
    residual_mean: float = 0.0
    excess: bool = False
    target: str = None

    @property
    def coefficients(self):
        return (self.a, self.b, self.s, self.h)

    def to_dict(self):
        return {
            'target': self.target,
            'excess': self.excess,
            'n': self.n,
            'a': self.a,
            'b': self.b,
            's': self.s,
            'h': self.h,
            'r_squared': self.r_squared,
            'residual_variance': self.residual_variance,
            'residual_mean': self.residual_mean,
            }

def design_matrix(features):
    features = np.asarray(features, dtype=float)
    return np.column_stack([np.ones(len(features)), features])

def solve_least_squares(X, y):
    """Solves min |X b - y| through a reduced QR factorization of *X*."""
    q, r = np.linalg.qr(X, mode='reduced')
    diag = np.abs(np.diag(r))
    if diag.max() == 0 or diag.min() < RANK_TOLERANCE * diag.max():
        raise errors.RankDeficient('design matrix is rank deficient '
            '(|R| diagonal min/max = {:.3g})'.format(
                diag.min() / diag.max() if diag.max() else 0.0))
    return scipy.linalg.solve_triangular(r, q.T @ y, lower=False)

def fit_ols(dataset, target=0, excess=False, rf=None):
    """Regresses one target column (index or ticker) of *dataset* on a
    constant and the three factors.

    With *excess*, the regressand is the target minus *rf* (or the dataset's
    own rf column when *rf* is None).
    """
    if isinstance(target, str):
        target = dataset.target_index(target)
    name = dataset.target_names[target]

    n = dataset.n
    if n < 5:
        raise errors.TooShort('OLS needs more rows than its 4 parameters, got {}'.format(n))

    y = np.array(dataset.targets[:, target], dtype=float)
    if excess:
        if rf is None:
            rf = dataset.rf
        if rf is None:
            raise errors.UsageError('excess returns need a risk-free series')
        rf = np.asarray(rf, dtype=float)
        if rf.shape != y.shape:
            raise errors.LengthMismatch('rf has {} values for {} rows'.format(len(rf), n))
        y = y - rf

    X = design_matrix(dataset.features)
    coef = solve_least_squares(X, y)

    residuals = y - X @ coef
    ssr = float(residuals @ residuals)
    centered = y - y.mean()
    sst = float(centered @ centered)
    # a constant regressand leaves nothing to explain
    constant = sst == 0 or bool(np.all(y == y[0]))
    r_squared = 0.0 if constant else min(max(1.0 - ssr / sst, 0.0), 1.0)

    a, b, s, h = (float(c) for c in coef)
    log.debug('%s: a=%.3g b=%.3g s=%.3g h=%.3g r2=%.3f', name, a, b, s, h, r_squared)
    return FactorLoadings(a, b, s, h, r_squared,
        residual_variance=ssr / (n - X.shape[1]), n=n,
        residual_mean=float(residuals.mean()), excess=bool(excess), target=name)
