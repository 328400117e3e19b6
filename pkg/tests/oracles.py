"""Slow, independent reference implementations used to check the fast paths."""
from fractions import Fraction
from decimal import Decimal, localcontext

import numpy as np

PRECISION = 60

def sse(block):
    """Two-pass squared error of a k x T block, summed over columns."""
    total = 0.0
    for column in np.asarray(block, dtype=float).reshape(len(block), -1).T:
        mean = sum(column) / len(column)
        total += sum((v - mean) ** 2 for v in column)
    return total

def brute_force_split(X, Y, min_samples_leaf=1):
    """Exhaustive double loop over every feature and every midpoint between
    distinct sorted values.

    Returns `(feature, threshold, left_mask, cost)` for the lowest cost,
    ties to the lowest feature then the smallest threshold, or None.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float).reshape(len(X), -1)
    best = None
    for j in range(X.shape[1]):
        values = sorted(set(X[:, j].tolist()))
        for a, b in zip(values[:-1], values[1:]):
            threshold = (a + b) / 2
            left = X[:, j] < threshold
            k = int(left.sum())
            if k < min_samples_leaf or len(X) - k < min_samples_leaf:
                continue
            cost = sse(Y[left]) + sse(Y[~left])
            if best is None or cost < best[3]:
                best = (j, threshold, left, cost)
    return best

##
## exact moments
##

def _fractions(x):
    return [Fraction(float(v)) for v in x]

def _central_sums(x):
    x = _fractions(x)
    n = len(x)
    mean = sum(x) / n
    return n, [sum((v - mean) ** k for v in x) for k in (2, 3, 4)]

def exact_skewness(x):
    """G1 = n^2 / ((n-1)(n-2)) * m3 / s^3, evaluated with rationals and a
    high-precision square root."""
    n, (s2, s3, _) = _central_sums(x)
    var = s2 / (n - 1)
    m3 = s3 / n
    with localcontext() as ctx:
        ctx.prec = PRECISION
        s = (Decimal(var.numerator) / Decimal(var.denominator)).sqrt()
        coef = Fraction(n * n, (n - 1) * (n - 2)) * m3
        value = Decimal(coef.numerator) / Decimal(coef.denominator) / s ** 3
    return float(value)

def exact_excess_kurtosis(x):
    """G2 = n(n+1) / ((n-1)(n-2)(n-3)) * sum((x - mean)^4) / s^4
    - 3(n-1)^2 / ((n-2)(n-3)), all rational."""
    n, (s2, _, s4) = _central_sums(x)
    var = s2 / (n - 1)
    value = (Fraction(n * (n + 1), (n - 1) * (n - 2) * (n - 3)) * s4 / var ** 2
        - Fraction(3 * (n - 1) ** 2, (n - 2) * (n - 3)))
    return float(value)

def exact_covariance(columns):
    cols = [_fractions(c) for c in columns]
    n = len(cols[0])
    means = [sum(c) / n for c in cols]
    return [[float(sum((a - ma) * (b - mb) for a, b in zip(ca, cb)) / (n - 1))
        for cb, mb in zip(cols, means)] for ca, ma in zip(cols, means)]

##
## exact least squares
##

def normal_equations(features, y):
    """Solves (X'X) b = X'y for X = [1, features] by Gauss-Jordan
    elimination over rationals."""
    rows = [[Fraction(1)] + _fractions(r) for r in np.asarray(features)]
    y = _fractions(y)
    p = len(rows[0])
    A = [[sum(r[i] * r[j] for r in rows) for j in range(p)] for i in range(p)]
    b = [sum(r[i] * v for r, v in zip(rows, y)) for i in range(p)]

    for col in range(p):
        pivot = next(i for i in range(col, p) if A[i][col] != 0)
        A[col], A[pivot] = A[pivot], A[col]
        b[col], b[pivot] = b[pivot], b[col]
        for i in range(p):
            if i != col and A[i][col] != 0:
                f = A[i][col] / A[col][col]
                A[i] = [a - f * c for a, c in zip(A[i], A[col])]
                b[i] -= f * b[col]
    return [float(b[i] / A[i][i]) for i in range(p)]
