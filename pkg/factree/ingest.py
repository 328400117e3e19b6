"""Parsing of price and factor files, return and factor arithmetic, and date
alignment into a `Dataset`.

All values are held as decimal fractions (0.01 == 1% == 100bp) in read-only
numpy arrays. Dates are `datetime64[D]`.
"""
import io
import os
import re
import datetime
import functools
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import logs
from . import codec
from . import errors
from . import utils

log = logs.get(__name__)

FEATURES = ('mex', 'smb', 'hml')

DATE_FORMAT = '%Y-%m-%d'

DATE_COLUMN = 'Date'
PRICE_COLUMN = 'Adj Close'

FACTOR_COLUMNS = ('Mkt-RF', 'SMB', 'HML', 'RF')
# Ken French 2x3 names: (small|big) x (growth, neutral, value)
PORTFOLIO_COLUMNS = {
    'sg': 'SMALL LoBM',
    'sn': 'ME1 BM2',
    'sv': 'SMALL HiBM',
    'bg': 'BIG LoBM',
    'bn': 'ME2 BM2',
    'bv': 'BIG HiBM',
    }
# values the data library uses for missing observations
MISSING_CODES = (-99.99, -999.0)

UNITS = {'percent': 100.0, 'decimal': 1.0}

_rx_french_date = re.compile(r'^\d{8}$')

def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr

def to_date(value):
    """Converts a date-like value (ISO string, `datetime.date`,
    `numpy.datetime64`) to `datetime64[D]`."""
    if isinstance(value, str):
        try:
            return np.datetime64(datetime.datetime.strptime(
                value.strip(), DATE_FORMAT).date(), 'D')
        except ValueError:
            raise errors.UsageError('invalid date: {!r} (expected YYYY-MM-DD)'.format(value))
    return np.datetime64(value, 'D')

def _check_dates(dates):
    """Raises unless *dates* are strictly increasing."""
    if len(dates) < 2:
        return
    steps = np.diff(dates).astype(np.int64)
    if (steps == 0).any():
        raise errors.DuplicateDate(dates[int(np.argmax(steps == 0)) + 1])
    if (steps < 0).any():
        raise errors.IngestError('dates must be strictly increasing')

def _sorted_by_date(dates, *columns):
    """Sorts *dates* and *columns* by date, rejecting duplicates."""
    order = np.argsort(dates, kind='stable')
    dates = dates[order]
    _check_dates(dates)
    return (dates,) + tuple(c[order] for c in columns)

def _unit_scale(unit):
    try:
        return UNITS[unit]
    except KeyError:
        raise errors.UsageError('unknown unit: {!r} (expected one of: {})'.format(
            unit, ', '.join(UNITS)))

##
## domain types
##

@dataclass(frozen=True, eq=False)
class PriceSeries:
    symbol: str
    dates: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'dates', _frozen(self.dates, 'datetime64[D]'))
        object.__setattr__(self, 'prices', _frozen(self.prices))
        if self.dates.shape != self.prices.shape:
            raise errors.LengthMismatch('{}: {} dates for {} prices'.format(
                self.symbol, len(self.dates), len(self.prices)))
        _check_dates(self.dates)
        if (self.prices <= 0).any():
            raise errors.IngestError('{}: prices must be positive'.format(self.symbol))

    def __len__(self):
        return len(self.dates)

    @property
    def observations(self):
        return list(zip(self.dates.tolist(), self.prices.tolist()))

@dataclass(frozen=True, eq=False)
class ReturnSeries:
    symbol: str
    dates: np.ndarray
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'dates', _frozen(self.dates, 'datetime64[D]'))
        object.__setattr__(self, 'returns', _frozen(self.returns))
        if self.dates.shape != self.returns.shape:
            raise errors.LengthMismatch('{}: {} dates for {} returns'.format(
                self.symbol, len(self.dates), len(self.returns)))
        _check_dates(self.dates)
        if (self.returns <= -1).any():
            raise errors.IngestError('{}: returns must be > -1'.format(self.symbol))

    def __len__(self):
        return len(self.dates)

    @property
    def observations(self):
        return list(zip(self.dates.tolist(), self.returns.tolist()))

@dataclass(frozen=True, eq=False)
class FactorPanel:
    dates: np.ndarray
    mex: np.ndarray
    smb: np.ndarray
    hml: np.ndarray
    rf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'dates', _frozen(self.dates, 'datetime64[D]'))
        for name in ('mex', 'smb', 'hml', 'rf'):
            values = _frozen(getattr(self, name))
            if values.shape != self.dates.shape:
                raise errors.LengthMismatch('factor {}: {} values for {} dates'.format(
                    name, len(values), len(self.dates)))
            object.__setattr__(self, name, values)
        _check_dates(self.dates)

    def __len__(self):
        return len(self.dates)

    @property
    def observations(self):
        return list(zip(self.dates.tolist(), self.mex.tolist(),
            self.smb.tolist(), self.hml.tolist(), self.rf.tolist()))

@dataclass(frozen=True, eq=False)
class SixPortfolioPanel:
    dates: np.ndarray
    sv: np.ndarray
    sn: np.ndarray
    sg: np.ndarray
    bv: np.ndarray
    bn: np.ndarray
    bg: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'dates', _frozen(self.dates, 'datetime64[D]'))
        for name in ('sv', 'sn', 'sg', 'bv', 'bn', 'bg'):
            values = _frozen(getattr(self, name))
            if values.shape != self.dates.shape:
                raise errors.LengthMismatch('portfolio {}: {} values for {} dates'.format(
                    name, len(values), len(self.dates)))
            object.__setattr__(self, name, values)
        _check_dates(self.dates)

    def __len__(self):
        return len(self.dates)

@dataclass(frozen=True, eq=False)
class Dataset:
    """Date-aligned factor features (columns mex, smb, hml) and T target
    return columns."""
    dates: np.ndarray
    features: np.ndarray
    targets: np.ndarray
    target_names: tuple
    rf: np.ndarray = None
    dropped: dict = field(default_factory=dict)

    def __post_init__(self):
        dates = _frozen(self.dates, 'datetime64[D]')
        features = _frozen(self.features)
        targets = _frozen(self.targets)
        if targets.ndim == 1:
            targets = _frozen(targets.reshape(-1, 1))
        names = tuple(self.target_names)

        n = len(dates)
        if n < 2:
            raise errors.TooShort('a dataset needs at least 2 rows, got {}'.format(n))
        if features.shape != (n, len(FEATURES)):
            raise errors.LengthMismatch('features must be {}x{}, got {}'.format(
                n, len(FEATURES), 'x'.join(map(str, features.shape))))
        if targets.ndim != 2 or targets.shape[0] != n or targets.shape[1] < 1:
            raise errors.LengthMismatch('targets must be {}xT with T >= 1, got {}'.format(
                n, 'x'.join(map(str, targets.shape))))
        if len(names) != targets.shape[1]:
            raise errors.LengthMismatch('{} target names for {} target columns'.format(
                len(names), targets.shape[1]))
        if len(set(names)) != len(names):
            raise errors.IngestError('duplicate target names: {}'.format(', '.join(names)))
        if not (np.isfinite(features).all() and np.isfinite(targets).all()):
            raise errors.IngestError('dataset contains missing or non-finite values')
        _check_dates(dates)

        object.__setattr__(self, 'dates', dates)
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'targets', targets)
        object.__setattr__(self, 'target_names', names)
        if self.rf is not None:
            rf = _frozen(self.rf)
            if rf.shape != (n,):
                raise errors.LengthMismatch('rf must have {} values, got {}'.format(n, rf.shape))
            object.__setattr__(self, 'rf', rf)

    @property
    def n(self):
        return len(self.dates)

    @property
    def T(self):
        return self.targets.shape[1]

    def __len__(self):
        return self.n

    def target_index(self, name):
        try:
            return self.target_names.index(name)
        except ValueError:
            raise errors.UnknownTicker(name, self.target_names)

    def column(self, name):
        """Returns the feature or target column called *name*."""
        if name in FEATURES:
            return self.features[:, FEATURES.index(name)]
        return self.targets[:, self.target_index(name)]

    def select(self, names):
        """Returns a dataset holding only the target columns *names*, in
        that order."""
        idx = [self.target_index(name) for name in names]
        return Dataset(self.dates, self.features, self.targets[:, idx],
            tuple(names), self.rf, dict(self.dropped))

    def equals(self, other):
        return (isinstance(other, Dataset)
            and self.target_names == other.target_names
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.targets, other.targets))

##
## parsing
##

def _decode(raw):
    if isinstance(raw, str):
        return raw
    try:
        return raw.decode('utf-8-sig')
    except UnicodeDecodeError as e:
        raise errors.IngestError('input is not UTF-8: {}'.format(e))

def parse_price_csv(raw, symbol, date_column=DATE_COLUMN, price_column=PRICE_COLUMN,
        delimiter=','):
    """Parses a delimiter-separated price file with a header row.

    Rows with an unparseable date or price are rejected with the offending
    line number. The result is sorted by date.
    """
    text = _decode(raw)
    try:
        df = pd.read_csv(io.StringIO(text), sep=delimiter, dtype=str,
            keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise errors.MissingColumn(date_column, [])
    except pd.errors.ParserError as e:
        raise errors.IngestError('{}: {}'.format(symbol, e))

    df.columns = [str(c).strip() for c in df.columns]
    for column in (date_column, price_column):
        if column not in df.columns:
            raise errors.MissingColumn(column, df.columns)

    # header is line 1
    lines = np.arange(len(df)) + 2

    raw_dates = df[date_column].str.strip()
    dates = pd.to_datetime(raw_dates, format=DATE_FORMAT, errors='coerce')
    bad = dates.isna().to_numpy()
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadDate(int(lines[i]), 'invalid date: {!r}'.format(raw_dates.iloc[i]))

    raw_prices = df[price_column].str.strip()
    prices = pd.to_numeric(raw_prices, errors='coerce').to_numpy(dtype=float)
    bad = ~np.isfinite(prices)
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadPrice(int(lines[i]), 'invalid price: {!r}'.format(raw_prices.iloc[i]))
    bad = prices <= 0
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.NonPositivePrice(int(lines[i]),
            'price must be positive: {!r}'.format(raw_prices.iloc[i]))

    dates, prices = _sorted_by_date(
        dates.to_numpy().astype('datetime64[D]'), prices)
    log.debug('%s: parsed %s prices', symbol, len(dates))
    return PriceSeries(symbol, dates, prices)

def compute_returns(prices):
    """Simple close-to-close returns, each attributed to the later date."""
    if len(prices) < 2:
        raise errors.TooShort('{}: need at least 2 prices for a return, got {}'.format(
            prices.symbol, len(prices)))
    p = prices.prices
    return ReturnSeries(prices.symbol, prices.dates[1:], p[1:] / p[:-1] - 1.0)

def _find_header(lines, required):
    for i, line in enumerate(lines):
        cells = {c.strip() for c in line.split(',')}
        if all(name in cells for name in required):
            return i
    raise errors.HeaderNotFound('no header row naming: {}'.format(', '.join(required)))

def _read_french_block(raw, required):
    """Locates the header row naming *required* in a data-library file and
    returns the data rows under it as a DataFrame of strings, plus the file
    line number of the first data row.

    The block ends at the first line that is not keyed by a YYYYMMDD date,
    which skips footers and any further sections.
    """
    lines = _decode(raw).splitlines()
    header = _find_header(lines, required)

    end = header + 1
    while end < len(lines):
        key = lines[end].split(',', 1)[0].strip()
        if not _rx_french_date.match(key):
            break
        end += 1

    if end == header + 1:
        raise errors.HeaderNotFound('no data rows under the header on line {}'.format(
            header + 1))

    block = '\n'.join(lines[header:end])
    width = len(lines[header].split(','))
    for i in range(header + 1, end):
        if len(lines[i].split(',')) != width:
            raise errors.BadRow(i + 1, 'expected {} fields: {!r}'.format(width, lines[i]))

    df = pd.read_csv(io.StringIO(block), dtype=str, keep_default_na=False,
        skipinitialspace=True)
    df.columns = [str(c).strip() for c in df.columns]
    return df, header + 2

def _french_dates(df, first_line):
    keys = df.iloc[:, 0].str.strip()
    dates = pd.to_datetime(keys, format='%Y%m%d', errors='coerce')
    bad = dates.isna().to_numpy()
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadRow(first_line + i, 'invalid date key: {!r}'.format(keys.iloc[i]))
    return dates.to_numpy().astype('datetime64[D]')

def _french_values(df, column, first_line, scale):
    raw = df[column].str.strip()
    values = pd.to_numeric(raw, errors='coerce').to_numpy(dtype=float)
    bad = ~np.isfinite(values) | np.isin(values, MISSING_CODES)
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadRow(first_line + i, 'missing or invalid {}: {!r}'.format(
            column, raw.iloc[i]))
    return values / scale

def parse_factor_file(raw, unit='percent'):
    """Parses a daily three-factor file from the data library.

    Preamble and footer text are skipped by scanning for the header row
    (Mkt-RF, SMB, HML, RF). Percent values are converted to decimals.
    """
    scale = _unit_scale(unit)
    df, first_line = _read_french_block(raw, FACTOR_COLUMNS)

    dates = _french_dates(df, first_line)
    mex, smb, hml, rf = (_french_values(df, c, first_line, scale) for c in FACTOR_COLUMNS)

    dates, mex, smb, hml, rf = _sorted_by_date(dates, mex, smb, hml, rf)
    log.debug('parsed %s factor rows (%s to %s)', len(dates), dates[0], dates[-1])
    return FactorPanel(dates, mex, smb, hml, rf)

def parse_six_portfolio_file(raw, unit='percent'):
    """Parses the daily 2x3 size/book-to-market portfolio file.

    Only the first section (value-weighted returns) is read.
    """
    scale = _unit_scale(unit)
    df, first_line = _read_french_block(raw, tuple(PORTFOLIO_COLUMNS.values()))

    dates = _french_dates(df, first_line)
    values = {k: _french_values(df, c, first_line, scale)
        for k, c in PORTFOLIO_COLUMNS.items()}

    keys = sorted(values)
    sorted_cols = _sorted_by_date(dates, *(values[k] for k in keys))
    dates, cols = sorted_cols[0], dict(zip(keys, sorted_cols[1:]))
    log.debug('parsed %s portfolio rows', len(dates))
    return SixPortfolioPanel(dates, **cols)

##
## factors
##

def compute_mex(market_return, rf):
    """Market excess return: market return minus the risk-free rate."""
    market_return = np.asarray(market_return, dtype=float)
    rf = np.asarray(rf, dtype=float)
    if market_return.shape != rf.shape:
        raise errors.LengthMismatch('market has {} values, rf has {}'.format(
            len(market_return), len(rf)))
    return market_return - rf

def compute_smb(panel):
    """Small minus big: mean of the three small portfolios minus the mean of
    the three big ones."""
    return (panel.sv + panel.sn + panel.sg) / 3 - (panel.bv + panel.bn + panel.bg) / 3

def compute_hml(panel):
    """High minus low: mean of the two value portfolios minus the mean of the
    two growth ones."""
    return (panel.sv + panel.bv) / 2 - (panel.sg + panel.bg) / 2

##
## alignment
##

def align(returns, factors, date_range=None, market=None, portfolios=None):
    """Inner-joins target *returns* with *factors* on date.

    *date_range* is an optional inclusive `(start, end)` pair; either bound
    may be None. If *market* (a `ReturnSeries`) is given, mex is recomputed
    from it and the panel's rf. If *portfolios* is given, smb and hml are
    recomputed from the six portfolios.

    The number of dates each source loses is logged and kept in
    `Dataset.dropped`.
    """
    returns = list(returns)
    if not returns:
        raise errors.UsageError('at least one return series is required')
    if len(factors) == 0:
        raise errors.EmptyIntersection('factor panel is empty')

    sources = [('factors', factors.dates)]
    sources += [(r.symbol, r.dates) for r in returns]
    if market is not None:
        sources.append(('market:{}'.format(market.symbol), market.dates))
    if portfolios is not None:
        sources.append(('portfolios', portfolios.dates))

    common = functools.reduce(np.intersect1d, (d for _, d in sources))

    if date_range is not None:
        start, end = date_range
        if start is not None:
            common = common[common >= to_date(start)]
        if end is not None:
            common = common[common <= to_date(end)]

    if len(common) == 0:
        raise errors.EmptyIntersection('no dates shared by: {}'.format(
            ', '.join(name for name, _ in sources)))

    dropped = {}
    for name, dates in sources:
        dropped[name] = len(dates) - len(common)
        if dropped[name]:
            log.info('%s: %s of %s dates dropped', name, dropped[name], len(dates))

    def pick(dates, values):
        return values[np.searchsorted(dates, common)]

    rf = pick(factors.dates, factors.rf)
    if market is not None:
        mex = compute_mex(pick(market.dates, market.returns), rf)
    else:
        mex = pick(factors.dates, factors.mex)

    if portfolios is not None:
        smb = pick(portfolios.dates, compute_smb(portfolios))
        hml = pick(portfolios.dates, compute_hml(portfolios))
    else:
        smb = pick(factors.dates, factors.smb)
        hml = pick(factors.dates, factors.hml)

    targets = np.column_stack([pick(r.dates, r.returns) for r in returns])
    names = tuple(r.symbol for r in returns)

    log.info('aligned %s dates (%s to %s) for %s', len(common), common[0],
        common[-1], ', '.join(names))
    return Dataset(common, np.column_stack([mex, smb, hml]), targets, names,
        rf=rf, dropped=dropped)

##
## dataset interchange
##

def dataset_to_csv(dataset):
    """Renders the canonical interchange CSV:
    `date,mex,smb,hml,<ticker...>` with full-precision decimals."""
    df = pd.DataFrame(np.column_stack([dataset.features, dataset.targets]),
        columns=list(FEATURES) + list(dataset.target_names))
    df.insert(0, 'date', pd.to_datetime(dataset.dates).strftime(DATE_FORMAT))
    return df.to_csv(index=False, lineterminator='\n')

def parse_dataset_csv(raw):
    text = _decode(raw)
    try:
        df = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise errors.MissingColumn('date', [])
    except pd.errors.ParserError as e:
        raise errors.IngestError('dataset: {}'.format(str(e).strip()))

    df.columns = [str(c).strip() for c in df.columns]
    expected = ['date'] + list(FEATURES)
    for column in expected:
        if column not in df.columns:
            raise errors.MissingColumn(column, df.columns)
    names = [c for c in df.columns if c not in expected]
    if not names:
        raise errors.MissingColumn('<ticker>', df.columns)

    lines = np.arange(len(df)) + 2
    raw_dates = df['date'].str.strip()
    dates = pd.to_datetime(raw_dates, format=DATE_FORMAT, errors='coerce')
    bad = dates.isna().to_numpy()
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadDate(int(lines[i]), 'invalid date: {!r}'.format(raw_dates.iloc[i]))

    columns = list(FEATURES) + names
    values = df[columns].apply(lambda s: pd.to_numeric(s.str.strip(), errors='coerce'))
    values = values.to_numpy(dtype=float)
    bad = ~np.isfinite(values).all(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        raise errors.BadRow(int(lines[i]), 'missing or invalid value')

    dates, values = _sorted_by_date(dates.to_numpy().astype('datetime64[D]'), values)
    return Dataset(dates, values[:, :len(FEATURES)], values[:, len(FEATURES):], names)

def dataset_to_dict(dataset):
    d = {
        'dates': dataset.dates.astype(object).tolist(),
        'features': dataset.features.tolist(),
        'targets': dataset.targets.tolist(),
        'target_names': list(dataset.target_names),
        }
    if dataset.rf is not None:
        d['rf'] = dataset.rf.tolist()
    return d

def dataset_from_dict(d):
    try:
        return Dataset(np.array(d['dates'], dtype='datetime64[D]'),
            np.array(d['features'], dtype=float).reshape(-1, len(FEATURES)),
            np.array(d['targets'], dtype=float), tuple(d['target_names']),
            rf=d.get('rf'))
    except (KeyError, TypeError, ValueError) as e:
        raise errors.DecodeError('invalid dataset: {}'.format(e))

def read_dataset(path):
    """Reads a dataset from the canonical CSV or, by file extension, a codec
    snapshot (.json, .msgpack)."""
    raw = utils.path.read_bytes(path)
    name = codec.for_path(path)
    if name is None:
        return parse_dataset_csv(raw)
    return dataset_from_dict(codec.get(name)._decode(raw))

def dump_dataset(dataset, path):
    """Returns *dataset* serialized for *path* (CSV unless the extension
    names a codec)."""
    name = codec.for_path(path)
    if name is None:
        return dataset_to_csv(dataset).encode('utf8')
    return codec.get(name)._encode(dataset_to_dict(dataset))

def write_dataset(dataset, path):
    utils.path.write_bytes(path, dump_dataset(dataset, path))
    log.info('dataset written: %s (%s rows)', os.path.basename(path), dataset.n)
