"""Subcommand bodies. Each `@command` function becomes a subparser; its
parameters become flags. Parameters marked `hide` are not exposed on the
subparser and are filled from the global options of the same name."""
import os

import numpy as np

from . import logs
from . import tree as tree_engine
from . import synth
from . import stats
from . import ingest
from . import linear
from . import report
from . import errors
from . import utils
from . import factor_client
from .ingest import FEATURES
from .utils.function import command, param

log = logs.get(__name__)

##
## argument helpers
##

def split_names(value):
    """Splits a comma-separated flag value; None stays None."""
    if value is None:
        return None
    if isinstance(value, str):
        value = value.split(',')
    names = [v.strip() for v in value if v.strip()]
    if not names:
        raise errors.UsageError('empty name list')
    return names

def feature_indices(value):
    names = split_names(value)
    if names is None:
        return tuple(range(len(FEATURES)))
    unknown = [n for n in names if n not in FEATURES]
    if unknown:
        raise errors.UsageError('unknown features: {} (expected: {})'.format(
            ', '.join(unknown), ', '.join(FEATURES)))
    return tuple(FEATURES.index(n) for n in names)

def fit_config(max_depth, min_samples_leaf, min_cost_drop=0.0, features=None):
    return tree_engine.FitConfig(max_depth, min_samples_leaf, min_cost_drop,
        feature_indices(features))

def load_dataset(path, targets=None):
    dataset = ingest.read_dataset(path)
    names = split_names(targets)
    return dataset.select(names) if names else dataset

def fetch_config(factor_url, cache_dir, kind='daily_factors', timeout=None):
    return factor_client.FetchConfig(factor_url or None,
        cache_dir or factor_client.default_cache_dir(),
        timeout or factor_client.DEFAULT_TIMEOUT, kind)

def read_factors(path, factor_unit, factor_url=None, cache_dir=None, refresh=False):
    """Parses the factor file at *path*, or fetches it when *path* is None."""
    if path is None:
        raw = factor_client.fetch_factor_archive(
            fetch_config(factor_url, cache_dir), refresh)
    else:
        raw = utils.path.read_bytes(path)
    return ingest.parse_factor_file(raw, factor_unit)

def symbol_for(path):
    return os.path.splitext(os.path.basename(path))[0]

##
## commands
##

@command()
@param('factor_url', doc='file to download (default: the library file of --kind)')
@param('cache_dir', doc='cache directory (default: ${} or {})'.format(
    factor_client.CACHE_DIR_ENV, factor_client.DEFAULT_CACHE_DIR))
@param('refresh', doc='download even if a cached copy exists')
@param('kind', doc='expected file kind', choices=tuple(factor_client.KINDS))
@param('timeout', 'float', doc='seconds to wait for the server')
def fetch(factor_url=None, cache_dir=None, refresh=False,
        kind='daily_factors', timeout=factor_client.DEFAULT_TIMEOUT):
    """Download (or read from cache) a data-library factor file."""
    return factor_client.fetch_factor_archive(
        fetch_config(factor_url, cache_dir, kind, timeout), refresh)

@command('ingest')
@param('prices', 'paths', doc='price CSV files, one per ticker')
@param('factors', doc='daily factor file (default: download it)')
@param('factor_unit', doc='unit of the factor file', choices=tuple(ingest.UNITS))
@param('tickers', doc='ticker names for the price files (default: file names)')
@param('start', 'date', doc='first date (inclusive)')
@param('end', 'date', doc='last date (inclusive)')
@param('market', doc='price CSV of a market proxy to recompute mex from')
@param('portfolios', doc='six-portfolio file to recompute smb and hml from')
@param('date_column', doc='date column of the price files')
@param('price_column', doc='price column of the price files')
@param('factor_url', doc='factor file to download when --factors is absent')
@param('cache_dir', doc='download cache directory')
@param('refresh', doc='download even if a cached copy exists')
def ingest_(prices, factors=None, factor_unit='percent', tickers=None, start=None,
        end=None, market=None, portfolios=None, date_column=ingest.DATE_COLUMN,
        price_column=ingest.PRICE_COLUMN, factor_url=None, cache_dir=None, refresh=False):
    """Build the canonical dataset from price files and a factor file."""
    names = split_names(tickers) or [symbol_for(p) for p in prices]
    if len(names) != len(prices):
        raise errors.UsageError('{} tickers for {} price files'.format(len(names), len(prices)))

    returns = []
    for name, path in zip(names, prices):
        series = ingest.parse_price_csv(utils.path.read_bytes(path), name,
            date_column, price_column)
        returns.append(ingest.compute_returns(series))

    panel = read_factors(factors, factor_unit, factor_url, cache_dir, refresh)

    market_returns = None
    if market:
        market_returns = ingest.compute_returns(ingest.parse_price_csv(
            utils.path.read_bytes(market), symbol_for(market), date_column, price_column))
    six = None
    if portfolios:
        six = ingest.parse_six_portfolio_file(utils.path.read_bytes(portfolios), factor_unit)

    return ingest.align(returns, panel, (start, end), market=market_returns,
        portfolios=six)

@command('stats')
@param('dataset', doc='dataset file')
@param('targets', doc='target columns (default: all)')
@param('factors', doc='also summarize the factor columns')
def stats_(dataset, targets=None, factors=True):
    """Summary statistics, moments and covariance of the targets."""
    return stats.summarize(load_dataset(dataset, targets), include_factors=factors)

@command()
@param('dataset', doc='dataset file')
@param('targets', doc='target columns fitted jointly (default: all)')
@param('max_depth', 'int', doc='maximum tree depth')
@param('min_samples_leaf', 'int', doc='minimum rows per leaf')
@param('min_cost_drop', 'float', doc='minimum squared-error drop for a split')
@param('features', doc='features the tree may split on')
@param('save', doc='also write the tree here (.json or .msgpack)')
def fit(dataset, targets=None, max_depth=1, min_samples_leaf=1, min_cost_drop=0.0,
        features=None, save=None):
    """Fit a solo or joint regression tree."""
    data = load_dataset(dataset, targets)
    result = tree_engine.fit(data, fit_config(max_depth, min_samples_leaf, min_cost_drop, features))
    if save:
        tree_engine.write_tree(result, save)
    return result

@command()
@param('dataset', doc='dataset file')
@param('targets', doc='target columns, each regressed separately (default: all)')
@param('excess', doc='regress returns in excess of the risk-free rate')
@param('factors', doc='factor file supplying rf for --excess')
@param('factor_unit', doc='unit of the factor file', choices=tuple(ingest.UNITS))
def ols(dataset, targets=None, excess=False, factors=None, factor_unit='percent'):
    """Three-factor OLS regression per target."""
    data = load_dataset(dataset, targets)
    rf = None
    if excess and factors:
        rf = risk_free_for(data, ingest.parse_factor_file(
            utils.path.read_bytes(factors), factor_unit))
    return [linear.fit_ols(data, name, excess=excess, rf=rf) for name in data.target_names]

def risk_free_for(dataset, panel):
    """The panel's rf on the dataset's dates."""
    idx = np.searchsorted(panel.dates, dataset.dates)
    found = (idx < len(panel.dates)) & (panel.dates[np.minimum(idx, len(panel) - 1)]
        == dataset.dates)
    if not found.all():
        raise errors.EmptyIntersection('factor file lacks {} dataset dates (first: {})'.format(
            int((~found).sum()), dataset.dates[np.argmin(found)]))
    return panel.rf[idx]

@command('report')
@param('dataset', doc='dataset file')
@param('targets', doc='target columns fitted jointly (default: all)')
@param('tree', doc='saved tree to report on (default: fit one)')
@param('max_depth', 'int', doc='maximum tree depth')
@param('min_samples_leaf', 'int', doc='minimum rows per leaf')
@param('features', doc='features the tree may split on')
def report_(dataset, targets=None, tree=None, max_depth=1, min_samples_leaf=1,
        features=None):
    """Balance, leaf returns and dominance shares of the root split."""
    data = load_dataset(dataset, targets)
    if tree:
        fitted = tree_engine.read_tree(tree)
    else:
        fitted = tree_engine.fit(data,
            fit_config(max_depth, min_samples_leaf, features=features))
    return report.split_report(data, fitted)

@command()
@param('dataset', doc='dataset file')
@param('anchor', doc='ticker every joint tree includes')
@param('max_depth', 'int', doc='maximum tree depth')
@param('min_samples_leaf', 'int', doc='minimum rows per leaf')
@param('features', doc='features the trees may split on')
def replicate(dataset, anchor=report.DEFAULT_ANCHOR, max_depth=1, min_samples_leaf=1,
        features=None):
    """Solo and joint first splits, balances and moments per ticker."""
    return report.replicate_table(ingest.read_dataset(dataset), anchor,
        fit_config(max_depth, min_samples_leaf, features=features))

@command('synth')
@param('n', 'int', doc='number of business days')
@param('tickers', doc='target names')
@param('seed', 'int', hide=True)
def synth_(n=1259, tickers='A,B', seed=0):
    """Generate a seeded synthetic dataset."""
    return synth.synthetic_dataset(n, split_names(tickers), seed)

COMMANDS = (fetch, ingest_, stats_, fit, ols, report_, replicate, synth_)
