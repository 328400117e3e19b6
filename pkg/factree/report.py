"""Diagnostics and renderings of fitted trees: root split balance, leaf
expected returns, per-target dominance in joint trees, text/DOT/JSON tree
renderings and the solo/joint replication table."""
from dataclasses import dataclass

import numpy as np
import pandas as pd
import graphviz

from . import logs
from . import tree as tree_engine
from . import codec
from . import stats
from . import errors
from .utils.format import format_value, format_pair, round_bp, scale

log = logs.get(__name__)

DEFAULT_ANCHOR = 'IBM'

RENDER_FORMATS = ('text', 'dot', 'json')

##
## balance and dominance
##

def _root_split(tree):
    if tree.root.is_leaf:
        raise errors.NotASplit('tree is a single leaf')
    return tree.root

def balance(tree, n=None):
    """Percentages of the *n* samples sent to the left and right child of
    the root split."""
    root = _root_split(tree)
    n = root.count if n is None else n
    left, right = root.left.count, root.right.count
    if left + right != n:
        raise errors.ReportError('root children hold {} + {} samples, not {}'.format(
            left, right, n))
    return (100.0 * left / n, 100.0 * right / n)

def _fitted_targets(dataset, tree):
    """Target block of *dataset* in the column order of *tree*."""
    if tuple(dataset.target_names) != tuple(tree.target_names):
        dataset = dataset.select(tree.target_names)
    return dataset.targets

def target_drops(dataset, tree):
    """Single-target SSE drop of each target at the root split."""
    root = _root_split(tree)
    y = _fitted_targets(dataset, tree)
    left = dataset.features[:, root.feature] < root.threshold
    if left.all() or not left.any():
        raise errors.ReportError('root split does not divide the dataset')
    return np.array([
        tree_engine.node_sse(y[:, i])
            - tree_engine.node_sse(y[left, i])
            - tree_engine.node_sse(y[~left, i])
        for i in range(y.shape[1])])

def dominance_shares(dataset, tree):
    """Each target's share of the joint SSE drop at the root split.

    Joint cost is the sum of per-target costs, so the shares sum to 1.
    """
    drops = target_drops(dataset, tree)
    total = drops.sum()
    if not total > 0:
        raise errors.ZeroDrop('root split does not reduce the squared error')
    return np.clip(drops / total, 0.0, 1.0)

@dataclass(frozen=True)
class TargetSplit:
    ticker: str
    left_mean_bp: float
    right_mean_bp: float
    dominance_share: float

@dataclass(frozen=True)
class SplitReport:
    feature_name: str
    threshold: float
    left_count: int
    right_count: int
    left_fraction: float
    right_fraction: float
    per_target: tuple
    cost_drop: float

    @property
    def threshold_bp(self):
        return scale(self.threshold, 'bp')

    @property
    def n(self):
        return self.left_count + self.right_count

    def to_dict(self):
        return {
            'feature': self.feature_name,
            'threshold': self.threshold,
            'threshold_bp': self.threshold_bp,
            'left_count': self.left_count,
            'right_count': self.right_count,
            'left_fraction': self.left_fraction,
            'right_fraction': self.right_fraction,
            'cost_drop': self.cost_drop,
            'targets': [{
                'ticker': t.ticker,
                'left_mean_bp': t.left_mean_bp,
                'right_mean_bp': t.right_mean_bp,
                'dominance_share': t.dominance_share,
                } for t in self.per_target],
            }

def split_report(dataset, tree):
    """Summarizes the root split of *tree* on *dataset*."""
    root = _root_split(tree)
    y = _fitted_targets(dataset, tree)
    left = dataset.features[:, root.feature] < root.threshold
    drops = target_drops(dataset, tree)
    total = float(drops.sum())
    shares = dominance_shares(dataset, tree)

    left_fraction, right_fraction = balance(tree, dataset.n)
    per_target = tuple(
        TargetSplit(name,
            scale(float(y[left, i].mean()), 'bp'),
            scale(float(y[~left, i].mean()), 'bp'),
            float(shares[i]))
        for i, name in enumerate(tree.target_names))

    return SplitReport(root.feature_name, root.threshold,
        int(left.sum()), int((~left).sum()), left_fraction, right_fraction,
        per_target, total)

##
## tree rendering
##

def _leaf_text(tree, leaf, unit):
    means = ', '.join('{}={}'.format(name, format_value(m, unit))
        for name, m in zip(tree.target_names, leaf.prediction))
    return 'leaf: {} (n={})'.format(means, leaf.count)

def _render_text(tree, unit):
    lines = []

    def walk(node, indent):
        pad = '|   ' * indent
        if node.is_leaf:
            lines.append(pad + _leaf_text(tree, node, unit))
            return
        threshold = format_value(node.threshold, unit)
        lines.append('{}{} < {}'.format(pad, node.feature_name, threshold))
        walk(node.left, indent + 1)
        lines.append('{}{} >= {}'.format(pad, node.feature_name, threshold))
        walk(node.right, indent + 1)

    walk(tree.root, 0)
    return '\n'.join(lines) + '\n'

def _render_dot(tree, unit):
    graph = graphviz.Digraph('tree', node_attr={'shape': 'box'})
    counter = [0]

    def walk(node):
        name = 'n{}'.format(counter[0])
        counter[0] += 1
        if node.is_leaf:
            label = r'\n'.join(['{}: {}'.format(t, format_value(m, unit))
                for t, m in zip(tree.target_names, node.prediction)]
                + ['n = {}'.format(node.count)])
            graph.node(name, label)
        else:
            graph.node(name, '{} < {}\\nn = {}'.format(node.feature_name,
                format_value(node.threshold, unit), node.count))
            graph.edge(name, walk(node.left), label='yes')
            graph.edge(name, walk(node.right), label='no')
        return name

    walk(tree.root)
    return graph.source

def _render_json(tree):
    data = codec.get('json', {'indent': 2})._encode(tree_engine.tree_to_dict(tree))
    return data.decode('utf8') + '\n'

def render(tree, format='text', unit='decimal'):
    """Renders *tree* as indented decision rules (text), a Graphviz digraph
    (dot) or its canonical serialization (json, always in decimals)."""
    if format == 'text':
        return _render_text(tree, unit)
    elif format == 'dot':
        return _render_dot(tree, unit)
    elif format == 'json':
        return _render_json(tree)
    raise errors.UsageError('unknown tree format: {!r} (expected one of: {})'.format(
        format, ', '.join(RENDER_FORMATS)))

def parse_rendered(text):
    """Inverse of `render(tree, 'json')`."""
    return tree_engine.parse_tree(text.encode('utf8') if isinstance(text, str) else text)

##
## replication table
##

@dataclass(frozen=True)
class FitSummary:
    """Root split of one solo or joint depth-1 fit, seen from one ticker."""
    feature_name: str
    threshold: float
    left_count: int
    right_count: int
    left_er: float
    right_er: float
    share: float = None

    @property
    def n(self):
        return self.left_count + self.right_count

    @property
    def split_bp(self):
        """Threshold rounded to the nearest 10bp."""
        return round_bp(self.threshold)

    @property
    def balance(self):
        return (100.0 * self.left_count / self.n, 100.0 * self.right_count / self.n)

    def to_dict(self):
        return {
            'feature': self.feature_name,
            'threshold': self.threshold,
            'split_bp': self.split_bp,
            'left_count': self.left_count,
            'right_count': self.right_count,
            'left_er': self.left_er,
            'right_er': self.right_er,
            'share': self.share,
            }

@dataclass(frozen=True)
class ReplicationRow:
    ticker: str
    variance: float
    skew: float
    kurtosis: float
    solo: FitSummary = None
    # None for the anchor, or when the fit found no split
    joint: FitSummary = None

@dataclass(frozen=True)
class ReplicationTable:
    anchor: str
    n: int
    rows: tuple
    config: tree_engine.FitConfig

    def to_dict(self):
        return {
            'anchor': self.anchor,
            'n': self.n,
            'config': self.config.to_dict(),
            'rows': [{
                'ticker': r.ticker,
                'variance': r.variance,
                'skew': r.skew,
                'kurtosis': r.kurtosis,
                'solo': r.solo and r.solo.to_dict(),
                'joint': r.joint and r.joint.to_dict(),
                } for r in self.rows],
            }

    def to_frame(self, unit='decimal', formatted=True):
        """Table with one row per ticker. Unformatted frames hold numbers
        scaled to *unit*; missing cells are NaN (formatted: 'na')."""
        records = []
        for r in self.rows:
            rec = {'ticker': r.ticker}
            if formatted:
                rec['variance'] = format_value(r.variance, unit, power=2)
                rec['skew'] = _plain(r.skew)
                rec['kurtosis'] = _plain(r.kurtosis)
            else:
                rec['variance'] = _scaled(r.variance, unit, 2)
                rec['skew'] = _scaled(r.skew)
                rec['kurtosis'] = _scaled(r.kurtosis)
            for prefix, fit in (('solo', r.solo), ('joint', r.joint)):
                rec.update(_fit_columns(prefix, fit, unit, formatted))
            records.append(rec)
        return pd.DataFrame.from_records(records)

def _plain(value, precision=4):
    return 'na' if value is None else '{:.{}f}'.format(value, precision)

def _scaled(value, unit='decimal', power=0):
    return np.nan if value is None else scale(value, unit, power)

FORMATTED_FIT_COLUMNS = ('feature', 'split', 'balance', 'left_er', 'right_er', 'share')
NUMERIC_FIT_COLUMNS = ('feature', 'split_bp', 'left_pct', 'right_pct', 'left_er', 'right_er',
    'share')

def _fit_columns(prefix, fit, unit, formatted):
    keys = FORMATTED_FIT_COLUMNS if formatted else NUMERIC_FIT_COLUMNS
    if prefix == 'solo':
        # solo trees have a single target
        keys = keys[:-1]

    if fit is None:
        values = ['na' if formatted else np.nan] * len(keys)
    elif formatted:
        values = [fit.feature_name, '{}bp'.format(fit.split_bp), format_pair(*fit.balance),
            format_value(fit.left_er, unit), format_value(fit.right_er, unit),
            _plain(fit.share, 3)]
    else:
        values = [fit.feature_name, fit.split_bp, *fit.balance,
            scale(fit.left_er, unit), scale(fit.right_er, unit), _scaled(fit.share)]
    return {'{}_{}'.format(prefix, k): v for k, v in zip(keys, values)}

def _summarize_fit(dataset, tree, ticker):
    if tree.root.is_leaf:
        return None
    root = tree.root
    i = tree.target_names.index(ticker)
    y = dataset.column(ticker)
    left = dataset.features[:, root.feature] < root.threshold
    share = None
    if len(tree.target_names) > 1:
        share = float(dominance_shares(dataset, tree)[i])
    return FitSummary(root.feature_name, root.threshold, int(left.sum()),
        int((~left).sum()), float(y[left].mean()), float(y[~left].mean()), share)

def replicate_table(dataset, anchor=DEFAULT_ANCHOR, config=None):
    """Fits a solo tree for every ticker and a joint (anchor, ticker) tree
    for every other ticker, and collects moments, first splits, balances and
    leaf expected returns per ticker."""
    config = config or tree_engine.FitConfig()
    dataset.target_index(anchor)
    if dataset.T < 2:
        log.info('only %s in the dataset: no joint fits', anchor)

    # anchor first, then the others in dataset order
    tickers = [anchor] + [t for t in dataset.target_names if t != anchor]

    rows = []
    for ticker in tickers:
        summary = stats.describe(dataset.column(ticker))
        solo = tree_engine.fit(dataset.select([ticker]), config)
        joint = None
        if ticker != anchor:
            joint_tree = tree_engine.fit(dataset.select([anchor, ticker]), config)
            joint = _summarize_fit(dataset, joint_tree, ticker)
        row = ReplicationRow(ticker, summary.variance, summary.skew,
            summary.excess_kurtosis, _summarize_fit(dataset, solo, ticker), joint)
        log.debug('%s: solo %s, joint %s', ticker,
            row.solo and row.solo.split_bp, row.joint and row.joint.split_bp)
        rows.append(row)

    return ReplicationTable(anchor, dataset.n, tuple(rows), config)

##
## tabular renderings
##

def render_table(table, format='text', unit='decimal'):
    """Renders a `ReplicationTable` as aligned text or CSV."""
    if format == 'text':
        header = 'n = {}, anchor = {}, max_depth = {}\n'.format(
            table.n, table.anchor, table.config.max_depth)
        return header + table.to_frame(unit).to_string(index=False) + '\n'
    elif format == 'csv':
        return table.to_frame(unit, formatted=False).to_csv(index=False, lineterminator='\n')
    raise errors.UsageError('replication tables render as text or csv, not {!r}'.format(format))

STATS_ROWS = ('count', 'mean', 'std', 'min', '25%', '50%', '75%', 'max', 'skew', 'kurtosis')
# moments that carry no unit
UNITLESS = ('count', 'skew', 'kurtosis')

def stats_frame(table, unit='decimal', formatted=True):
    """Summary statistics with one column per series and the rows of
    `STATS_ROWS`."""
    columns = {}
    for name, summary in table.summaries.items():
        d = summary.to_dict()
        col = []
        for key in STATS_ROWS:
            value = d[key]
            if key == 'count':
                col.append(str(value) if formatted else value)
            elif key in UNITLESS:
                col.append(_plain(value) if formatted else _scaled(value))
            elif formatted:
                col.append(format_value(value, unit))
            else:
                col.append(_scaled(value, unit, 1))
        columns[name] = col
    return pd.DataFrame(columns, index=list(STATS_ROWS))

def covariance_frame(table, unit='decimal', formatted=True):
    cov = table.covariance
    if formatted:
        values = [[format_value(v, unit, power=2) for v in row] for row in cov.values.tolist()]
    else:
        values = scale(cov.values, unit, 2)
    return pd.DataFrame(values, index=list(cov.labels), columns=list(cov.labels))

def render_stats(table, format='text', unit='decimal'):
    """Renders a `StatsTable`: the summary block, then the target covariance
    matrix."""
    if format == 'text':
        return '{}\n\ncovariance\n{}\n'.format(
            stats_frame(table, unit).to_string(),
            covariance_frame(table, unit).to_string())
    elif format == 'csv':
        return stats_frame(table, unit, formatted=False).to_csv(
            index_label='stat', lineterminator='\n')
    raise errors.UsageError('stats render as text or csv, not {!r}'.format(format))

def render_split(report, unit='decimal'):
    """Text summary of a `SplitReport`."""
    lines = [
        'split: {} < {} ({:.1f}bp)'.format(report.feature_name,
            format_value(report.threshold, unit), report.threshold_bp),
        'balance: {} ({} / {})'.format(
            format_pair(report.left_fraction, report.right_fraction),
            report.left_count, report.right_count),
        ]
    for t in report.per_target:
        lines.append('{}: left {:.1f}bp, right {:.1f}bp, share {:.4f}'.format(
            t.ticker, t.left_mean_bp, t.right_mean_bp, t.dominance_share))
    return '\n'.join(lines) + '\n'

def render_loadings(loadings, unit='decimal'):
    """Text summary of `FactorLoadings`; the intercept is a return, the
    slopes are unitless."""
    return '\n'.join([
        '{} ({}, n={})'.format(loadings.target,
            'excess' if loadings.excess else 'raw', loadings.n),
        'a: {}'.format(format_value(loadings.a, unit)),
        'b: {:.6f}'.format(loadings.b),
        's: {:.6f}'.format(loadings.s),
        'h: {:.6f}'.format(loadings.h),
        'r2: {:.6f}'.format(loadings.r_squared),
        'residual variance: {}'.format(format_value(loadings.residual_variance, unit, power=2)),
        ]) + '\n'
