import pandas as pd

from . import Formatter
from .. import report
from .. import ingest
from ..utils.format import scale

class CsvFormatter(Formatter):
    _name_ = 'csv'

    def format_stats(self, table):
        return report.render_stats(table, 'csv', self.unit)

    def format_loadings(self, loadings):
        df = pd.DataFrame.from_records([l.to_dict() for l in loadings])
        return df.to_csv(index=False, lineterminator='\n')

    def format_split(self, split):
        df = pd.DataFrame.from_records([{
            'ticker': t.ticker,
            'feature': split.feature_name,
            'threshold': scale(split.threshold, self.unit),
            'left_count': split.left_count,
            'right_count': split.right_count,
            'left_mean_bp': t.left_mean_bp,
            'right_mean_bp': t.right_mean_bp,
            'dominance_share': t.dominance_share,
            } for t in split.per_target])
        return df.to_csv(index=False, lineterminator='\n')

    def format_table(self, table):
        return report.render_table(table, 'csv', self.unit)

    def format_dataset(self, dataset):
        return ingest.dataset_to_csv(dataset)
