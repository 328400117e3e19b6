from . import Formatter
from .. import report
from .. import ingest

class TextFormatter(Formatter):
    """Human-readable tables and decision rules in the selected unit."""
    _name_ = 'text'

    def format_tree(self, tree):
        return report.render(tree, 'text', self.unit)

    def format_stats(self, table):
        return report.render_stats(table, 'text', self.unit)

    def format_loadings(self, loadings):
        return '\n'.join(report.render_loadings(l, self.unit) for l in loadings)

    def format_split(self, split):
        return report.render_split(split, self.unit)

    def format_table(self, table):
        return report.render_table(table, 'text', self.unit)

    def format_dataset(self, dataset):
        return ingest.dataset_to_csv(dataset)
