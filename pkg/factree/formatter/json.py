from . import Formatter
from .. import codec
from .. import report
from .. import ingest

class JsonFormatter(Formatter):
    """Canonical JSON in decimal units, whatever the selected unit."""
    _name_ = 'json'

    def dumps(self, obj):
        return codec.get('json', {'indent': 2})._encode(obj).decode('utf8') + '\n'

    def format_tree(self, tree):
        return report.render(tree, 'json')

    def format_stats(self, table):
        return self.dumps({
            'n': table.n,
            'summaries': {k: s.to_dict() for k, s in table.summaries.items()},
            'covariance': table.covariance.to_dict(),
            })

    def format_loadings(self, loadings):
        return self.dumps([l.to_dict() for l in loadings])

    def format_split(self, split):
        return self.dumps(split.to_dict())

    def format_table(self, table):
        return self.dumps(table.to_dict())

    def format_dataset(self, dataset):
        return self.dumps(ingest.dataset_to_dict(dataset))
