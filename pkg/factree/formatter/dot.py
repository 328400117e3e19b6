from . import Formatter
from .. import report

class DotFormatter(Formatter):
    """Graphviz digraph of a fitted tree."""
    _name_ = 'dot'

    def format_tree(self, tree):
        return report.render(tree, 'dot', self.unit)
