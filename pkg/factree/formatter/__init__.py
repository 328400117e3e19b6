from .. import errors
from .. import registry
from ..tree import Tree
from ..stats import StatsTable
from ..ingest import Dataset
from ..linear import FactorLoadings
from ..report import SplitReport, ReplicationTable

FormatterMeta = registry.create_metaclass(__name__)

# result type -> handler suffix
RESULT_TYPES = (
    (Tree, 'tree'),
    (StatsTable, 'stats'),
    (Dataset, 'dataset'),
    (SplitReport, 'split'),
    (ReplicationTable, 'table'),
    )

def get(name, **kwargs):
    """Returns an instance of the Formatter matching *name*."""
    if isinstance(name, Formatter):
        return name
    return FormatterMeta.get(name)(**kwargs)

def result_kind(res):
    if isinstance(res, (list, tuple)) and res and all(
            isinstance(r, FactorLoadings) for r in res):
        return 'loadings'
    for cls, kind in RESULT_TYPES:
        if isinstance(res, cls):
            return kind
    raise errors.UsageError('cannot format result of type {}'.format(type(res).__name__))

class Formatter(metaclass=FormatterMeta):
    """Renders command results. Subclasses implement `format_<kind>` for
    the result kinds they support; raw bytes pass through unchanged."""
    def __init__(self, unit='decimal'):
        self.unit = unit

    def format(self, res):
        if isinstance(res, bytes):
            return res
        kind = result_kind(res)
        handler = getattr(self, 'format_' + kind, None)
        if handler is None:
            raise errors.UsageError('the {} format does not support {} output'.format(
                self._name_, kind))
        return handler(res)

    def encode(self, res):
        """Returns the formatted result as bytes."""
        out = self.format(res)
        return out if isinstance(out, bytes) else out.encode('utf8')
