__version__ = '0.1.0'

from . import logs
from .ingest import Dataset, align, read_dataset, write_dataset
from .tree import FitConfig, fit, predict
from .linear import fit_ols
from .stats import describe, summarize
from .report import balance, dominance_shares, render, replicate_table
from .utils.function import command, param
