import pytest
import hypothesis

from factree import ingest

from .util import fixture_path, make_dataset

hypothesis.settings.register_profile('factree', derandomize=True, deadline=None,
    max_examples=50)
hypothesis.settings.load_profile('factree')

@pytest.fixture
def tiny():
    return ingest.read_dataset(fixture_path('tiny.csv'))

@pytest.fixture
def toy():
    return ingest.read_dataset(fixture_path('toy_separable.csv'))

@pytest.fixture
def separable():
    # only mex separates the targets
    return make_dataset(
        [[-1, 0, 0], [0, 0, 0], [1, 0, 0], [2, 0, 0]],
        [0, 0, 10, 10], ['y'])

@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / 'cache'
    monkeypatch.setenv('FACTOR_CACHE_DIR', str(path))
    return path
