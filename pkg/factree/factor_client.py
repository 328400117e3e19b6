"""Downloads factor files from the data library and caches them on disk.

A cached file is returned without touching the network; `refresh=True`
downloads again. Cache layout: `<destination>/<sha256 of url>/<filename>`.
"""
import io
import os
import hashlib
import zipfile
import urllib.parse
from dataclasses import dataclass, field

import requests

from . import logs
from . import utils
from . import errors
from .ingest import FACTOR_COLUMNS, PORTFOLIO_COLUMNS

log = logs.get(__name__)

LIBRARY_URL = 'https://mba.tuck.dartmouth.edu/pages/faculty/ken.french/ftp/'
DEFAULT_FACTOR_URL = LIBRARY_URL + 'F-F_Research_Data_Factors_daily_CSV.zip'
DEFAULT_PORTFOLIO_URL = LIBRARY_URL + '6_Portfolios_2x3_daily_CSV.zip'

CACHE_DIR_ENV = 'FACTOR_CACHE_DIR'
DEFAULT_CACHE_DIR = os.path.join('~', '.cache', 'factree')
DEFAULT_TIMEOUT = 30.0

# header keywords each kind of file must contain
KINDS = {
    'daily_factors': FACTOR_COLUMNS,
    'six_portfolios': tuple(PORTFOLIO_COLUMNS.values()),
    }

DEFAULT_URLS = {
    'daily_factors': DEFAULT_FACTOR_URL,
    'six_portfolios': DEFAULT_PORTFOLIO_URL,
    }

RETRY_COUNT = 1
RETRY_INTERVAL = 1.0

# held while a cache directory is read or filled
LOCK_NAME = '.lock'

def default_cache_dir():
    return os.path.expanduser(os.environ.get(CACHE_DIR_ENV) or DEFAULT_CACHE_DIR)

@dataclass(frozen=True)
class FetchConfig:
    # defaults to the library file of `expected_kind`
    url: str = None
    destination: str = field(default_factory=default_cache_dir)
    timeout: float = DEFAULT_TIMEOUT
    expected_kind: str = 'daily_factors'

    def __post_init__(self):
        if self.expected_kind not in KINDS:
            raise errors.UsageError('unknown file kind: {!r} (expected one of: {})'.format(
                self.expected_kind, ', '.join(KINDS)))
        if self.url is None:
            object.__setattr__(self, 'url', DEFAULT_URLS[self.expected_kind])
        if not self.url:
            raise errors.UsageError('url must not be empty')
        if not self.timeout > 0:
            raise errors.UsageError('timeout must be > 0: {!r}'.format(self.timeout))

    @property
    def cache_dir(self):
        """Per-URL cache directory."""
        digest = hashlib.sha256(self.url.encode('utf8')).hexdigest()
        return os.path.join(self.destination, digest)

def cached_path(config):
    """Returns the cached file for *config*, or None."""
    try:
        names = sorted(os.listdir(config.cache_dir))
    except FileNotFoundError:
        return None
    # skip in-flight temp files
    names = [n for n in names if not n.startswith('.')]
    return os.path.join(config.cache_dir, names[0]) if names else None

def _download(url, timeout):
    try:
        res = requests.get(url, timeout=timeout)
        res.raise_for_status()
    except requests.Timeout as e:
        raise errors.Timeout('{}: {}'.format(url, e))
    except requests.RequestException as e:
        raise errors.NetworkError('{}: {}'.format(url, e))
    return res.content

def unpack(data, url=''):
    """Returns `(filename, bytes)` of the single file in a zip archive, or
    of *data* itself if it is plain text."""
    if zipfile.is_zipfile(io.BytesIO(data)):
        try:
            with zipfile.ZipFile(io.BytesIO(data)) as z:
                entries = [i for i in z.infolist() if not i.is_dir()]
                if len(entries) > 1:
                    raise errors.MultipleEntries('{} entries in archive: {}'.format(
                        len(entries), ', '.join(i.filename for i in entries)))
                if not entries:
                    raise errors.NotAnArchive('archive is empty')
                return os.path.basename(entries[0].filename), z.read(entries[0])
        except zipfile.BadZipFile as e:
            raise errors.NotAnArchive('corrupt archive: {}'.format(e))

    try:
        data.decode('utf-8-sig')
    except UnicodeDecodeError:
        raise errors.NotAnArchive('download is neither a zip archive nor text')
    name = os.path.basename(urllib.parse.urlsplit(url).path) or 'download.csv'
    return name, data

def check_kind(data, kind):
    text = data.decode('utf-8-sig', errors='replace')
    missing = [k for k in KINDS[kind] if k not in text]
    if missing:
        raise errors.UnexpectedContent('not a {} file (missing: {})'.format(
            kind, ', '.join(missing)))

def fetch_factor_archive(config=None, refresh=False):
    """Returns the raw bytes of the file at `config.url`, unpacking a
    single-entry zip archive, from the cache when possible."""
    config = config or FetchConfig()
    with utils.path.locked(os.path.join(config.cache_dir, LOCK_NAME)):
        path = cached_path(config)
        if path and not refresh:
            log.info('cache hit: %s', path)
            return utils.path.read_bytes(path)

        log.info('downloading %s', config.url)
        retry = utils.retry.Retry(RETRY_COUNT, RETRY_INTERVAL,
            errors=(errors.NetworkError,), logger=log)
        data = retry.call(_download, config.url, config.timeout)
        name, data = unpack(data, config.url)
        check_kind(data, config.expected_kind)

        if path:
            utils.path.discard_file(path)
        path = os.path.join(config.cache_dir, name)
        utils.path.write_bytes(path, data)
        log.info('cached %s bytes: %s', len(data), path)
        return data
