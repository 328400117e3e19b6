import io
import os
import sys
import errno
import fcntl
import pkgutil
import tempfile
import importlib
import contextlib

from .. import logs

log = logs.get(__name__)

BASE_PATH = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..'))

def base_path(*names):
    return os.path.join(BASE_PATH, *names)

def ensure_dirs(path, mode=0o755):
    """Creates *path* if it does not exist. Does nothing otherwise."""
    try:
        os.makedirs(path, mode)
    except OSError:
        pass

def discard_file(path):
    """Removes *path* if it exists. Does nothing otherwise."""
    try:
        os.remove(path)
    except OSError as e:
        if e.errno != errno.ENOENT:
            raise

def read_bytes(path):
    """Returns the contents of *path*, or of stdin if *path* is '-'."""
    if path == '-':
        return sys.stdin.buffer.read()
    with open(path, 'rb') as fp:
        return fp.read()

@contextlib.contextmanager
def atomic_open(path, mode='wb'):
    """Opens a temporary file next to *path* and renames it over *path* only
    if the block exits cleanly. A failed block leaves no file behind."""
    dirname = os.path.dirname(os.path.abspath(path))
    ensure_dirs(dirname)
    fd, tmp_path = tempfile.mkstemp(dir=dirname,
        prefix='.{}.'.format(os.path.basename(path)), suffix='.tmp')
    try:
        with io.open(fd, mode) as fp:
            yield fp
            fp.flush()
            os.fsync(fp.fileno())
        os.replace(tmp_path, path)
    except BaseException:
        discard_file(tmp_path)
        raise
    log.debug('written: %s', path)

@contextlib.contextmanager
def locked(path):
    """Holds an exclusive `flock` on the file *path* (created if missing)
    for the duration of the block. Blocks other processes and other open
    handles in this process."""
    ensure_dirs(os.path.dirname(os.path.abspath(path)))
    with open(path, 'ab') as fp:
        fcntl.flock(fp.fileno(), fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fp.fileno(), fcntl.LOCK_UN)

def write_bytes(path, data):
    with atomic_open(path, 'wb') as fp:
        fp.write(data)

def import_package(pkgname):
    """Imports all modules in a package (aka directory).

    Returns a dict of `{<modname>: <exc>}` for modules that raise an exception
    on import.
    """
    exceptions = {}

    path = base_path(pkgname.replace('.', '/'))
    for _, modname, ispkg in pkgutil.iter_modules([path]):
        if ispkg: continue
        exc = import_module(modname, pkgname)
        if exc:
            exceptions[modname] = exc

    return exceptions

def import_module(modname, pkgname=None):
    """Imports a module, optionally from a package.

    Returns any exceptions."""
    name = '.'.join(filter(None, [pkgname, modname]))
    try:
        log.debug('loading: %s', name)
        if pkgname:
            importlib.import_module('.' + modname, pkgname)
        else:
            importlib.import_module(modname)
    except Exception as e:
        return e
