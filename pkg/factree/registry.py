import threading

from . import logs
from . import errors
from .utils.path import import_package

log = logs.get(__name__)

_metaclasses = {}
_init_lock = threading.RLock()

def init():
    """Import and register modules for all known metaclass registries.

    Safe to call multiple times from multiple threads.
    """
    for Meta in list(_metaclasses.values()):
        Meta.init()

def create_metaclass(meta_name):
    kind = meta_name.rsplit('.', 1)[-1]

    class RegistryMeta(type):
        registry = {}
        initialized = False

        def __init__(cls, name, bases, dct):
            if bases:
                cls._name_ = reg_name = dct.get('_name_', name)
                if reg_name in RegistryMeta.registry:
                    raise errors.RegistryError(
                        'already registered: {}'.format(reg_name))
                RegistryMeta.registry[reg_name] = cls
                log.debug('registered %s: %s', kind, reg_name)
            super(RegistryMeta, cls).__init__(name, bases, dct)

        @classmethod
        def get(cls, name):
            cls.init()
            try:
                found = cls.registry[name]
            except KeyError:
                raise errors.RegistryError('unknown {}: {!r} (available: {})'.format(
                    kind, name, ', '.join(cls.names())))
            if isinstance(found, Exception):
                raise found
            return found

        @classmethod
        def names(cls):
            cls.init()
            return tuple(sorted(k for k, v in cls.registry.items()
                if not isinstance(v, Exception)))

        @classmethod
        def init(cls):
            """Imports every module of the package once."""
            with _init_lock:
                if cls.initialized:
                    return
                cls.initialized = True
                exceptions = import_package(meta_name)
                for modname, exc in exceptions.items():
                    log.debug('failed to load %s.%s: %s', meta_name, modname, exc)
                    cls.registry.setdefault(modname, exc)

    _metaclasses[meta_name] = RegistryMeta
    return RegistryMeta
