import os
import datetime

import temporenc

from .. import errors
from .. import utils
from .. import registry

CodecMeta = registry.create_metaclass(__name__)

# file extensions handled by a codec rather than CSV
EXTENSIONS = {
    '.json': 'json',
    '.msgpack': 'msgpack',
    '.mpk': 'msgpack',
    }

def get(name, codec_args=None):
    """Returns an instance of the Codec matching *name*."""
    if isinstance(name, Codec):
        return name
    cls = CodecMeta.get(name)
    return cls(**(codec_args or {}))

def for_path(path):
    """Returns the codec name for the extension of *path*, or None."""
    return EXTENSIONS.get(os.path.splitext(str(path))[1].lower())

class Codec(metaclass=CodecMeta):
    _name_ = None

    def encode(self, msg):
        raise NotImplementedError('abstract')

    def decode(self, data):
        raise NotImplementedError('abstract')

    def _encode(self, msg):
        """Wrapper that provides encoding error context. Used internally."""
        try:
            return self.encode(msg)
        except Exception as e:
            raise errors.EncodeError('{}: msg={}'.format(e,
                utils.format.elide(repr(msg))))

    def _decode(self, data):
        """Wrapper that provides decoding error context. Used internally."""
        try:
            return self.decode(data)
        except Exception as e:
            raise errors.DecodeError('{}: data={}'.format(e,
                utils.format.elide(repr(data))))

## date support

def encode_date(obj):
    """Packs calendar dates compactly. Only `datetime.date` is supported;
    intraday timestamps have no meaning for daily returns."""
    if isinstance(obj, datetime.datetime) or not isinstance(obj, datetime.date):
        raise TypeError('unsupported type: {}'.format(type(obj).__name__))
    return {'__date__': temporenc.packb(obj)}

def decode_date(obj):
    if '__date__' in obj:
        return temporenc.unpackb(obj['__date__']).date()
    return obj
