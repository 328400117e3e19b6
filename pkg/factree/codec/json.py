import json
import datetime

from . import Codec

class JsonCodec(Codec):
    """Canonical JSON: sorted keys, shortest round-trip floats, ISO dates."""
    _name_ = 'json'

    def __init__(self, encoding=None, indent=None):
        self._encoding = encoding or 'utf8'
        self._indent = indent

    def encode(self, msg):
        return json.dumps(msg, default=self.encode_obj, sort_keys=True,
            indent=self._indent, allow_nan=False).encode(self._encoding)

    def decode(self, data):
        return json.loads(data, object_hook=self.decode_obj)

    def encode_obj(self, obj):
        if isinstance(obj, datetime.date) and not isinstance(obj, datetime.datetime):
            return {'__date__': obj.isoformat()}
        raise TypeError('unsupported type: {}'.format(type(obj).__name__))

    def decode_obj(self, obj):
        if '__date__' in obj:
            return datetime.date.fromisoformat(obj['__date__'])
        return obj
