import msgpack

from . import Codec, encode_date, decode_date

class MsgpackCodec(Codec):
    _name_ = 'msgpack'

    def encode(self, msg):
        return msgpack.packb(msg, use_bin_type=True, default=encode_date)

    def decode(self, data):
        return msgpack.unpackb(data, use_list=True, raw=False,
            object_hook=decode_date)
