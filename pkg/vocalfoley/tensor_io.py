# -*- coding: utf-8 -*-

"""
************************
vocalfoley.tensor_io
************************

Reading and writing of the ``.vft`` binary tensor format used for mel
spectrograms, normalization statistics and codebooks.

Layout (all integers little-endian):

=========  ==========================  ==========================================
Offset     Type                        Content
=========  ==========================  ==========================================
0          4 bytes                     magic ``b"VFTN"``
4          ``uint8``                   format version (``1``)
5          ``uint8``                   dtype code: 1 float32, 2 float64, 3 int64
6          ``uint16``                  number of dimensions ``ndim``
8          ``ndim`` x ``uint64``       dimensions
8+8*ndim   32 bytes                    raw SHA-256 configuration hash (zeros if none)
40+8*ndim  ...                         C-order little-endian data
=========  ==========================  ==========================================

"""
import logging
import struct

import numpy as np

from vocalfoley.errors import TensorFormatError, OutputPathError
from vocalfoley.utilities import ensure_writable

logger = logging.getLogger(__name__)

MAGIC = b'VFTN'
FORMAT_VERSION = 1

DTYPE_CODES = {
    1: np.dtype('<f4'),
    2: np.dtype('<f8'),
    3: np.dtype('<i8'),
}
_CODES_BY_KIND = {
    np.dtype('float32'): 1,
    np.dtype('float64'): 2,
    np.dtype('int64'): 3,
}

_PREAMBLE = struct.Struct('<4sBBH')
_HASH_BYTES = 32


def _hash_to_bytes(config_hash):
    if config_hash is None:
        return b'\x00' * _HASH_BYTES
    if isinstance(config_hash, bytes):
        raw = config_hash
    else:
        try:
            raw = bytes.fromhex(str(config_hash))
        except ValueError:
            raise TensorFormatError('config_hash is not a hex digest: %s' % config_hash)
    if len(raw) != _HASH_BYTES:
        raise TensorFormatError('config_hash must be a SHA-256 digest (32 bytes)')

    return raw


def _bytes_to_hash(raw):
    if raw == b'\x00' * _HASH_BYTES:
        return None

    return raw.hex()


def encode_tensor(array, config_hash = None):
    """Serialize ``array`` to the ``.vft`` byte layout.

    :param array: The array to serialize. Integer arrays are stored as
      ``int64``; other real arrays keep ``float32`` or are widened to ``float64``.
    :type array: :class:`numpy.ndarray`

    :param config_hash: Optional SHA-256 hex digest (or 32 raw bytes) of the
      configuration that produced ``array``.
    :type config_hash: :class:`str <python:str>` / :class:`bytes <python:bytes>` /
      :obj:`None <python:None>`

    :rtype: :class:`bytes <python:bytes>`

    :raises TensorFormatError: if ``array`` has an unsupported dtype or contains
      non-finite floats
    """
    array = np.asarray(array)
    if array.dtype.kind in 'iub':
        array = array.astype(np.int64)
    elif array.dtype == np.float32:
        pass
    elif array.dtype.kind == 'f':
        array = array.astype(np.float64)
    else:
        raise TensorFormatError('unsupported dtype: %s' % array.dtype)

    if array.dtype.kind == 'f' and not np.all(np.isfinite(array)):
        raise TensorFormatError('array contains non-finite values')

    code = _CODES_BY_KIND[np.dtype(array.dtype.name)]
    header = _PREAMBLE.pack(MAGIC, FORMAT_VERSION, code, array.ndim)
    header += struct.pack('<%dQ' % array.ndim, *array.shape)
    header += _hash_to_bytes(config_hash)

    data = np.ascontiguousarray(array, dtype = DTYPE_CODES[code]).tobytes(order = 'C')

    return header + data


def decode_tensor(data, expected_hash = None):
    """Parse ``.vft`` bytes.

    :param expected_hash: If supplied, the stored hash must equal it.
    :type expected_hash: :class:`str <python:str>` / :obj:`None <python:None>`

    :returns: The array and its stored hash (:obj:`None <python:None>` when the
      stored hash is all zeros).
    :rtype: :class:`tuple <python:tuple>` of (:class:`numpy.ndarray`,
      :class:`str <python:str>` / :obj:`None <python:None>`)

    :raises TensorFormatError: if ``data`` is malformed or the hash differs
    """
    if len(data) < _PREAMBLE.size:
        raise TensorFormatError('tensor data is truncated')

    magic, version, code, ndim = _PREAMBLE.unpack_from(data, 0)
    if magic != MAGIC:
        raise TensorFormatError('not a vocalfoley tensor file (magic %r)' % magic)
    if version != FORMAT_VERSION:
        raise TensorFormatError('unsupported tensor format version %s' % version)
    if code not in DTYPE_CODES:
        raise TensorFormatError('unknown dtype code %s' % code)

    offset = _PREAMBLE.size
    dims_size = 8 * ndim
    if len(data) < offset + dims_size + _HASH_BYTES:
        raise TensorFormatError('tensor header is truncated')

    shape = struct.unpack_from('<%dQ' % ndim, data, offset)
    offset += dims_size
    stored_hash = _bytes_to_hash(data[offset:offset + _HASH_BYTES])
    offset += _HASH_BYTES

    dtype = DTYPE_CODES[code]
    expected_size = int(np.prod(shape, dtype = np.int64)) * dtype.itemsize
    if len(data) - offset != expected_size:
        raise TensorFormatError('tensor payload has %d bytes, header declares %d' % (
            len(data) - offset, expected_size))

    if expected_hash is not None and stored_hash != expected_hash:
        raise TensorFormatError('configuration hash mismatch: file has %s, expected %s' % (
            stored_hash, expected_hash))

    array = np.frombuffer(data, dtype = dtype, offset = offset).reshape(shape)

    return array.astype(dtype.newbyteorder('='), copy = True), stored_hash


def write_tensor(path, array, config_hash = None):
    """Write ``array`` to ``path`` in the ``.vft`` format.

    :raises OutputPathError: if ``path`` cannot be written
    :raises TensorFormatError: if ``array`` cannot be encoded
    """
    path = ensure_writable(path)
    payload = encode_tensor(array, config_hash = config_hash)
    try:
        with open(path, 'wb') as output_file:
            output_file.write(payload)
    except OSError as error:
        raise OutputPathError('cannot write %s: %s' % (path, error))

    logger.debug('wrote tensor %s with shape %s', path, np.shape(array))

    return path


def read_tensor(path, expected_hash = None):
    """Read a ``.vft`` file.

    :returns: ``(array, stored_hash)``

    :raises TensorFormatError: if the file is missing, malformed, or its hash
      differs from ``expected_hash``
    """
    try:
        with open(str(path), 'rb') as input_file:
            data = input_file.read()
    except OSError as error:
        raise TensorFormatError('cannot read tensor file %s: %s' % (path, error))

    return decode_tensor(data, expected_hash = expected_hash)
