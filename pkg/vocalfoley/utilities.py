# -*- coding: utf-8 -*-

"""
************************
vocalfoley.utilities
************************

This module defines a variety of utility functions which are used throughout
**vocalfoley**.

"""
import hashlib
import os
import random
from collections import OrderedDict

import numpy as np
import yaml

from validator_collection import validators, checkers

try:
    import simplejson as json
except ImportError:
    import json

from vocalfoley.errors import DeserializationError, ConfigurationError, OutputPathError


def parse_yaml(input_data,
               deserialize_function = None,
               **kwargs):
    """De-serialize YAML data into a Python :class:`dict <python:dict>` object.

    :param input_data: The YAML data to de-serialize.
    :type input_data: :class:`str <python:str>` / Path-like object

    :param deserialize_function: Optionally override the default YAML deserializer.
      Defaults to :obj:`None <python:None>`, which calls the default ``yaml.safe_load()``
      function from the `PyYAML <https://github.com/yaml/pyyaml>`_ library.
    :type deserialize_function: callable / :obj:`None <python:None>`

    :param kwargs: Optional keyword parameters that are passed to the
      YAML deserializer function.
    :type kwargs: keyword arguments

    :returns: A :class:`dict <python:dict>` representation of ``input_data``.
    :rtype: :class:`dict <python:dict>`

    :raises DeserializationError: if ``input_data`` is empty or cannot be parsed
    """
    if deserialize_function is None:
        deserialize_function = yaml.safe_load
    elif checkers.is_callable(deserialize_function) is False:
        raise ValueError(
            'deserialize_function (%s) is not callable' % deserialize_function
        )

    if not input_data:
        raise DeserializationError('input_data is empty')

    input_data = str(input_data)
    is_file = checkers.is_file(input_data)

    try:
        if not is_file:
            from_yaml = deserialize_function(input_data, **kwargs)
        else:
            with open(input_data, 'r') as input_file:
                from_yaml = deserialize_function(input_file, **kwargs)
    except yaml.YAMLError as error:
        raise DeserializationError('unable to parse YAML: %s' % error)

    return from_yaml


def parse_json(input_data,
               deserialize_function = None,
               **kwargs):
    """De-serialize JSON data into a Python object.

    :param input_data: The JSON data to de-serialize.
    :type input_data: :class:`str <python:str>` / Path-like object

    :param deserialize_function: Optionally override the default JSON deserializer.
      Defaults to :obj:`None <python:None>`, which calls ``simplejson.loads()``.
    :type deserialize_function: callable / :obj:`None <python:None>`

    :returns: The de-serialized object.

    :raises DeserializationError: if ``input_data`` is empty or not valid JSON
    """
    if deserialize_function is None:
        deserialize_function = json.loads
    elif checkers.is_callable(deserialize_function) is False:
        raise ValueError(
            'deserialize_function (%s) is not callable' % deserialize_function
        )

    if not input_data:
        raise DeserializationError('input_data is empty')

    input_data = str(input_data)
    if checkers.is_file(input_data):
        with open(input_data, 'r') as input_file:
            input_data = input_file.read()

    try:
        return deserialize_function(input_data, **kwargs)
    except ValueError as error:
        raise DeserializationError('unable to parse JSON: %s' % error)


def canonical_json(value):
    """Serialize ``value`` to a canonical JSON string (sorted keys, no
    whitespace), suitable for hashing.

    :rtype: :class:`str <python:str>`
    """
    return json.dumps(value, sort_keys = True, separators = (',', ':'))


def sha256_hex(value):
    """Return the hexadecimal SHA-256 digest of ``value``.

    :param value: :class:`bytes <python:bytes>`, a :class:`str <python:str>`
      (hashed as UTF-8) or any JSON-serializable object (hashed in canonical form).

    :rtype: :class:`str <python:str>`
    """
    if isinstance(value, bytes):
        data = value
    elif isinstance(value, str):
        data = value.encode('utf-8')
    else:
        data = canonical_json(value).encode('utf-8')

    return hashlib.sha256(data).hexdigest()


def deep_update(target, updates):
    """Recursively merge ``updates`` into ``target`` and return ``target``.

    Nested :class:`dict <python:dict>` values are merged key by key; everything
    else is replaced.
    """
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(target.get(key), dict):
            deep_update(target[key], value)
        else:
            target[key] = value

    return target


def parse_override(text):
    """Convert a ``section.key=value`` override into a nested
    :class:`dict <python:dict>`.

    The value is parsed as a YAML scalar, so ``train.max_steps=10`` yields an
    integer and ``vocoder.kind=external`` a string.

    :raises ConfigurationError: if ``text`` is not of the form ``dotted.key=value``
    """
    if '=' not in text:
        raise ConfigurationError('override "%s" is not of the form key=value' % text)

    key, raw_value = text.split('=', 1)
    key = key.strip()
    if not key:
        raise ConfigurationError('override "%s" has an empty key' % text)

    try:
        value = yaml.safe_load(raw_value) if raw_value.strip() else None
    except yaml.YAMLError:
        value = raw_value

    result = OrderedDict()
    cursor = result
    parts = key.split('.')
    for part in parts[:-1]:
        cursor[part] = OrderedDict()
        cursor = cursor[part]
    cursor[parts[-1]] = value

    return result


def seed_everything(seed):
    """Seed Python's, NumPy's and PyTorch's global random number generators.

    :param seed: The seed to apply.
    :type seed: :class:`int <python:int>`

    :returns: ``seed`` after validation
    :rtype: :class:`int <python:int>`
    """
    import torch

    seed = validators.integer(seed, minimum = 0)
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)

    return seed


def ensure_writable(path):
    """Create the parent directory of ``path`` if needed and confirm that a
    file can be written there.

    :returns: ``path`` as a :class:`str <python:str>`

    :raises OutputPathError: if the location is not writable
    """
    path = str(path)
    parent = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(parent, exist_ok = True)
    except OSError as error:
        raise OutputPathError('cannot create directory %s: %s' % (parent, error))

    if not os.access(parent, os.W_OK):
        raise OutputPathError('directory %s is not writable' % parent)
    if os.path.isdir(path):
        raise OutputPathError('%s is a directory' % path)

    return path
