# -*- coding: utf-8 -*-

"""
***********************************
tests.test_utilities
***********************************

Tests for the helper functions written in :ref:`vocalfoley.utilities`.

"""
import os
import random

import numpy as np
import pytest
import torch

from tests.fixtures import input_files, check_input_file

from vocalfoley.utilities import parse_yaml, parse_json, canonical_json, sha256_hex, \
    deep_update, parse_override, seed_everything, ensure_writable
from vocalfoley.errors import DeserializationError, ConfigurationError, OutputPathError


@pytest.mark.parametrize('input_value, expected_result, fails', [
    ('key: value', {'key': 'value'}, False),
    ('train:\n  max_steps: 10', {'train': {'max_steps': 10}}, False),
    ('config/small_override.yaml', {'train': {'max_steps': 12, 'batch_size': 2},
                                    'quantizer': {'k': 4}}, False),
    ('', None, True),
    ('key: [unclosed', None, True),
])
def test_parse_yaml(input_files, input_value, expected_result, fails):
    input_value = check_input_file(input_files, input_value) if input_value else input_value
    if not fails:
        result = parse_yaml(input_value)
        assert result == expected_result
    else:
        with pytest.raises(DeserializationError):
            result = parse_yaml(input_value)


def test_parse_yaml_deserialize_function():
    with pytest.raises(ValueError):
        parse_yaml('key: value', deserialize_function = 'not-callable')


@pytest.mark.parametrize('input_value, expected_result, fails', [
    ('{"key": "value"}', {'key': 'value'}, False),
    ('[1, 2, 3]', [1, 2, 3], False),
    ('', None, True),
    ('{not json', None, True),
])
def test_parse_json(input_value, expected_result, fails):
    if not fails:
        result = parse_json(input_value)
        assert result == expected_result
    else:
        with pytest.raises(DeserializationError):
            result = parse_json(input_value)


def test_canonical_json():
    assert canonical_json({'b': 1, 'a': [1, 2]}) == '{"a":[1,2],"b":1}'


@pytest.mark.parametrize('value, expected_result', [
    (b'', 'e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855'),
    ('', 'e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855'),
])
def test_sha256_hex(value, expected_result):
    assert sha256_hex(value) == expected_result


def test_sha256_hex_key_order():
    assert sha256_hex({'a': 1, 'b': 2}) == sha256_hex({'b': 2, 'a': 1})


def test_deep_update():
    target = {'train': {'max_steps': 10, 'seed': 0}, 'seed': 1}
    result = deep_update(target, {'train': {'max_steps': 20}, 'quantizer': {'k': 8}})

    assert result is target
    assert result == {'train': {'max_steps': 20, 'seed': 0},
                      'seed': 1,
                      'quantizer': {'k': 8}}


@pytest.mark.parametrize('text, expected_result, fails', [
    ('train.max_steps=10', {'train': {'max_steps': 10}}, False),
    ('vocoder.kind=external', {'vocoder': {'kind': 'external'}}, False),
    ('seed=3', {'seed': 3}, False),
    ('dataset.class_subset=[dog, siren]', {'dataset': {'class_subset': ['dog', 'siren']}},
     False),
    ('paths.labels=', {'paths': {'labels': None}}, False),
    ('train.max_steps', None, True),
    ('=10', None, True),
])
def test_parse_override(text, expected_result, fails):
    if not fails:
        result = parse_override(text)
        assert result == expected_result
    else:
        with pytest.raises(ConfigurationError):
            result = parse_override(text)


def test_seed_everything():
    seed_everything(7)
    first = (random.random(), np.random.random(), torch.rand(1).item())
    seed_everything(7)
    second = (random.random(), np.random.random(), torch.rand(1).item())

    assert first == second

    with pytest.raises(ValueError):
        seed_everything(-1)


def test_ensure_writable(tmp_path):
    path = ensure_writable(tmp_path / 'a' / 'b' / 'file.txt')

    assert os.path.isdir(str(tmp_path / 'a' / 'b'))
    assert path == str(tmp_path / 'a' / 'b' / 'file.txt')

    with pytest.raises(OutputPathError):
        ensure_writable(tmp_path / 'a')
