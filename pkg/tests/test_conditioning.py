# -*- coding: utf-8 -*-

"""
***********************************
tests.test_conditioning
***********************************

Tests for the token and label fusion defined in :ref:`vocalfoley.conditioning`.

"""
import numpy as np
import pytest

from vocalfoley.conditioning import FusionParams, ConditionedSequence, one_hot, \
    token_vectors, fuse
from vocalfoley.labels import EventLabel
from vocalfoley.quantizer import Codebook, TokenSequence
from vocalfoley.errors import DimensionMismatchError, UnknownLabelError, ParameterError, \
    TokenRangeError


def make_params(input_dim = 4, fused_dim = 6, num_classes = 3, seed = 0):
    random_state = np.random.RandomState(seed)
    return FusionParams(random_state.standard_normal((fused_dim, input_dim + num_classes)),
                        random_state.standard_normal(fused_dim),
                        num_classes = num_classes)


@pytest.mark.parametrize('label, num_classes, expected_index, fails', [
    (0, 31, 0, False),
    (30, 31, 30, False),
    (EventLabel(2, 'siren'), 3, 2, False),
    (31, 31, None, True),
    (-1, 31, None, True),
    ('dog', 31, None, True),
])
def test_one_hot(label, num_classes, expected_index, fails):
    if not fails:
        result = one_hot(label, num_classes)
        assert result.shape == (num_classes, )
        assert result.sum() == 1.0
        assert result[expected_index] == 1.0
    else:
        with pytest.raises(UnknownLabelError):
            result = one_hot(label, num_classes)


def test_fuse_matches_affine_map():
    params = make_params()
    vectors = np.random.RandomState(1).standard_normal((5, 4))

    result = fuse(vectors, EventLabel(1, 'rooster'), params)

    expected = vectors @ params.weight[:, :4].T + params.weight[:, 5] + params.bias
    assert isinstance(result, ConditionedSequence)
    assert result.values.shape == (5, 6)
    assert np.allclose(result.values, expected)
    assert result.label == EventLabel(1, 'rooster')
    assert result.label_only is False


def test_fuse_label_only():
    params = make_params()
    vectors = np.random.RandomState(2).standard_normal((7, 4))

    result = fuse(vectors, 2, params, label_only = True)

    expected = params.weight[:, 6] + params.bias
    assert len(result) == 7
    assert np.allclose(result.values, np.tile(expected, (7, 1)))
    assert result.label_only is True


def test_fuse_label_changes_output():
    params = make_params()
    vectors = np.ones((3, 4))

    first = fuse(vectors, 0, params).values
    second = fuse(vectors, 1, params).values

    assert not np.allclose(first, second)
    assert np.allclose(second - first, params.weight[:, 5] - params.weight[:, 4])


@pytest.mark.parametrize('vectors', [
    np.ones((3, 5)),
    np.ones(4),
    np.ones((0, 4)),
])
def test_fuse_width_mismatch(vectors):
    with pytest.raises(DimensionMismatchError):
        fuse(vectors, 0, make_params())


def test_fuse_unknown_label():
    with pytest.raises(UnknownLabelError):
        fuse(np.ones((2, 4)), 3, make_params())


def test_token_vectors_embedding():
    table = np.arange(12, dtype = np.float64).reshape(4, 3)

    result = token_vectors(TokenSequence([3, 0, 3], 4), table)
    assert result.tolist() == [[9.0, 10.0, 11.0], [0.0, 1.0, 2.0], [9.0, 10.0, 11.0]]

    with pytest.raises(TokenRangeError):
        token_vectors([4], table)


def test_token_vectors_centroid():
    codebook = Codebook(np.array([[1.0, 1.0], [2.0, 2.0]]), extractor_id = 'test:0')

    result = token_vectors(TokenSequence([1, 1, 0], 2), codebook, mode = 'centroid')
    assert result.tolist() == [[2.0, 2.0], [2.0, 2.0], [1.0, 1.0]]


def test_token_vectors_unknown_mode():
    with pytest.raises(ParameterError):
        token_vectors([0], np.eye(2), mode = 'attention')


@pytest.mark.parametrize('weight, bias, num_classes, fails', [
    (np.zeros((6, 7)), np.zeros(6), 3, False),
    (np.zeros((6, 3)), np.zeros(6), 3, True),
    (np.zeros((6, 7)), np.zeros(5), 3, True),
    (np.zeros(7), np.zeros(1), 3, True),
    (np.full((6, 7), np.nan), np.zeros(6), 3, True),
])
def test_FusionParams(weight, bias, num_classes, fails):
    if not fails:
        params = FusionParams(weight, bias, num_classes = num_classes)
        assert params.fused_dim == 6
        assert params.input_dim == 4
    else:
        with pytest.raises(DimensionMismatchError):
            params = FusionParams(weight, bias, num_classes = num_classes)
