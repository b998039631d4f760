# -*- coding: utf-8 -*-

"""
************************
vocalfoley.conditioning
************************

Fusion of the quantized imitation with the one-hot sound event label.

For every frame ``t`` the conditioned vector is
``weight @ concat(v_t, c) + bias``, where ``v_t`` is the token vector of frame
``t`` and ``c`` the one-hot label repeated over all frames. Token vectors are
either rows of a learned token table (``embedding`` mode) or codebook
centroids (``centroid`` mode).

The trainable counterpart used by the decoder is
:class:`FusionLayer <vocalfoley.decoder._layers.FusionLayer>`; its parameters
can be exported as :class:`FusionParams` and applied here with NumPy.

"""
import numpy as np

from validator_collection import validators

from vocalfoley.errors import DimensionMismatchError, UnknownLabelError, ParameterError
from vocalfoley.quantizer import TokenSequence, lookup

DEFAULT_NUM_CLASSES = 31


class FusionParams(object):
    """Weight (``D x (E_in + num_classes)``) and bias (``D``) of the fusion.

    :raises DimensionMismatchError: on inconsistent or non-finite parameters
    """

    def __init__(self, weight, bias, num_classes = DEFAULT_NUM_CLASSES):
        weight = np.asarray(weight, dtype = np.float64)
        bias = np.asarray(bias, dtype = np.float64).reshape(-1)
        self.num_classes = validators.integer(num_classes, minimum = 1)

        if weight.ndim != 2 or weight.shape[1] <= self.num_classes:
            raise DimensionMismatchError('weight must be D x (E_in + %d), received shape %s' % (
                self.num_classes, weight.shape))
        if bias.shape[0] != weight.shape[0]:
            raise DimensionMismatchError('bias has %d entries, weight has %d rows' % (
                bias.shape[0], weight.shape[0]))
        if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
            raise DimensionMismatchError('fusion parameters must be finite')

        self.weight = weight
        self.bias = bias

    @property
    def fused_dim(self):
        """Output width ``D``."""
        return self.weight.shape[0]

    @property
    def input_dim(self):
        """Token vector width ``E_in``."""
        return self.weight.shape[1] - self.num_classes


class ConditionedSequence(object):
    """``T x D`` decoder input with the label and tokens it was built from."""

    def __init__(self, values, label = None, tokens = None, label_only = False):
        values = np.asarray(values, dtype = np.float64)
        if values.ndim != 2 or values.shape[0] < 1:
            raise DimensionMismatchError('conditioned values must be a T x D matrix with '
                                         'T >= 1, received shape %s' % (values.shape, ))
        if not np.all(np.isfinite(values)):
            raise DimensionMismatchError('conditioned values contain non-finite entries')

        self.values = values
        self.label = label
        self.tokens = tokens
        self.label_only = bool(label_only)

    def __len__(self):
        return self.values.shape[0]

    def __repr__(self):
        return 'ConditionedSequence(%d x %d, %r)' % (self.values.shape[0],
                                                     self.values.shape[1],
                                                     self.label)


def one_hot(label, num_classes = DEFAULT_NUM_CLASSES):
    """Return the one-hot vector of ``label``.

    :param label: The label, or its class id.
    :type label: :class:`EventLabel <vocalfoley.labels.EventLabel>` /
      :class:`int <python:int>`

    :rtype: :class:`numpy.ndarray` of shape ``(num_classes, )``

    :raises UnknownLabelError: if the class id is outside ``[0, num_classes)``
    """
    class_id = getattr(label, 'class_id', label)
    num_classes = validators.integer(num_classes, minimum = 1)
    try:
        class_id = validators.integer(class_id)
    except (ValueError, TypeError):
        raise UnknownLabelError('class id must be an integer, received %r' % (class_id, ))

    if not 0 <= class_id < num_classes:
        raise UnknownLabelError('class id %d is outside [0, %d)' % (class_id, num_classes))

    vector = np.zeros(num_classes, dtype = np.float64)
    vector[class_id] = 1.0

    return vector


def token_vectors(tokens, source, mode = 'embedding'):
    """Return the ``T x E_in`` token vectors fed to the fusion.

    :param tokens: Token ids.
    :type tokens: :class:`TokenSequence <vocalfoley.quantizer.TokenSequence>` /
      array-like

    :param source: The learned ``k x E_in`` token table (``embedding`` mode) or
      the :class:`Codebook <vocalfoley.quantizer.Codebook>` (``centroid`` mode).

    :param mode: ``embedding`` or ``centroid``.
    :type mode: :class:`str <python:str>`

    :rtype: :class:`numpy.ndarray`

    :raises TokenRangeError: if a token exceeds the table or codebook size
    :raises ParameterError: if ``mode`` is unknown
    """
    if mode == 'centroid':
        return lookup(tokens, source)
    if mode != 'embedding':
        raise ParameterError('mode must be "embedding" or "centroid", received %r' % (mode, ))

    table = np.asarray(source, dtype = np.float64)
    ids = tokens.tokens if isinstance(tokens, TokenSequence) else tokens
    ids = TokenSequence(ids, table.shape[0]).tokens

    return table[ids]


def fuse(vectors, label, params, label_only = False):
    """Fuse token vectors with the broadcast one-hot label.

    :param vectors: ``T x E_in`` token vectors.
    :type vectors: array-like

    :param label: The sound event label (or its class id).
    :type label: :class:`EventLabel <vocalfoley.labels.EventLabel>` /
      :class:`int <python:int>`

    :param params: Fusion parameters.
    :type params: :class:`FusionParams`

    :param label_only: If ``True``, token vectors are replaced by zeros so only
      the label columns contribute.
    :type label_only: :class:`bool <python:bool>`

    :rtype: :class:`ConditionedSequence`

    :raises DimensionMismatchError: if the vector width does not match ``params``
    """
    vectors = np.asarray(vectors, dtype = np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 1:
        raise DimensionMismatchError('token vectors must be a T x E_in matrix, received '
                                     'shape %s' % (vectors.shape, ))
    if vectors.shape[1] != params.input_dim:
        raise DimensionMismatchError('token vectors have width %d, fusion expects %d' % (
            vectors.shape[1], params.input_dim))

    if label_only:
        vectors = np.zeros_like(vectors)

    labels = np.tile(one_hot(label, params.num_classes), (vectors.shape[0], 1))
    stacked = np.concatenate([vectors, labels], axis = 1)

    return ConditionedSequence(stacked @ params.weight.T + params.bias,
                               label = label,
                               label_only = label_only)
