# -*- coding: utf-8 -*-

"""
************************
vocalfoley.quantizer
************************

k-means codebook fitted on environmental-sound embeddings, used to turn
vocal-imitation embeddings into discrete tokens.

The fit is Lloyd's algorithm with k-means++ seeding
(:func:`sklearn.cluster.kmeans_plusplus`). Distances are computed with
:func:`scipy.spatial.distance.cdist` in fixed-size row chunks, so the result
depends only on the data and the seed. Ties go to the lowest centroid index.

"""
import logging
from collections import OrderedDict

import numpy as np
import yaml
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from validator_collection import validators, checkers

from vocalfoley.errors import DimensionMismatchError, InsufficientFramesError, \
    TokenRangeError, TensorFormatError, DeserializationError
from vocalfoley.tensor_io import write_tensor, read_tensor
from vocalfoley.utilities import parse_yaml, sha256_hex, ensure_writable

logger = logging.getLogger(__name__)

CHUNK_ROWS = 65536


class Codebook(object):
    """``k x E`` centroids with their provenance.

    :param centroids: The centroid matrix.
    :param extractor_id: Id of the extractor whose embeddings were clustered.
    :param seed: Seed of the k-means++ initialization.
    :param iterations: Configured iteration cap.
    :param iterations_run: Iterations actually run.
    :param inertia_history: Sum of squared distances after each assignment.

    :raises DimensionMismatchError: if ``centroids`` is not a finite, non-empty
      matrix
    """

    def __init__(self,
                 centroids,
                 extractor_id,
                 seed = 0,
                 iterations = 100,
                 iterations_run = None,
                 inertia_history = None):
        centroids = np.array(centroids, dtype = np.float64)
        if centroids.ndim != 2 or centroids.shape[0] < 1 or centroids.shape[1] < 1:
            raise DimensionMismatchError('centroids must be a k x E matrix, received shape %s'
                                         % (centroids.shape, ))
        if not np.all(np.isfinite(centroids)):
            raise DimensionMismatchError('centroids contain non-finite values')

        centroids.setflags(write = False)
        self.centroids = centroids
        self.extractor_id = validators.string(extractor_id, allow_empty = False)
        self.seed = validators.integer(seed, minimum = 0)
        self.iterations = validators.integer(iterations, minimum = 1)
        self.inertia_history = [float(x) for x in (inertia_history or [])]
        if iterations_run is None:
            iterations_run = len(self.inertia_history)
        self.iterations_run = validators.integer(iterations_run, minimum = 0)

    def __repr__(self):
        return 'Codebook(k = %d, E = %d, %s)' % (self.k, self.dim, self.extractor_id)

    def __eq__(self, other):
        return isinstance(other, Codebook) and \
            self.extractor_id == other.extractor_id and \
            np.array_equal(self.centroids, other.centroids)

    def __ne__(self, other):
        return not self.__eq__(other)

    @property
    def k(self):
        return self.centroids.shape[0]

    @property
    def dim(self):
        return self.centroids.shape[1]

    def checksum(self):
        """SHA-256 of the little-endian ``float64`` centroid bytes."""
        return sha256_hex(np.ascontiguousarray(self.centroids, dtype = '<f8').tobytes())

    def metadata(self):
        return OrderedDict([
            ('k', self.k),
            ('dim', self.dim),
            ('iterations', self.iterations),
            ('iterations_run', self.iterations_run),
            ('seed', self.seed),
            ('extractor_id', self.extractor_id),
            ('inertia_history', list(self.inertia_history)),
            ('centroids_sha256', self.checksum()),
        ])

    def save(self, path_stem):
        """Write ``<path_stem>.vft`` (centroids) and ``<path_stem>.yaml``
        (metadata).

        :returns: The two paths.
        :rtype: :class:`tuple <python:tuple>`
        """
        path_stem = str(path_stem)
        tensor_path = write_tensor(path_stem + '.vft', self.centroids)
        sidecar_path = ensure_writable(path_stem + '.yaml')
        with open(sidecar_path, 'w') as sidecar:
            yaml.safe_dump(dict(self.metadata()),
                           sidecar,
                           default_flow_style = False,
                           sort_keys = False)

        logger.info('saved codebook (k = %d) to %s', self.k, tensor_path)

        return tensor_path, sidecar_path

    @classmethod
    def load(cls, path_stem):
        """Read a codebook written by :meth:`save`.

        :raises TensorFormatError: if the centroid checksum or shape disagrees
          with the sidecar
        :raises DeserializationError: if the sidecar is missing or malformed
        """
        path_stem = str(path_stem)
        sidecar_path = path_stem + '.yaml'
        if not checkers.is_file(sidecar_path):
            raise DeserializationError('codebook metadata not found: %s' % sidecar_path)

        metadata = parse_yaml(sidecar_path)
        if not checkers.is_dict(metadata):
            raise DeserializationError('codebook metadata is not a mapping: %s' % sidecar_path)

        centroids, _ = read_tensor(path_stem + '.vft')
        codebook = cls(centroids,
                       extractor_id = metadata.get('extractor_id'),
                       seed = metadata.get('seed', 0),
                       iterations = metadata.get('iterations', 100),
                       iterations_run = metadata.get('iterations_run'),
                       inertia_history = metadata.get('inertia_history'))

        if codebook.k != metadata.get('k'):
            raise TensorFormatError('codebook has %d centroids, metadata says %s' % (
                codebook.k, metadata.get('k')))
        if metadata.get('centroids_sha256') and \
           metadata['centroids_sha256'] != codebook.checksum():
            raise TensorFormatError('centroid checksum mismatch for %s' % path_stem)

        return codebook


class TokenSequence(object):
    """Token ids in ``[0, k)`` with the checksum of the codebook that produced
    them.

    :raises TokenRangeError: if any token is outside ``[0, k)``
    """

    def __init__(self, tokens, k, codebook_id = None):
        tokens = np.asarray(tokens)
        if tokens.ndim != 1:
            raise DimensionMismatchError('tokens must be one-dimensional')
        if tokens.size and not np.issubdtype(tokens.dtype, np.integer):
            raise TokenRangeError('tokens must be integers, received %s' % tokens.dtype)

        self.k = validators.integer(k, minimum = 1)
        tokens = tokens.astype(np.int64)
        out_of_range = tokens[(tokens < 0) | (tokens >= self.k)]
        if out_of_range.size:
            raise TokenRangeError('token %d is outside [0, %d)' % (out_of_range[0], self.k))

        self.tokens = tokens
        self.codebook_id = codebook_id

    def __len__(self):
        return self.tokens.shape[0]

    def __repr__(self):
        return 'TokenSequence(%d tokens, k = %d)' % (len(self), self.k)


def _as_matrix(embeddings):
    """Stack embedding sequences (or raw matrices) and return the matrix plus
    the common extractor id."""
    matrices = []
    extractor_ids = set()
    for item in embeddings:
        if hasattr(item, 'vectors'):
            matrices.append(item.vectors)
            extractor_ids.add(item.extractor_id)
        else:
            matrices.append(np.asarray(item, dtype = np.float64))

    if not matrices:
        raise InsufficientFramesError('no embeddings supplied')
    if len(extractor_ids) > 1:
        raise DimensionMismatchError('embeddings come from several extractors: %s' % (
            ', '.join(sorted(extractor_ids))))
    if len(set(x.shape[1] for x in matrices)) != 1:
        raise DimensionMismatchError('embedding widths differ')

    extractor_id = extractor_ids.pop() if extractor_ids else None

    return np.concatenate(matrices, axis = 0).astype(np.float64), extractor_id


def _assign(frames, centroids):
    """Nearest centroid (lowest index on ties) and its squared distance for
    every frame."""
    labels = np.empty(frames.shape[0], dtype = np.int64)
    distances = np.empty(frames.shape[0], dtype = np.float64)
    for start in range(0, frames.shape[0], CHUNK_ROWS):
        stop = start + CHUNK_ROWS
        squared = cdist(frames[start:stop], centroids, metric = 'sqeuclidean')
        chunk_labels = np.argmin(squared, axis = 1)
        labels[start:stop] = chunk_labels
        distances[start:stop] = squared[np.arange(squared.shape[0]), chunk_labels]

    return labels, distances


def fit(embeddings, k = 200, iterations = 100, seed = 0, extractor_id = None):
    """Fit a k-means codebook.

    Runs at most ``iterations`` Lloyd iterations and stops early once the
    assignments no longer change. A cluster that loses all its frames is
    re-seeded with the frame farthest from its own centroid.

    :param embeddings: Environmental-sound embeddings.
    :type embeddings: iterable of :class:`EmbeddingSequence
      <vocalfoley.embedding.EmbeddingSequence>` or ``T x E`` arrays

    :param k: Number of centroids.
    :param iterations: Iteration cap.
    :param seed: Seed of the k-means++ initialization.
    :param extractor_id: Extractor id to record when ``embeddings`` are raw
      arrays.

    :rtype: :class:`Codebook`

    :raises InsufficientFramesError: if there are fewer distinct frames than ``k``
    :raises DimensionMismatchError: if the embeddings disagree in width or
      extractor
    """
    k = validators.integer(k, minimum = 1)
    iterations = validators.integer(iterations, minimum = 1)
    seed = validators.integer(seed, minimum = 0)

    frames, found_id = _as_matrix(embeddings)
    extractor_id = found_id or extractor_id or 'unknown'

    distinct = np.unique(frames, axis = 0).shape[0]
    if distinct < k:
        raise InsufficientFramesError('%d distinct frames cannot support %d clusters' % (
            distinct, k))

    centroids, _ = kmeans_plusplus(frames, n_clusters = k, random_state = seed)
    centroids = centroids.astype(np.float64)

    logger.info('fitting codebook: %d frames, E = %d, k = %d', frames.shape[0],
                frames.shape[1], k)

    history = []
    previous = None
    for iteration in range(iterations):
        labels, distances = _assign(frames, centroids)
        history.append(float(distances.sum()))

        if previous is not None and np.array_equal(labels, previous):
            logger.debug('assignments stable after %d iterations', iteration + 1)
            break
        previous = labels

        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, frames)
        counts = np.bincount(labels, minlength = k)

        occupied = counts > 0
        updated = centroids.copy()
        updated[occupied] = sums[occupied] / counts[occupied][:, None]

        empty = np.flatnonzero(~occupied)
        if empty.size:
            order = np.argsort(-distances, kind = 'stable')
            for cluster, frame_index in zip(empty, order):
                updated[cluster] = frames[frame_index]
            logger.debug('re-seeded %d empty clusters at iteration %d', empty.size,
                         iteration + 1)

        centroids = updated

    return Codebook(centroids,
                    extractor_id = extractor_id,
                    seed = seed,
                    iterations = iterations,
                    iterations_run = len(history),
                    inertia_history = history)


def encode(sequence, codebook):
    """Map every frame of ``sequence`` to its nearest centroid.

    :param sequence: Embeddings produced by the extractor the codebook was
      fitted with.
    :type sequence: :class:`EmbeddingSequence <vocalfoley.embedding.EmbeddingSequence>`

    :rtype: :class:`TokenSequence`

    :raises DimensionMismatchError: if the extractor ids or widths differ
    """
    if sequence.extractor_id != codebook.extractor_id:
        raise DimensionMismatchError('embeddings come from %s, codebook was fitted on %s' % (
            sequence.extractor_id, codebook.extractor_id))
    if sequence.vectors.shape[1] != codebook.dim:
        raise DimensionMismatchError('embedding width %d differs from codebook width %d' % (
            sequence.vectors.shape[1], codebook.dim))

    labels, _ = _assign(sequence.vectors, codebook.centroids)

    return TokenSequence(labels, codebook.k, codebook_id = codebook.checksum())


def lookup(tokens, codebook):
    """Return the ``T x E`` matrix of centroid rows selected by ``tokens``.

    :raises TokenRangeError: if a token is outside ``[0, k)``
    """
    if isinstance(tokens, TokenSequence):
        if tokens.k != codebook.k:
            raise TokenRangeError('tokens were produced for k = %d, codebook has k = %d' % (
                tokens.k, codebook.k))
        tokens = tokens.tokens
    else:
        tokens = TokenSequence(tokens, codebook.k).tokens

    return np.array(codebook.centroids[tokens])
