# -*- coding: utf-8 -*-

"""
************************
vocalfoley.embedding
************************

Frame-level feature extraction, the first stage of the encoder.

Two extractors are available, selected by ``extractor.name``:

* ``logmel-projection`` (built in): log-mel frames stacked with their deltas and
  projected to ``output_dim`` dimensions by a fixed-seed orthonormal matrix. Its
  frame rate equals the mel frame rate, ``sample_rate / hop_length``.
* ``external``: a TorchScript module (for instance an exported self-supervised
  audio encoder) that maps a ``1 x N`` waveform to ``T x E`` features. It
  declares its own sample rate, frame rate and ``E``.

"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import librosa

from validator_collection import validators, checkers

from vocalfoley.audio_io import resample
from vocalfoley.dsp_features import mel_spectrogram
from vocalfoley.errors import AudioTooShortError, ConfigurationError, \
    DimensionMismatchError, ExtractorWeightsError, ParameterError
from vocalfoley.utilities import sha256_hex

logger = logging.getLogger(__name__)


class EmbeddingSequence(object):
    """``T_e x E`` frame-level features with their frame rate and the id of the
    extractor that produced them."""

    def __init__(self, vectors, frame_rate, extractor_id):
        vectors = np.asarray(vectors, dtype = np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1:
            raise DimensionMismatchError('embedding vectors must be a T x E matrix with '
                                         'T >= 1, received shape %s' % (vectors.shape, ))
        if not np.all(np.isfinite(vectors)):
            raise DimensionMismatchError('embedding vectors contain non-finite values')

        self.vectors = vectors
        self.frame_rate = validators.float(frame_rate, minimum = 0)
        self.extractor_id = validators.string(extractor_id, allow_empty = False)

    def __len__(self):
        return self.vectors.shape[0]

    def __repr__(self):
        return 'EmbeddingSequence(%d x %d, %s)' % (self.vectors.shape[0],
                                                   self.vectors.shape[1],
                                                   self.extractor_id)

    @property
    def dim(self):
        return self.vectors.shape[1]


class FeatureExtractor(object):
    """Interface of frame-level feature extractors.

    Subclasses set :attr:`name`, :attr:`output_dim`, :attr:`frame_rate`,
    :attr:`sample_rate` and :attr:`extractor_id`, and implement
    :meth:`_features`. Extractors are read-only after construction.
    """

    name = None
    output_dim = None
    frame_rate = None
    sample_rate = None
    min_samples = 1

    @property
    def extractor_id(self):
        raise NotImplementedError()

    def _features(self, samples):
        raise NotImplementedError()

    def extract(self, clip):
        """Return the :class:`EmbeddingSequence` of ``clip``, resampling it to
        :attr:`sample_rate` first when needed.

        :raises AudioTooShortError: if the clip is shorter than one analysis
          window
        """
        if clip.sample_rate != self.sample_rate:
            logger.debug('resampling %d Hz clip to %d Hz for %s',
                         clip.sample_rate, self.sample_rate, self.name)
            clip = resample(clip, self.sample_rate)

        if len(clip) < self.min_samples:
            raise AudioTooShortError('clip has %d samples, %s needs at least %d' % (
                len(clip), self.name, self.min_samples))

        vectors = self._features(clip)
        if vectors.ndim != 2 or vectors.shape[1] != self.output_dim:
            raise DimensionMismatchError('%s produced shape %s, expected T x %d' % (
                self.name, vectors.shape, self.output_dim))

        return EmbeddingSequence(vectors, self.frame_rate, self.extractor_id)


class LogMelProjectionExtractor(FeatureExtractor):
    """Built-in extractor: ``[log-mel, delta]`` projected to ``output_dim``.

    :param spectral_config: Front-end settings.
    :type spectral_config: :class:`SpectralConfig <vocalfoley.config.SpectralConfig>`

    :param output_dim: Embedding width ``E``; at most ``2 * n_mels``.
    :param projection_seed: Seed of the orthonormal projection.
    :param delta_width: Odd window length of the delta filter.

    :raises ConfigurationError: if ``output_dim`` exceeds ``2 * n_mels``
    """

    name = 'logmel-projection'

    def __init__(self, spectral_config, output_dim = 64, projection_seed = 0, delta_width = 9):
        self.spectral_config = spectral_config
        self.output_dim = validators.integer(output_dim, minimum = 1)
        self.projection_seed = validators.integer(projection_seed, minimum = 0)
        self.delta_width = validators.integer(delta_width, minimum = 3)

        input_dim = 2 * spectral_config.n_mels
        if self.output_dim > input_dim:
            raise ConfigurationError('output_dim (%d) cannot exceed 2 * n_mels (%d)' % (
                self.output_dim, input_dim))

        generator = np.random.RandomState(self.projection_seed)
        gaussian = generator.standard_normal((input_dim, self.output_dim))
        projection, _ = np.linalg.qr(gaussian)
        projection.setflags(write = False)
        self.projection = projection

        self.sample_rate = spectral_config.sample_rate
        self.frame_rate = spectral_config.sample_rate / float(spectral_config.hop_length)
        self.min_samples = spectral_config.win_length

    @property
    def extractor_id(self):
        digest = sha256_hex({
            'spectral': self.spectral_config.config_hash(),
            'output_dim': self.output_dim,
            'projection_seed': self.projection_seed,
            'delta_width': self.delta_width,
        })

        return '%s:%s' % (self.name, digest[:16])

    def _features(self, clip):
        log_mel = mel_spectrogram(clip, self.spectral_config).values
        delta = librosa.feature.delta(log_mel.T,
                                      width = self.delta_width,
                                      order = 1,
                                      mode = 'nearest').T
        stacked = np.concatenate([log_mel, delta], axis = 1)

        return stacked @ self.projection


class TorchScriptExtractor(FeatureExtractor):
    """Adapter around an external TorchScript feature extractor.

    The module receives a ``1 x N`` ``float32`` waveform at :attr:`sample_rate`
    and must return ``T x E`` or ``1 x T x E`` features.

    :raises ExtractorWeightsError: if ``weights_path`` is unset or missing
    """

    name = 'external'

    def __init__(self, weights_path, sample_rate = 16000, frame_rate = 100.0, output_dim = 2048):
        import torch

        if not weights_path or not checkers.is_file(str(weights_path)):
            raise ExtractorWeightsError(
                'weights not found: %s (set extractor.weights_path or '
                'VOCALFOLEY_EXTRACTOR_WEIGHTS)' % weights_path
            )

        self.weights_path = str(weights_path)
        self.sample_rate = validators.integer(sample_rate, minimum = 1)
        self.frame_rate = validators.float(frame_rate, minimum = 0)
        self.output_dim = validators.integer(output_dim, minimum = 1)
        self.min_samples = max(1, int(round(self.sample_rate / self.frame_rate)))

        with open(self.weights_path, 'rb') as weights_file:
            self._weights_digest = sha256_hex(weights_file.read())

        self._module = torch.jit.load(self.weights_path, map_location = 'cpu')
        self._module.eval()

    @property
    def extractor_id(self):
        return '%s:%s' % (self.name, self._weights_digest[:16])

    def _features(self, clip):
        import torch

        waveform = torch.from_numpy(clip.samples.astype(np.float32)).unsqueeze(0)
        with torch.no_grad():
            output = self._module(waveform)

        output = output.detach().cpu().double().numpy()
        if output.ndim == 3 and output.shape[0] == 1:
            output = output[0]

        return output


def build_extractor(extractor_config, spectral_config):
    """Instantiate the extractor named by ``extractor_config.name``.

    :rtype: :class:`FeatureExtractor`

    :raises ExtractorWeightsError: if the external extractor has no weights
    """
    if extractor_config.name == 'logmel-projection':
        return LogMelProjectionExtractor(spectral_config,
                                         output_dim = extractor_config.output_dim,
                                         projection_seed = extractor_config.projection_seed,
                                         delta_width = extractor_config.delta_width)

    return TorchScriptExtractor(extractor_config.weights_path,
                                sample_rate = extractor_config.external_sample_rate,
                                frame_rate = extractor_config.external_frame_rate,
                                output_dim = extractor_config.external_output_dim)


def extract(extractor, clip):
    """Extract the embedding sequence of ``clip`` with ``extractor``.

    :rtype: :class:`EmbeddingSequence`
    """
    return extractor.extract(clip)


def extract_many(extractor, clips, workers = 1):
    """Extract several clips, optionally on a thread pool. Output order follows
    ``clips``.

    :rtype: :class:`list <python:list>` of :class:`EmbeddingSequence`
    """
    clips = list(clips)
    workers = validators.integer(workers, minimum = 1)
    if workers == 1 or len(clips) < 2:
        return [extractor.extract(x) for x in clips]

    with ThreadPoolExecutor(max_workers = workers) as executor:
        return list(executor.map(extractor.extract, clips))


def align(sequence, target_len):
    """Nearest-index resampling of ``sequence`` to ``target_len`` frames:
    ``output[i] = input[floor(i * T_e / target_len)]``.

    :rtype: :class:`EmbeddingSequence`

    :raises ParameterError: if ``target_len`` is below 1
    :raises DimensionMismatchError: if ``sequence`` is empty
    """
    try:
        target_len = validators.integer(target_len, minimum = 1)
    except (ValueError, TypeError):
        raise ParameterError('target_len must be a positive integer, received %s' % (
            target_len, ))

    source_len = sequence.vectors.shape[0]
    if source_len == 0:
        raise DimensionMismatchError('cannot align an empty embedding sequence')

    indices = (np.arange(target_len, dtype = np.int64) * source_len) // target_len

    return EmbeddingSequence(sequence.vectors[indices],
                             sequence.frame_rate * target_len / float(source_len),
                             sequence.extractor_id)
