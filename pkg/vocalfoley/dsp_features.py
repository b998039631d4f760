# -*- coding: utf-8 -*-

"""
************************
vocalfoley.dsp_features
************************

Short-time Fourier transform and log-mel front end shared by the training
targets, the metrics and the vocoder.

Frames are center-padded (reflect), so a clip of ``N`` samples always yields
``N // hop_length + 1`` frames. Mel energies are taken from the magnitude
spectrum and compressed with ``log(max(m, log_floor))``.

"""
import logging
import warnings
from functools import lru_cache

import numpy as np
import librosa

from vocalfoley.config import SpectralConfig
from vocalfoley.errors import SampleRateMismatchError, DimensionMismatchError, \
    TensorFormatError, ZeroVarianceWarning
from vocalfoley.tensor_io import write_tensor, read_tensor

logger = logging.getLogger(__name__)


class MelSpectrogram(object):
    """``T x n_mels`` matrix of log-mel energies with the configuration that
    produced it.

    :param values: The matrix; time on the first axis.
    :type values: array-like

    :param config: Front-end configuration. Defaults to :class:`SpectralConfig`'s
      defaults.
    :type config: :class:`SpectralConfig <vocalfoley.config.SpectralConfig>` /
      :obj:`None <python:None>`

    :param normalized: ``True`` when ``values`` are z-normalized.
    :type normalized: :class:`bool <python:bool>`

    :raises DimensionMismatchError: if ``values`` is not ``T x n_mels`` with
      ``T >= 1``, or contains non-finite values
    """

    def __init__(self, values, config = None, normalized = False):
        self.config = config or SpectralConfig()
        self.normalized = bool(normalized)
        self.values = values

    @property
    def values(self):
        return self._values

    @values.setter
    def values(self, value):
        value = np.asarray(value, dtype = np.float64)
        if value.ndim != 2 or value.shape[0] < 1:
            raise DimensionMismatchError('mel values must be a T x n_mels matrix with T >= 1, '
                                         'received shape %s' % (value.shape, ))
        if value.shape[1] != self.config.n_mels:
            raise DimensionMismatchError('mel has %d bins, configuration expects %d' % (
                value.shape[1], self.config.n_mels))
        if not np.all(np.isfinite(value)):
            raise DimensionMismatchError('mel values contain non-finite entries')

        self._values = value

    @property
    def frames(self):
        """Number of frames ``T``."""
        return self._values.shape[0]

    @property
    def shape(self):
        return self._values.shape

    def __repr__(self):
        return 'MelSpectrogram(%d x %d%s)' % (self.shape[0],
                                              self.shape[1],
                                              ', normalized' if self.normalized else '')

    def truncated(self, frames):
        """Return the first ``frames`` frames."""
        return MelSpectrogram(self.values[:frames],
                              config = self.config,
                              normalized = self.normalized)

    def save(self, path):
        """Write the matrix to ``path`` as a ``.vft`` tensor stamped with the
        configuration hash."""
        return write_tensor(path, self.values, config_hash = self.config.config_hash())

    @classmethod
    def load(cls, path, config = None, normalized = False):
        """Read a mel written by :meth:`save`.

        :param config: When supplied, the file's configuration hash must match it.

        :raises TensorFormatError: on a malformed file or configuration mismatch
        """
        expected_hash = config.config_hash() if config is not None else None
        values, _ = read_tensor(path, expected_hash = expected_hash)
        if values.ndim != 2:
            raise TensorFormatError('%s does not hold a 2-D mel matrix' % path)

        return cls(values, config = config, normalized = normalized)


class MelStats(object):
    """Per-bin mean and standard deviation used to z-normalize decoder targets.

    Zero standard deviations are replaced by ``1`` with a
    :class:`ZeroVarianceWarning <vocalfoley.errors.ZeroVarianceWarning>`.
    """

    def __init__(self, mean, std):
        mean = np.asarray(mean, dtype = np.float64).reshape(-1)
        std = np.asarray(std, dtype = np.float64).reshape(-1)
        if mean.shape != std.shape:
            raise DimensionMismatchError('mean has %d bins, std has %d' % (mean.shape[0],
                                                                          std.shape[0]))
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(std))):
            raise DimensionMismatchError('normalization statistics must be finite')

        zero_bins = np.flatnonzero(std <= 0)
        if zero_bins.size:
            warnings.warn('std is zero for mel bins %s; using 1 instead' % zero_bins.tolist(),
                          ZeroVarianceWarning)
            std = np.where(std <= 0, 1.0, std)

        self.mean = mean
        self.std = std

    def __eq__(self, other):
        return isinstance(other, MelStats) and \
            np.array_equal(self.mean, other.mean) and \
            np.array_equal(self.std, other.std)

    def __ne__(self, other):
        return not self.__eq__(other)

    @property
    def n_mels(self):
        return self.mean.shape[0]

    def to_array(self):
        """Return the ``2 x n_mels`` matrix (row 0 mean, row 1 std)."""
        return np.stack([self.mean, self.std])

    def save(self, path, config_hash = None):
        return write_tensor(path, self.to_array(), config_hash = config_hash)

    @classmethod
    def load(cls, path, config_hash = None):
        values, _ = read_tensor(path, expected_hash = config_hash)
        if values.ndim != 2 or values.shape[0] != 2:
            raise TensorFormatError('%s does not hold 2 x n_mels statistics' % path)

        return cls(values[0], values[1])


def _check_rate(clip, config):
    if clip.sample_rate != config.sample_rate:
        raise SampleRateMismatchError('clip is sampled at %d Hz, front end expects %d Hz' % (
            clip.sample_rate, config.sample_rate))


@lru_cache(maxsize = 16)
def _filterbank(sample_rate, fft_size, n_mels, fmin, fmax):
    basis = librosa.filters.mel(sr = sample_rate,
                                n_fft = fft_size,
                                n_mels = n_mels,
                                fmin = fmin,
                                fmax = fmax)
    basis.setflags(write = False)

    return basis


def mel_filterbank(config):
    """Return the ``n_mels x (fft_size / 2 + 1)`` triangular filterbank.

    The matrix is cached and read-only.

    :rtype: :class:`numpy.ndarray`
    """
    return _filterbank(config.sample_rate,
                       config.fft_size,
                       config.n_mels,
                       float(config.fmin),
                       float(config.effective_fmax))


def mel_band_centers(config):
    """Return the center frequency in Hz of each mel band."""
    edges = librosa.mel_frequencies(n_mels = config.n_mels + 2,
                                    fmin = config.fmin,
                                    fmax = config.effective_fmax)

    return edges[1:-1]


def stft(samples, config):
    """Complex center-padded STFT with frequency on the first axis, as
    returned by :func:`librosa.stft`."""
    return librosa.stft(np.asarray(samples, dtype = np.float64),
                        n_fft = config.fft_size,
                        hop_length = config.hop_length,
                        win_length = config.win_length,
                        window = config.window,
                        center = True,
                        pad_mode = 'reflect')


def stft_magnitude(clip, config):
    """Magnitude STFT of ``clip``.

    :param clip: Clip sampled at ``config.sample_rate``.
    :type clip: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :param config: Front-end configuration.
    :type config: :class:`SpectralConfig <vocalfoley.config.SpectralConfig>`

    :returns: ``T x (fft_size / 2 + 1)`` non-negative matrix with
      ``T = len(clip) // hop_length + 1``.
    :rtype: :class:`numpy.ndarray`

    :raises SampleRateMismatchError: if the clip's rate differs from the
      configuration's
    """
    _check_rate(clip, config)

    return np.abs(stft(clip.samples, config)).T


def magnitude_to_mel(magnitude, config):
    """Apply the filterbank and log compression to a ``T x bins`` magnitude
    matrix.

    :rtype: :class:`numpy.ndarray`
    """
    magnitude = np.asarray(magnitude, dtype = np.float64)
    if magnitude.ndim != 2 or magnitude.shape[1] != config.n_bins:
        raise DimensionMismatchError('magnitude must be T x %d, received shape %s' % (
            config.n_bins, magnitude.shape))

    energies = magnitude @ mel_filterbank(config).T

    return np.log(np.maximum(energies, config.log_floor))


def mel_spectrogram(clip, config):
    """Log-mel spectrogram of ``clip``.

    :rtype: :class:`MelSpectrogram`

    :raises SampleRateMismatchError: if the clip's rate differs from the
      configuration's
    """
    magnitude = stft_magnitude(clip, config)

    return MelSpectrogram(magnitude_to_mel(magnitude, config), config = config)


def compute_mel_stats(mels):
    """Per-bin mean and (population) standard deviation over every frame of
    ``mels``.

    :param mels: Training-set mel spectrograms.
    :type mels: iterable of :class:`MelSpectrogram` or ``T x n_mels`` arrays

    :rtype: :class:`MelStats`

    :raises DimensionMismatchError: if ``mels`` is empty or bin counts differ
    """
    matrices = [np.asarray(getattr(x, 'values', x), dtype = np.float64) for x in mels]
    if not matrices:
        raise DimensionMismatchError('cannot compute statistics over an empty collection')

    widths = set(x.shape[1] for x in matrices)
    if len(widths) != 1:
        raise DimensionMismatchError('mel bin counts differ: %s' % sorted(widths))

    stacked = np.concatenate(matrices, axis = 0)
    logger.debug('computing mel statistics over %d frames', stacked.shape[0])

    return MelStats(stacked.mean(axis = 0), stacked.std(axis = 0))


def _check_stats(mel, stats):
    if stats.n_mels != mel.shape[1]:
        raise DimensionMismatchError('statistics cover %d bins, mel has %d' % (stats.n_mels,
                                                                              mel.shape[1]))


def normalize_mel(mel, stats):
    """Per-bin z-normalization ``(mel - mean) / std``.

    :rtype: :class:`MelSpectrogram`
    """
    _check_stats(mel, stats)

    return MelSpectrogram((mel.values - stats.mean) / stats.std,
                          config = mel.config,
                          normalized = True)


def denormalize_mel(mel, stats):
    """Inverse of :func:`normalize_mel`.

    :rtype: :class:`MelSpectrogram`
    """
    _check_stats(mel, stats)

    return MelSpectrogram(mel.values * stats.std + stats.mean,
                          config = mel.config,
                          normalized = False)
