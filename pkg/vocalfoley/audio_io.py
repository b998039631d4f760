# -*- coding: utf-8 -*-

"""
************************
vocalfoley.audio_io
************************

Loading, saving, resampling and length normalization of mono audio.

Resampling is polyphase (:func:`scipy.signal.resample_poly`) with the up/down
factors reduced by their greatest common divisor, so 48000 Hz to 22050 Hz runs
with ``up = 147`` and ``down = 320``.

"""
import logging
import math

import numpy as np
import soundfile as sf
import librosa
from scipy import signal

from validator_collection import validators, checkers

from vocalfoley.errors import AudioFileNotFoundError, AudioFormatError, \
    EmptyAudioError, OutputPathError, ParameterError
from vocalfoley.utilities import ensure_writable

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = ('PCM_16', 'FLOAT', 'DOUBLE')
SUPPORTED_FORMATS = ('WAV', 'WAVEX')
BIT_DEPTHS = (16, )


class AudioClip(object):
    """Mono waveform with its sample rate.

    :param samples: One-dimensional sequence of finite amplitudes.
    :type samples: array-like

    :param sample_rate: Sample rate in Hz.
    :type sample_rate: :class:`int <python:int>`

    :raises AudioFormatError: if ``samples`` is not one-dimensional or contains
      non-finite values
    :raises ParameterError: if ``sample_rate`` is not a positive integer
    """

    def __init__(self, samples, sample_rate):
        self.samples = samples
        self.sample_rate = sample_rate

    @property
    def samples(self):
        """The waveform as a :class:`numpy.ndarray` of ``float64``."""
        return self._samples

    @samples.setter
    def samples(self, value):
        value = np.asarray(value, dtype = np.float64)
        if value.ndim != 1:
            raise AudioFormatError('samples must be one-dimensional, received shape %s' % (
                value.shape, ))
        if not np.all(np.isfinite(value)):
            raise AudioFormatError('samples contain non-finite values')

        self._samples = value

    @property
    def sample_rate(self):
        """Sample rate in Hz.

        :rtype: :class:`int <python:int>`
        """
        return self._sample_rate

    @sample_rate.setter
    def sample_rate(self, value):
        try:
            self._sample_rate = validators.integer(value, minimum = 1)
        except (ValueError, TypeError):
            raise ParameterError('sample_rate must be a positive integer, received %s' % value)

    def __len__(self):
        return self.samples.shape[0]

    def __repr__(self):
        return 'AudioClip(%d samples, %d Hz)' % (len(self), self.sample_rate)

    @property
    def duration(self):
        """Duration in seconds."""
        return len(self) / float(self.sample_rate)

    @property
    def peak(self):
        if len(self) == 0:
            return 0.0

        return float(np.max(np.abs(self.samples)))

    @property
    def rms(self):
        if len(self) == 0:
            return 0.0

        return float(np.sqrt(np.mean(self.samples ** 2)))

    def copy(self):
        return AudioClip(self.samples.copy(), self.sample_rate)


def load_wav(path):
    """Load a RIFF/WAVE file as a mono :class:`AudioClip`.

    Integer PCM is scaled by ``1 / 32768``. Stereo (or wider) files are downmixed
    by the channel mean. Floating point files are clamped to ``[-1, 1]``.

    :param path: Location of the file.
    :type path: Path-like

    :rtype: :class:`AudioClip`

    :raises AudioFileNotFoundError: if ``path`` does not exist
    :raises AudioFormatError: if the file is not a 16-bit PCM or float WAV
    :raises EmptyAudioError: if the file holds no samples
    """
    path = str(path)
    if not checkers.is_file(path):
        raise AudioFileNotFoundError('audio file not found: %s' % path)

    try:
        info = sf.info(path)
    except RuntimeError as error:
        raise AudioFormatError('cannot decode %s: %s' % (path, error))

    if info.format not in SUPPORTED_FORMATS:
        raise AudioFormatError('%s: unsupported container %s (expected RIFF/WAVE)' % (
            path, info.format))
    if info.subtype not in SUPPORTED_SUBTYPES:
        raise AudioFormatError('%s: unsupported codec %s (expected one of %s)' % (
            path, info.subtype, ', '.join(SUPPORTED_SUBTYPES)))

    if info.frames == 0:
        raise EmptyAudioError('empty audio: %s' % path)

    samples, sample_rate = sf.read(path, dtype = 'float64', always_2d = True)
    if samples.shape[0] == 0:
        raise EmptyAudioError('empty audio: %s' % path)

    if samples.shape[1] > 1:
        samples = samples.mean(axis = 1)
    else:
        samples = samples[:, 0]

    if not np.all(np.isfinite(samples)):
        raise AudioFormatError('%s contains non-finite samples' % path)

    logger.debug('loaded %s: %d samples at %d Hz', path, samples.shape[0], sample_rate)

    return AudioClip(np.clip(samples, -1.0, 1.0), sample_rate)


def quantize_pcm16(samples):
    """Convert amplitudes to 16-bit integers, clamping out-of-range values.

    :rtype: :class:`numpy.ndarray` of ``int16``
    """
    scaled = np.round(np.asarray(samples, dtype = np.float64) * 32768.0)

    return np.clip(scaled, -32768, 32767).astype(np.int16)


def save_wav(clip, path, bit_depth = 16):
    """Write ``clip`` as a mono 16-bit PCM RIFF/WAVE file.

    Out-of-range amplitudes are clamped, never rescaled.

    :param clip: The clip to write.
    :type clip: :class:`AudioClip`

    :param path: Destination file.
    :type path: Path-like

    :param bit_depth: Only ``16`` is supported.
    :type bit_depth: :class:`int <python:int>`

    :raises OutputPathError: if ``path`` cannot be written
    :raises ParameterError: if ``bit_depth`` is not supported
    """
    if bit_depth not in BIT_DEPTHS:
        raise ParameterError('bit_depth must be one of %s, received %s' % (BIT_DEPTHS,
                                                                          bit_depth))

    path = ensure_writable(path)
    try:
        sf.write(path,
                 quantize_pcm16(clip.samples),
                 clip.sample_rate,
                 subtype = 'PCM_16',
                 format = 'WAV')
    except (RuntimeError, OSError) as error:
        raise OutputPathError('cannot write %s: %s' % (path, error))

    logger.debug('wrote %s (%d samples at %d Hz)', path, len(clip), clip.sample_rate)

    return path


def resample(clip, target_rate):
    """Resample ``clip`` to ``target_rate`` with a polyphase filter.

    The output holds ``ceil(len * target / source)`` samples and is clamped to
    ``[-1, 1]``. Equal rates return an unchanged copy.

    :rtype: :class:`AudioClip`

    :raises ParameterError: if ``target_rate`` is not a positive integer
    """
    try:
        target_rate = validators.integer(target_rate, minimum = 1)
    except (ValueError, TypeError):
        raise ParameterError('target_rate must be a positive integer, received %s' % (
            target_rate, ))

    if target_rate == clip.sample_rate:
        return clip.copy()

    divisor = math.gcd(int(target_rate), int(clip.sample_rate))
    up = target_rate // divisor
    down = clip.sample_rate // divisor

    resampled = signal.resample_poly(clip.samples, up, down)

    return AudioClip(np.clip(resampled, -1.0, 1.0), target_rate)


def fix_length(clip, seconds):
    """Pad with trailing zeros or truncate at the end to exactly
    ``round(seconds * sample_rate)`` samples.

    :rtype: :class:`AudioClip`

    :raises ParameterError: if ``seconds`` is not positive
    """
    seconds = validators.float(seconds)
    if seconds <= 0:
        raise ParameterError('seconds must be positive, received %s' % seconds)

    size = int(round(seconds * clip.sample_rate))

    return AudioClip(librosa.util.fix_length(clip.samples, size = size), clip.sample_rate)


def normalize_peak(clip, peak = 0.95):
    """Scale ``clip`` so that its absolute peak equals ``peak``. Silent clips
    are returned unchanged.

    :rtype: :class:`AudioClip`
    """
    current = clip.peak
    if current <= 0:
        return clip.copy()

    return AudioClip(clip.samples * (peak / current), clip.sample_rate)
