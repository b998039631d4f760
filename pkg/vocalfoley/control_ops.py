# -*- coding: utf-8 -*-

"""
************************
vocalfoley.control_ops
************************

Pitch shifting and time stretching of imitations, used to measure how
synthesized sounds follow changes in the input.

Time stretching is a phase vocoder with identity phase locking: the phase of
every spectral peak is propagated with its instantaneous frequency and the
bins around it keep their analysis phase offset relative to the peak. Pitch
shifting stretches by the pitch factor and resamples back to the original
length.

"""
import logging

import numpy as np
import librosa
from scipy import signal

from validator_collection import validators

from vocalfoley.audio_io import AudioClip
from vocalfoley.errors import ParameterError

logger = logging.getLogger(__name__)

PITCH_UNITS = {
    'semitone': 12.0,
    'semioctave': 2.0,
}


def _peak_owners(magnitude):
    """Index of the nearest spectral peak for every bin."""
    left = np.concatenate([[-np.inf], magnitude[:-1]])
    right = np.concatenate([magnitude[1:], [-np.inf]])
    peaks = np.flatnonzero((magnitude >= left) & (magnitude > right))
    if peaks.size == 0:
        return np.arange(magnitude.shape[0])

    boundaries = (peaks[:-1] + peaks[1:]) / 2.0
    bins = np.arange(magnitude.shape[0])

    return peaks[np.searchsorted(boundaries, bins, side = 'left')]


def phase_vocoder(spectrum, rate, hop_length):
    """Time-scale a complex ``bins x T`` STFT by ``rate`` with identity phase
    locking.

    :returns: ``bins x ceil(T / rate)`` complex matrix.
    :rtype: :class:`numpy.ndarray`
    """
    n_bins = spectrum.shape[0]
    n_fft = 2 * (n_bins - 1)
    time_steps = np.arange(0, spectrum.shape[1], rate, dtype = np.float64)
    expected_advance = 2.0 * np.pi * hop_length * np.arange(n_bins) / n_fft

    padded = np.pad(spectrum, [(0, 0), (0, 2)], mode = 'constant')
    output = np.zeros((n_bins, time_steps.shape[0]), dtype = np.complex128)
    accumulated = np.angle(padded[:, 0])

    for index, step in enumerate(time_steps):
        frame = int(step)
        current = padded[:, frame]
        following = padded[:, frame + 1]
        alpha = step - frame

        magnitude = (1.0 - alpha) * np.abs(current) + alpha * np.abs(following)
        analysis_phase = np.angle(current)

        owners = _peak_owners(magnitude)
        locked = accumulated[owners] + analysis_phase - analysis_phase[owners]
        output[:, index] = magnitude * np.exp(1j * locked)

        deviation = np.angle(following) - analysis_phase - expected_advance
        deviation -= 2.0 * np.pi * np.round(deviation / (2.0 * np.pi))
        accumulated = locked + expected_advance + deviation

    return output


def time_stretch(clip, rate, n_fft = 1024, hop_length = 256):
    """Change the speed of ``clip`` by ``rate`` without changing its pitch.

    ``rate > 1`` speeds up, ``rate < 1`` slows down. The output holds
    ``round(len(clip) / rate)`` samples; ``rate == 1`` returns a copy.

    :param clip: The clip.
    :type clip: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :param rate: Speed factor.
    :type rate: numeric

    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :raises ParameterError: if ``rate`` is not a positive finite number
    """
    try:
        rate = validators.float(rate)
    except (ValueError, TypeError):
        raise ParameterError('rate must be a number, received %r' % (rate, ))
    if not np.isfinite(rate) or rate <= 0:
        raise ParameterError('rate must be positive, received %s' % rate)

    if rate == 1.0:
        return clip.copy()

    length = int(round(len(clip) / rate))
    spectrum = librosa.stft(clip.samples,
                            n_fft = n_fft,
                            hop_length = hop_length,
                            window = 'hann',
                            center = True)
    stretched = phase_vocoder(spectrum, rate, hop_length)
    samples = librosa.istft(stretched,
                            hop_length = hop_length,
                            n_fft = n_fft,
                            window = 'hann',
                            center = True,
                            length = length)
    logger.debug('time stretch by %.3f: %d -> %d samples', rate, len(clip), length)

    return AudioClip(samples, clip.sample_rate)


def pitch_factor(steps, unit = 'semitone'):
    """Frequency ratio of a shift by ``steps`` in ``unit``: ``2 ** (steps / 12)``
    for semitones and ``2 ** (steps / 2)`` for semi-octaves.

    :raises ParameterError: if ``unit`` is unknown or ``steps`` is not finite
    """
    if unit not in PITCH_UNITS:
        raise ParameterError('pitch unit must be one of %s, received %r' % (
            ', '.join(sorted(PITCH_UNITS)), unit))
    try:
        steps = validators.float(steps)
    except (ValueError, TypeError):
        raise ParameterError('steps must be a number, received %r' % (steps, ))
    if not np.isfinite(steps):
        raise ParameterError('steps must be finite, received %s' % steps)

    return 2.0 ** (steps / PITCH_UNITS[unit])


def pitch_shift(clip, steps, unit = 'semitone', n_fft = 1024, hop_length = 256):
    """Shift the pitch of ``clip`` by ``steps`` while keeping its duration.

    :param clip: The clip.
    :type clip: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :param steps: Shift amount; positive raises the pitch.
    :type steps: numeric

    :param unit: ``semitone`` or ``semioctave``.
    :type unit: :class:`str <python:str>`

    :returns: A clip with exactly ``len(clip)`` samples.
    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :raises ParameterError: if ``unit`` is unknown or ``steps`` is not finite
    """
    factor = pitch_factor(steps, unit)
    if factor == 1.0:
        return clip.copy()

    stretched = time_stretch(clip, 1.0 / factor, n_fft = n_fft, hop_length = hop_length)
    samples = signal.resample(stretched.samples, len(clip))

    return AudioClip(samples, clip.sample_rate)


def apply_controls(clip, pitch = None, unit = 'semitone', speed = None, controls_config = None):
    """Apply an optional pitch shift and then an optional speed change.

    :param controls_config: Supplies the STFT size and hop; defaults to
      ``1024`` / ``256``.
    :type controls_config: :class:`ControlsConfig <vocalfoley.config.ControlsConfig>` /
      :obj:`None <python:None>`

    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`
    """
    n_fft = controls_config.n_fft if controls_config is not None else 1024
    hop_length = controls_config.hop_length if controls_config is not None else 256

    if pitch is not None:
        clip = pitch_shift(clip, pitch, unit = unit, n_fft = n_fft, hop_length = hop_length)
    if speed is not None:
        clip = time_stretch(clip, speed, n_fft = n_fft, hop_length = hop_length)

    return clip
