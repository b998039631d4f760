# -*- coding: utf-8 -*-

"""
************************
vocalfoley.vocoder
************************

Conversion of predicted log-mel spectrograms back to waveforms.

The built-in vocoder inverts the mel filterbank with non-negative least
squares and recovers the phase with Griffin-Lim. A pre-trained neural vocoder
can be plugged in through an external command (see :class:`ExternalVocoder`);
there is no silent fallback from one to the other.

"""
import logging
import os
import shlex
import subprocess
import tempfile
import threading

import numpy as np
import librosa
import soundfile as sf

from validator_collection import validators

from vocalfoley.audio_io import AudioClip, load_wav, normalize_peak
from vocalfoley.config import SpectralConfig
from vocalfoley.dsp_features import mel_filterbank, mel_spectrogram
from vocalfoley.errors import ConfigurationError, DimensionMismatchError, ParameterError, \
    VocoderAdapterError, VocalFoleyError
from vocalfoley.tensor_io import write_tensor

logger = logging.getLogger(__name__)

PLACEHOLDERS = ('{mel_in}', '{wav_out}')


def _mel_config(mel, config):
    config = config or mel.config or SpectralConfig()
    if mel.shape[1] != config.n_mels:
        raise DimensionMismatchError('mel has %d bins, configuration expects %d' % (
            mel.shape[1], config.n_mels))
    if mel.normalized:
        raise ParameterError('mel is normalized; denormalize it before vocoding')

    return config


def mel_to_linear(mel, config = None):
    """Estimate the linear magnitude spectrogram behind a log-mel spectrogram.

    Log energies are exponentiated (frames at the log floor become exact
    zeros) and the filterbank is inverted by non-negative least squares
    (:func:`librosa.util.nnls`).

    :param mel: Log-mel spectrogram, not normalized.
    :type mel: :class:`MelSpectrogram <vocalfoley.dsp_features.MelSpectrogram>`

    :param config: Front-end configuration. Defaults to the mel's own.
    :type config: :class:`SpectralConfig <vocalfoley.config.SpectralConfig>` /
      :obj:`None <python:None>`

    :returns: ``T x (fft_size / 2 + 1)`` non-negative matrix.
    :rtype: :class:`numpy.ndarray`

    :raises DimensionMismatchError: if the mel does not match the configuration
    """
    config = _mel_config(mel, config)

    floor = np.log(config.log_floor)
    energies = np.where(mel.values <= floor + 1e-9, 0.0, np.exp(mel.values))
    if not np.any(energies):
        return np.zeros((mel.frames, config.n_bins))

    magnitude = librosa.util.nnls(np.asarray(mel_filterbank(config)), energies.T)

    return np.maximum(magnitude, 0.0).T


def output_length(frames, config):
    """Samples produced for ``frames`` mel frames: ``(frames - 1) * hop_length``,
    but never less than one ``fft_size`` window."""
    return max((frames - 1) * config.hop_length, config.fft_size)


def _istft(spectrum, config):
    return librosa.istft(spectrum,
                         hop_length = config.hop_length,
                         win_length = config.win_length,
                         n_fft = config.fft_size,
                         window = config.window,
                         center = False)


def _stft(samples, config):
    return librosa.stft(samples,
                        n_fft = config.fft_size,
                        hop_length = config.hop_length,
                        win_length = config.win_length,
                        window = config.window,
                        center = False)


def _bin_weights(config):
    weights = np.full(config.n_bins, 2.0)
    weights[0] = 1.0
    if config.fft_size % 2 == 0:
        weights[-1] = 1.0

    return weights[:, np.newaxis]


def phase_reconstruction(magnitude, config, n_iter = 60, seed = 0):
    """Griffin-Lim phase recovery for a ``T x bins`` magnitude matrix.

    Starts from uniformly random phases drawn with ``seed``. Iterations run on
    the uncentered ``fft_size + (T - 1) * hop_length`` signal, where the inverse
    STFT is the least-squares projection onto consistent spectrograms, so the
    error never increases. The result is trimmed to :func:`output_length`
    samples aligned with centered analysis frames.

    :returns: The samples and the relative STFT magnitude error
      ``||abs(STFT(x)) - magnitude|| / ||magnitude||`` (over the full,
      conjugate-symmetric spectrum) after each iteration.
    :rtype: :class:`tuple <python:tuple>` of (:class:`numpy.ndarray`,
      :class:`list <python:list>`)

    :raises ParameterError: if ``n_iter`` is smaller than 1 or the matrix has
      no frames
    """
    try:
        n_iter = validators.integer(n_iter, minimum = 1)
    except (ValueError, TypeError):
        raise ParameterError('n_iter must be a positive integer, received %s' % (n_iter, ))

    target = np.asarray(magnitude, dtype = np.float64).T
    if target.ndim != 2 or target.shape[1] < 1 or target.shape[0] != config.n_bins:
        raise ParameterError('magnitude must be a T x %d matrix with T >= 1, received '
                             'shape %s' % (config.n_bins, target.T.shape))

    weights = _bin_weights(config)
    scale = np.sqrt(np.sum(weights * target ** 2))

    random_state = np.random.RandomState(seed % (2 ** 32))
    phases = np.exp(2j * np.pi * random_state.random_sample(target.shape))

    errors = []
    for _ in range(n_iter):
        rebuilt = _stft(_istft(target * phases, config), config)
        if scale > 0:
            distance = np.sqrt(np.sum(weights * (np.abs(rebuilt) - target) ** 2))
            errors.append(float(distance / scale))
        else:
            errors.append(0.0)
        phases = rebuilt / np.maximum(np.abs(rebuilt), 1e-16)

    samples = _istft(target * phases, config)
    length = output_length(target.shape[1], config)
    offset = min(config.fft_size // 2, len(samples) - length)

    return samples[offset:offset + length], errors


def griffin_lim(mel, n_iter = 60, seed = 0, peak = 0.95, config = None):
    """Vocode a log-mel spectrogram with Griffin-Lim.

    :param mel: Log-mel spectrogram, not normalized.
    :type mel: :class:`MelSpectrogram <vocalfoley.dsp_features.MelSpectrogram>`

    :param n_iter: Griffin-Lim iterations.
    :type n_iter: :class:`int <python:int>`

    :param peak: Absolute peak of the output. Silent output is left silent.
    :type peak: numeric

    :returns: :func:`output_length` samples at the configured rate.
    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :raises ParameterError: if ``n_iter`` is smaller than 1
    """
    config = _mel_config(mel, config)
    magnitude = mel_to_linear(mel, config)
    samples, errors = phase_reconstruction(magnitude, config, n_iter = n_iter, seed = seed)
    logger.debug('griffin-lim: %d iterations, final error %.4f', n_iter, errors[-1])

    return normalize_peak(AudioClip(samples, config.sample_rate), peak = peak)


class ExternalVocoder(object):
    """Adapter to a vocoder run as an external command.

    The command template must contain ``{mel_in}`` and ``{wav_out}``. The mel is
    written to ``{mel_in}`` as a ``.vft`` tensor (``T x n_mels`` float64 log-mel,
    not normalized, stamped with the spectral configuration hash); the command
    must write a mono RIFF/WAVE file at the configured sample rate to
    ``{wav_out}``. One instance runs one process at a time.

    :raises ConfigurationError: if ``command`` is empty or lacks a placeholder
    """

    def __init__(self, command, timeout = 600.0, spectral_config = None):
        if not command:
            raise ConfigurationError('external vocoder selected but no adapter command is '
                                     'configured (set vocoder.command or '
                                     'VOCALFOLEY_VOCODER_COMMAND)')
        missing = [x for x in PLACEHOLDERS if x not in command]
        if missing:
            raise ConfigurationError('vocoder command lacks the placeholders %s' % (
                ', '.join(missing)))

        self.command = command
        self.timeout = timeout
        self.spectral_config = spectral_config or SpectralConfig()
        self._lock = threading.Lock()

    def _arguments(self, mel_in, wav_out):
        return [x.replace('{mel_in}', mel_in).replace('{wav_out}', wav_out)
                for x in shlex.split(self.command)]

    def _validate(self, wav_out):
        expected_rate = self.spectral_config.sample_rate
        try:
            info = sf.info(wav_out)
        except RuntimeError as error:
            raise VocoderAdapterError('adapter output %s is not readable audio: %s' % (
                wav_out, error))

        if info.samplerate != expected_rate:
            raise VocoderAdapterError('adapter returned %d Hz audio, expected %d Hz' % (
                info.samplerate, expected_rate))
        if info.channels != 1:
            raise VocoderAdapterError('adapter returned %d channels, expected mono' % (
                info.channels, ))

        try:
            return load_wav(wav_out)
        except VocalFoleyError as error:
            raise VocoderAdapterError('adapter output %s is malformed: %s' % (wav_out, error))

    def __call__(self, mel):
        """Vocode ``mel``.

        :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

        :raises VocoderAdapterError: if the process fails, times out or returns
          audio that is missing, unreadable, not mono or at the wrong rate
        """
        _mel_config(mel, self.spectral_config)

        with self._lock, tempfile.TemporaryDirectory(prefix = 'vocalfoley-') as workdir:
            mel_in = os.path.join(workdir, 'mel.vft')
            wav_out = os.path.join(workdir, 'out.wav')
            write_tensor(mel_in, mel.values, config_hash = self.spectral_config.config_hash())

            arguments = self._arguments(mel_in, wav_out)
            logger.debug('running vocoder adapter: %s', ' '.join(arguments))
            try:
                completed = subprocess.run(arguments,
                                           capture_output = True,
                                           text = True,
                                           timeout = self.timeout)
            except (OSError, subprocess.SubprocessError) as error:
                raise VocoderAdapterError('vocoder adapter could not run: %s' % error)

            if completed.returncode != 0:
                raise VocoderAdapterError('vocoder adapter exited with status %d: %s' % (
                    completed.returncode, completed.stderr.strip()[-500:]))
            if not os.path.isfile(wav_out):
                raise VocoderAdapterError('vocoder adapter wrote no audio to %s' % wav_out)

            return self._validate(wav_out)


def external_vocoder(mel, vocoder_config, spectral_config = None):
    """Vocode ``mel`` with the adapter configured in ``vocoder_config``.

    :raises ConfigurationError: if no adapter command is configured
    :raises VocoderAdapterError: on process failure or malformed output
    """
    adapter = ExternalVocoder(vocoder_config.command,
                              timeout = vocoder_config.timeout,
                              spectral_config = spectral_config or mel.config)

    return adapter(mel)


def vocode(mel, vocoder_config, spectral_config = None):
    """Dispatch to Griffin-Lim or the external adapter according to
    ``vocoder_config.kind``.

    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`
    """
    if vocoder_config.kind == 'external':
        return external_vocoder(mel, vocoder_config, spectral_config = spectral_config)

    return griffin_lim(mel,
                       n_iter = vocoder_config.n_iter,
                       seed = vocoder_config.seed,
                       peak = vocoder_config.peak,
                       config = spectral_config)


def reconstruct(clip, spectral_config, vocoder_config):
    """Analysis-synthesis reference: the clip's own mel spectrogram passed
    through the vocoder.

    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`
    """
    return vocode(mel_spectrogram(clip, spectral_config), vocoder_config,
                  spectral_config = spectral_config)
