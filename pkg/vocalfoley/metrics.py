# -*- coding: utf-8 -*-

"""
************************
vocalfoley.metrics
************************

Objective measures of synthesized sounds.

* :func:`spectral_centroid` averages the per-frame magnitude-weighted mean
  frequency over frames whose energy lies within ``gate_db`` (40 dB) of the
  loudest frame.
* :func:`effective_duration` counts RMS frames within ``gate_db`` (35 dB) of the
  loudest frame and multiplies by the hop duration.

Both gates are relative to the clip's own peak, so scaling a clip does not
change either measure. Their relative forms divide a test clip's value by a
reference clip's value.

"""
import logging
import warnings
from collections import namedtuple

import numpy as np
import pandas as pd
import librosa

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from validator_collection import checkers

from vocalfoley.audio_io import AudioClip, resample
from vocalfoley.config import SpectralConfig
from vocalfoley.dsp_features import MelSpectrogram, mel_spectrogram
from vocalfoley.errors import SilentAudioError, DimensionMismatchError, ShapeMismatchWarning, \
    ParameterError, OutputPathError
from vocalfoley.utilities import ensure_writable

logger = logging.getLogger(__name__)

EVALUATION_COLUMNS = ['sample_id', 'event_class', 'control_type', 'control_value',
                      'relative_centroid', 'relative_duration']
SUMMARY_GROUP = ['event_class', 'control_type', 'control_value']
ALL_CLASSES = '*'

TREND_METRICS = {
    'pitch': ('relative_centroid', 'Relative spectral centroid'),
    'speed': ('relative_duration', 'Relative duration'),
}

MelSimilarity = namedtuple('MelSimilarity', ['mse', 'correlation', 'per_bin'])


def _analysis_samples(clip, window):
    """Clip samples zero-padded to at least one analysis ``window``.

    :raises SilentAudioError: if the clip is empty
    """
    if len(clip.samples) == 0:
        raise SilentAudioError('the clip is empty')

    return librosa.util.fix_length(np.asarray(clip.samples, dtype = np.float64),
                                   size = max(len(clip.samples), window))


def spectral_centroid(clip, gate_db = 40.0, n_fft = 1024, hop_length = 256):
    """Mean spectral centroid in Hz over the frames that pass the energy gate.

    The analysis always uses a Hann window, independent of the front end's
    window, so centroids stay comparable across spectral configurations.

    :param clip: The clip.
    :type clip: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

    :param gate_db: Frames quieter than the loudest frame by more than this are
      ignored.
    :type gate_db: numeric

    :rtype: :class:`float <python:float>`

    :raises SilentAudioError: if the clip is empty or every frame is gated
      (the clip is silent)
    """
    samples = _analysis_samples(clip, n_fft)
    magnitude = np.abs(librosa.stft(samples,
                                    n_fft = n_fft,
                                    hop_length = hop_length,
                                    window = 'hann',
                                    center = True))
    frequencies = librosa.fft_frequencies(sr = clip.sample_rate, n_fft = n_fft)

    energy = np.sum(magnitude ** 2, axis = 0)
    peak = energy.max() if energy.size else 0.0
    if peak <= 0:
        raise SilentAudioError('all frames gated: the clip is silent')

    keep = (energy > 0) & (energy >= peak * 10.0 ** (-gate_db / 10.0))
    frames = magnitude[:, keep]
    centroids = (frequencies @ frames) / frames.sum(axis = 0)

    return float(np.mean(centroids))


def relative_centroid(test, reference, gate_db = 40.0):
    """``spectral_centroid(test) / spectral_centroid(reference)``.

    :raises SilentAudioError: if either clip is silent
    """
    return spectral_centroid(test, gate_db = gate_db) / \
        spectral_centroid(reference, gate_db = gate_db)


def effective_duration(clip, gate_db = 35.0, hop_length = 256):
    """Duration in seconds of the energy-active part of ``clip``.

    RMS is computed over non-overlapping ``hop_length`` frames; the result is
    the number of frames within ``gate_db`` of the loudest one times
    ``hop_length / sample_rate``.

    :rtype: :class:`float <python:float>`

    :raises SilentAudioError: if the clip is empty or silent
    """
    rms = librosa.feature.rms(y = _analysis_samples(clip, hop_length),
                              frame_length = hop_length,
                              hop_length = hop_length,
                              center = True,
                              pad_mode = 'constant')[0]
    peak = rms.max() if rms.size else 0.0
    if peak <= 0:
        raise SilentAudioError('all frames gated: the clip is silent')

    active = np.count_nonzero(rms >= peak * 10.0 ** (-gate_db / 20.0))
    duration = active * hop_length / float(clip.sample_rate)

    return min(duration, clip.duration)


def relative_duration(test, reference, gate_db = 35.0):
    """``effective_duration(test) / effective_duration(reference)``.

    :raises SilentAudioError: if either clip is silent
    """
    return effective_duration(test, gate_db = gate_db) / \
        effective_duration(reference, gate_db = gate_db)


def _bin_correlation(a, b):
    a = a - a.mean(axis = 0)
    b = b - b.mean(axis = 0)
    norm_a = np.sqrt(np.sum(a ** 2, axis = 0))
    norm_b = np.sqrt(np.sum(b ** 2, axis = 0))

    correlation = np.zeros(a.shape[1])
    both = (norm_a > 0) & (norm_b > 0)
    correlation[both] = np.sum(a[:, both] * b[:, both], axis = 0) / (norm_a[both] * norm_b[both])
    correlation[(norm_a == 0) & (norm_b == 0)] = 1.0

    return correlation


def mel_similarity(a, b):
    """Mean squared error and per-bin Pearson correlation over time.

    Spectrograms with different frame counts are truncated to the shorter one
    with a :class:`ShapeMismatchWarning <vocalfoley.errors.ShapeMismatchWarning>`.
    A bin that is constant in both inputs counts as perfectly correlated; a
    bin constant in only one counts as uncorrelated.

    :returns: ``mse``, the mean of the per-bin correlations and the per-bin
      correlations.
    :rtype: :class:`MelSimilarity`

    :raises DimensionMismatchError: if the bin counts differ
    """
    a = np.asarray(getattr(a, 'values', a), dtype = np.float64)
    b = np.asarray(getattr(b, 'values', b), dtype = np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionMismatchError('cannot compare shapes %s and %s' % (a.shape, b.shape))

    if a.shape[0] != b.shape[0]:
        frames = min(a.shape[0], b.shape[0])
        warnings.warn('comparing %d and %d frames; truncating to %d' % (a.shape[0],
                                                                      b.shape[0],
                                                                      frames),
                      ShapeMismatchWarning)
        a = a[:frames]
        b = b[:frames]

    per_bin = _bin_correlation(a, b)

    return MelSimilarity(float(np.mean((a - b) ** 2)), float(np.mean(per_bin)), per_bin)


def render_spectrogram(source, path, config = None, title = None):
    """Write a PNG of a log-mel spectrogram: frames on the x-axis, mel bands on
    the y-axis. The figure width grows with the number of frames.

    :param source: A clip (analysed with ``config``) or a spectrogram.
    :type source: :class:`AudioClip <vocalfoley.audio_io.AudioClip>` /
      :class:`MelSpectrogram <vocalfoley.dsp_features.MelSpectrogram>`

    :returns: ``path``
    :rtype: :class:`str <python:str>`

    :raises OutputPathError: if ``path`` is not writable
    """
    config = config or getattr(source, 'config', None) or SpectralConfig()
    if isinstance(source, AudioClip):
        if source.sample_rate != config.sample_rate:
            source = resample(source, config.sample_rate)
        source = mel_spectrogram(source, config)
    if not isinstance(source, MelSpectrogram):
        raise ParameterError('source must be an AudioClip or a MelSpectrogram')

    path = ensure_writable(path)
    values = source.values

    figure, axes = plt.subplots(figsize = (2.0 + values.shape[0] / 60.0, 3.5))
    try:
        image = axes.imshow(values.T,
                            origin = 'lower',
                            aspect = 'auto',
                            interpolation = 'nearest',
                            cmap = 'magma')
        axes.set_xlabel('Frame (hop %d samples)' % config.hop_length)
        axes.set_ylabel('Mel band')
        if title:
            axes.set_title(title)
        colorbar = figure.colorbar(image, ax = axes)
        colorbar.set_label('log magnitude')
        figure.savefig(path, dpi = 100, bbox_inches = 'tight')
    except (OSError, RuntimeError) as error:
        raise OutputPathError('cannot write %s: %s' % (path, error))
    finally:
        plt.close(figure)

    return path


def summarize_results(rows):
    """Aggregate evaluation rows into per-class and overall mean / standard
    deviation of both relative metrics.

    Overall rows use ``*`` as ``event_class``.

    :param rows: Evaluation rows with the :data:`EVALUATION_COLUMNS`.
    :type rows: :class:`pandas.DataFrame` / iterable of
      :class:`dict <python:dict>`

    :rtype: :class:`pandas.DataFrame`
    """
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows),
                                                                      columns = EVALUATION_COLUMNS)
    missing = [x for x in EVALUATION_COLUMNS if x not in frame.columns]
    if missing:
        raise DimensionMismatchError('evaluation rows lack columns: %s' % ', '.join(missing))

    overall = frame.assign(event_class = ALL_CLASSES)
    combined = pd.concat([frame, overall], ignore_index = True)

    summary = combined.groupby(SUMMARY_GROUP, sort = True).agg(
        n = ('sample_id', 'count'),
        relative_centroid_mean = ('relative_centroid', 'mean'),
        relative_centroid_std = ('relative_centroid', lambda x: float(np.std(x))),
        relative_duration_mean = ('relative_duration', 'mean'),
        relative_duration_std = ('relative_duration', lambda x: float(np.std(x))),
    )

    return summary.reset_index()


def render_trend(summary, control_type, path):
    """Plot the mean relative metric of a control sweep against the control
    value: relative centroid for ``pitch``, relative duration for ``speed``.

    The overall mean is drawn with standard-deviation error bars, each event
    class as a thin line.

    :returns: ``path``
    :rtype: :class:`str <python:str>`

    :raises ParameterError: if ``control_type`` is unknown or ``summary`` holds
      no rows for it
    """
    if control_type not in TREND_METRICS:
        raise ParameterError('control_type must be one of %s, received %r' % (
            ', '.join(sorted(TREND_METRICS)), control_type))

    metric, label = TREND_METRICS[control_type]
    rows = summary[summary['control_type'] == control_type]
    if rows.empty:
        raise ParameterError('summary holds no %s rows' % control_type)

    path = ensure_writable(path)
    figure, axes = plt.subplots(figsize = (5.0, 3.5))
    try:
        for event_class, group in rows.groupby('event_class'):
            group = group.sort_values('control_value')
            if event_class == ALL_CLASSES:
                axes.errorbar(group['control_value'],
                              group['%s_mean' % metric],
                              yerr = group['%s_std' % metric],
                              color = 'black',
                              marker = 'o',
                              capsize = 3,
                              label = 'all classes')
            else:
                axes.plot(group['control_value'],
                          group['%s_mean' % metric],
                          linewidth = 0.8,
                          alpha = 0.5)

        axes.axhline(1.0, color = 'grey', linestyle = ':', linewidth = 0.8)
        axes.set_xlabel('Pitch shift' if control_type == 'pitch' else 'Speed ratio')
        axes.set_ylabel(label)
        axes.legend(loc = 'best')
        figure.savefig(path, dpi = 100, bbox_inches = 'tight')
    except (OSError, RuntimeError) as error:
        raise OutputPathError('cannot write %s: %s' % (path, error))
    finally:
        plt.close(figure)

    return path


def read_results(path):
    """Read an evaluation CSV written by the ``evaluate`` command.

    :rtype: :class:`pandas.DataFrame`

    :raises ParameterError: if ``path`` does not exist
    """
    if not checkers.is_file(str(path)):
        raise ParameterError('evaluation results not found: %s' % path)

    return pd.read_csv(str(path))
