# -*- coding: utf-8 -*-

"""
***********************************
tests.test_metrics
***********************************

Tests for the objective measures defined in :ref:`vocalfoley.metrics`.

"""
import os

import numpy as np
import pandas as pd
import pytest

from tests.fixtures import sine, harmonic, burst, spectral_config

from vocalfoley.audio_io import AudioClip
from vocalfoley.dsp_features import mel_spectrogram
from vocalfoley.metrics import spectral_centroid, relative_centroid, effective_duration, \
    relative_duration, mel_similarity, render_spectrogram, summarize_results, \
    render_trend, read_results, EVALUATION_COLUMNS
from vocalfoley.errors import SilentAudioError, DimensionMismatchError, \
    ShapeMismatchWarning, ParameterError

HOP_SECONDS = 256 / 22050.0


@pytest.mark.parametrize('frequency', [500.0, 1000.0, 4000.0])
def test_spectral_centroid_sine(frequency):
    assert spectral_centroid(sine(frequency)) == pytest.approx(frequency, rel = 0.05)


def test_spectral_centroid_scale_invariant():
    clip = harmonic(220)
    quieter = AudioClip(clip.samples * 0.01, clip.sample_rate)

    assert spectral_centroid(quieter) == pytest.approx(spectral_centroid(clip))


def test_spectral_centroid_gate():
    samples = sine(4000).samples.copy()
    samples[:11025] = sine(500, seconds = 0.5, amplitude = 0.001).samples
    clip = AudioClip(samples, 22050)

    gated = spectral_centroid(clip)
    ungated = spectral_centroid(clip, gate_db = 200.0)

    assert gated == pytest.approx(4000.0, rel = 0.05)
    assert ungated < 0.8 * gated


def test_relative_centroid():
    assert relative_centroid(sine(2000), sine(1000)) == pytest.approx(2.0, rel = 0.05)


def test_spectral_centroid_white_noise():
    noise = AudioClip(0.5 * np.random.RandomState(3).uniform(-1, 1, 22050), 22050)

    assert spectral_centroid(noise) == pytest.approx(5512.5, rel = 0.1)


@pytest.mark.parametrize('measure', [spectral_centroid, effective_duration])
def test_empty_clip(measure):
    with pytest.raises(SilentAudioError):
        measure(AudioClip(np.zeros(0), 22050))


@pytest.mark.parametrize('length', [1, 100, 1024])
def test_short_clip(length):
    clip = AudioClip(0.5 * np.random.RandomState(0).uniform(-1, 1, length), 22050)

    assert np.isfinite(spectral_centroid(clip))
    assert 0 < effective_duration(clip) <= clip.duration


@pytest.mark.parametrize('measure', [spectral_centroid, effective_duration])
def test_silent_clip(measure):
    with pytest.raises(SilentAudioError):
        measure(AudioClip(np.zeros(22050), 22050))


@pytest.mark.parametrize('length', [0.1, 0.25, 0.5])
def test_effective_duration(length):
    clip = burst(seconds = 1.0, onset = 0.2, length = length)

    assert abs(effective_duration(clip) - length) <= 3 * HOP_SECONDS


def test_effective_duration_skips_gaps():
    first = burst(seconds = 1.0, onset = 0.1, length = 0.1)
    second = burst(seconds = 1.0, onset = 0.6, length = 0.1, seed = 1)
    clip = AudioClip(first.samples + second.samples, first.sample_rate)

    assert abs(effective_duration(clip) - 0.2) <= 4 * HOP_SECONDS


def test_effective_duration_bounded():
    clip = sine(440, seconds = 0.5)

    assert effective_duration(clip) <= clip.duration


def test_relative_duration():
    longer = burst(seconds = 1.0, onset = 0.1, length = 0.5)
    shorter = burst(seconds = 1.0, onset = 0.1, length = 0.25, seed = 1)

    assert relative_duration(longer, shorter) == pytest.approx(2.0, rel = 0.15)


def test_mel_similarity_identical(spectral_config):
    mel = mel_spectrogram(harmonic(330, seconds = 0.5), spectral_config)

    result = mel_similarity(mel, mel)

    assert result.mse == 0.0
    assert result.correlation == pytest.approx(1.0)
    assert result.per_bin.shape == (80, )


def test_mel_similarity_constant_bins():
    a = np.zeros((4, 3))
    b = np.zeros((4, 3))
    b[:, 1] = [1.0, 2.0, 3.0, 4.0]

    result = mel_similarity(a, b)

    assert result.per_bin.tolist() == [1.0, 0.0, 1.0]
    assert result.mse == pytest.approx(30.0 / 12.0)


def test_mel_similarity_truncates():
    a = np.random.RandomState(0).standard_normal((10, 4))

    with pytest.warns(ShapeMismatchWarning):
        result = mel_similarity(a, a[:6])

    assert result.mse == 0.0


def test_mel_similarity_bin_mismatch():
    with pytest.raises(DimensionMismatchError):
        mel_similarity(np.zeros((4, 3)), np.zeros((4, 5)))


def test_render_spectrogram(tmp_path, spectral_config):
    clip_path = render_spectrogram(sine(440, seconds = 0.5, sample_rate = 16000),
                                   str(tmp_path / 'figures' / 'clip.png'),
                                   config = spectral_config,
                                   title = 'sine')
    mel_path = render_spectrogram(mel_spectrogram(sine(440), spectral_config),
                                  str(tmp_path / 'mel.png'))

    for path in (clip_path, mel_path):
        with open(path, 'rb') as image:
            assert image.read(8) == b'\x89PNG\r\n\x1a\n'

    with pytest.raises(ParameterError):
        render_spectrogram(np.zeros((4, 80)), str(tmp_path / 'array.png'))


def evaluation_rows():
    rows = []
    for index, (event_class, values) in enumerate([('dog', (0.8, 1.0, 1.2)),
                                                   ('siren', (0.6, 1.0, 1.4))]):
        for step, value in zip((-6.0, 0.0, 6.0), values):
            rows.append({
                'sample_id': 'sample_%d' % index,
                'event_class': event_class,
                'control_type': 'pitch',
                'control_value': step,
                'relative_centroid': value,
                'relative_duration': 1.0,
            })

    return rows


def test_summarize_results():
    summary = summarize_results(evaluation_rows())

    overall = summary[summary['event_class'] == '*'].sort_values('control_value')
    assert overall['relative_centroid_mean'].tolist() == pytest.approx([0.7, 1.0, 1.3])
    assert overall['relative_centroid_std'].tolist() == pytest.approx([0.1, 0.0, 0.1])
    assert overall['n'].tolist() == [2, 2, 2]

    dog = summary[summary['event_class'] == 'dog']
    assert len(dog) == 3
    assert dog['relative_duration_std'].tolist() == [0.0, 0.0, 0.0]


def test_summarize_results_missing_columns():
    with pytest.raises(DimensionMismatchError):
        summarize_results(pd.DataFrame({'sample_id': ['a']}))


def test_render_trend(tmp_path):
    summary = summarize_results(evaluation_rows())

    path = render_trend(summary, 'pitch', str(tmp_path / 'trend.png'))
    assert os.path.getsize(path) > 0

    with pytest.raises(ParameterError):
        render_trend(summary, 'speed', str(tmp_path / 'speed.png'))

    with pytest.raises(ParameterError):
        render_trend(summary, 'loudness', str(tmp_path / 'loudness.png'))


def test_read_results(tmp_path):
    path = str(tmp_path / 'results.csv')
    pd.DataFrame(evaluation_rows(), columns = EVALUATION_COLUMNS).to_csv(path, index = False)

    frame = read_results(path)

    assert list(frame.columns) == EVALUATION_COLUMNS
    assert len(frame) == 6

    with pytest.raises(ParameterError):
        read_results(str(tmp_path / 'missing.csv'))
