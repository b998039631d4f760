# -*- coding: utf-8 -*-

"""
***********************************
tests.test_audio_io
***********************************

Tests for the waveform helpers defined in :ref:`vocalfoley.audio_io`.

"""

import numpy as np
import pytest
import soundfile as sf

from tests.fixtures import sine

from vocalfoley.audio_io import AudioClip, load_wav, save_wav, resample, fix_length, \
    normalize_peak, quantize_pcm16
from vocalfoley.errors import AudioFileNotFoundError, AudioFormatError, EmptyAudioError, \
    ParameterError


@pytest.mark.parametrize('samples, sample_rate, fails', [
    ([0.0, 0.5, -0.5], 22050, False),
    (np.zeros(10), 48000, False),
    ([], 22050, False),
    (np.zeros((2, 10)), 22050, True),
    ([0.0, np.nan], 22050, True),
    ([0.0, np.inf], 22050, True),
    ([0.0, 0.1], 0, True),
    ([0.0, 0.1], 'not-a-rate', True),
])
def test_AudioClip(samples, sample_rate, fails):
    if not fails:
        clip = AudioClip(samples, sample_rate)
        assert clip.samples.dtype == np.float64
        assert len(clip) == len(samples)
        assert clip.sample_rate == sample_rate
    else:
        with pytest.raises(ValueError):
            clip = AudioClip(samples, sample_rate)


def test_AudioClip_duration():
    clip = sine(440, seconds = 2.0, sample_rate = 22050)

    assert clip.duration == pytest.approx(2.0)
    assert clip.peak == pytest.approx(0.5, abs = 1e-3)


@pytest.mark.parametrize('value, expected_result', [
    (1.0, 32767),
    (-1.0, -32768),
    (0.5, 16384),
    (2.0, 32767),
    (-3.0, -32768),
    (0.0, 0),
])
def test_quantize_pcm16(value, expected_result):
    result = quantize_pcm16(np.array([value]))

    assert result.dtype == np.int16
    assert result[0] == expected_result


def test_save_wav_load_wav(tmp_path):
    clip = sine(440, seconds = 0.5, sample_rate = 48000, amplitude = 0.8)
    path = save_wav(clip, str(tmp_path / 'nested' / 'clip.wav'))

    info = sf.info(path)
    assert info.subtype == 'PCM_16'
    assert info.channels == 1

    loaded = load_wav(path)
    assert loaded.sample_rate == 48000
    assert len(loaded) == len(clip)
    assert np.max(np.abs(loaded.samples - clip.samples)) <= 2.0 ** -15


def test_save_wav_clamps_full_scale(tmp_path):
    clip = AudioClip([1.0, -1.0, 0.0], 22050)
    path = save_wav(clip, str(tmp_path / 'full_scale.wav'))

    stored, _ = sf.read(path, dtype = 'int16')
    assert stored.tolist() == [32767, -32768, 0]


def test_save_wav_bit_depth(tmp_path):
    with pytest.raises(ParameterError):
        save_wav(AudioClip([0.0], 22050), str(tmp_path / 'x.wav'), bit_depth = 24)


def test_load_wav_downmixes_stereo(tmp_path):
    path = str(tmp_path / 'stereo.wav')
    left = np.full(100, 0.5)
    right = np.full(100, -0.25)
    sf.write(path, np.stack([left, right], axis = 1), 22050, subtype = 'PCM_16')

    clip = load_wav(path)
    assert len(clip) == 100
    assert np.allclose(clip.samples, 0.125, atol = 1e-4)


@pytest.mark.parametrize('subtype, format_, fails', [
    ('PCM_16', 'WAV', False),
    ('FLOAT', 'WAV', False),
    ('PCM_24', 'WAV', True),
    ('PCM_16', 'FLAC', True),
])
def test_load_wav_formats(tmp_path, subtype, format_, fails):
    path = str(tmp_path / 'clip.wav')
    sf.write(path, np.zeros(64), 16000, subtype = subtype, format = format_)

    if not fails:
        clip = load_wav(path)
        assert clip.sample_rate == 16000
    else:
        with pytest.raises(AudioFormatError):
            clip = load_wav(path)


def test_load_wav_missing(tmp_path):
    with pytest.raises(AudioFileNotFoundError):
        load_wav(str(tmp_path / 'missing.wav'))

    with pytest.raises(FileNotFoundError):
        load_wav(str(tmp_path / 'missing.wav'))


def test_load_wav_empty(tmp_path):
    path = str(tmp_path / 'empty.wav')
    sf.write(path, np.zeros(0), 22050, subtype = 'PCM_16')

    with pytest.raises(EmptyAudioError):
        load_wav(path)


@pytest.mark.parametrize('source_rate, length, target_rate, expected_length', [
    (48000, 240000, 22050, 110250),
    (22050, 22050, 22050, 22050),
    (44100, 44100, 22050, 22050),
    (16000, 16000, 22050, 22050),
])
def test_resample(source_rate, length, target_rate, expected_length):
    clip = AudioClip(np.zeros(length), source_rate)
    result = resample(clip, target_rate)

    assert result.sample_rate == target_rate
    assert abs(len(result) - expected_length) <= 1


def test_resample_keeps_frequency():
    clip = sine(1000, seconds = 1.0, sample_rate = 48000)
    result = resample(clip, 22050)

    spectrum = np.abs(np.fft.rfft(result.samples))
    frequencies = np.fft.rfftfreq(len(result), 1.0 / 22050)
    assert frequencies[np.argmax(spectrum)] == pytest.approx(1000, abs = 2)


@pytest.mark.parametrize('source_rate, target_rate', [
    (48000, 22050),
    (22050, 16000),
    (44100, 22050),
    (16000, 48000),
])
def test_resample_round_trip_length(source_rate, target_rate):
    clip = AudioClip(sine(440, seconds = 1.3, sample_rate = source_rate).samples, source_rate)

    restored = resample(resample(clip, target_rate), source_rate)

    assert restored.sample_rate == source_rate
    assert abs(len(restored) - len(clip)) <= 2


@pytest.mark.parametrize('target_rate', [0, -1, 'fast'])
def test_resample_invalid(target_rate):
    with pytest.raises(ParameterError):
        resample(AudioClip(np.zeros(10), 22050), target_rate)


def test_fix_length_pads_at_end():
    clip = AudioClip(np.ones(4 * 22050), 22050)
    result = fix_length(clip, 5.0)

    assert len(result) == 5 * 22050
    assert np.all(result.samples[:4 * 22050] == 1.0)
    assert np.all(result.samples[4 * 22050:] == 0.0)


def test_fix_length_truncates_at_end():
    samples = np.arange(6 * 22050, dtype = np.float64) / (6 * 22050)
    result = fix_length(AudioClip(samples, 22050), 5.0)

    assert len(result) == 5 * 22050
    assert np.array_equal(result.samples, samples[:5 * 22050])


@pytest.mark.parametrize('length, seconds', [
    (4 * 22050, 5.0),
    (6 * 22050, 5.0),
    (22050, 1.0),
    (1000, 0.5),
])
def test_fix_length_idempotent(length, seconds):
    clip = AudioClip(np.random.RandomState(0).uniform(-1, 1, length), 22050)

    once = fix_length(clip, seconds)
    twice = fix_length(once, seconds)

    assert len(twice) == len(once) == int(round(seconds * 22050))
    assert np.array_equal(twice.samples, once.samples)


@pytest.mark.parametrize('seconds, fails', [
    (1.0, False),
    (0.0, True),
    (-1.0, True),
])
def test_fix_length_seconds(seconds, fails):
    clip = AudioClip(np.zeros(100), 100)
    if not fails:
        result = fix_length(clip, seconds)
        assert len(result) == int(seconds * 100)
    else:
        with pytest.raises(ValueError):
            result = fix_length(clip, seconds)


def test_normalize_peak():
    clip = sine(440, amplitude = 0.1)
    result = normalize_peak(clip, peak = 0.95)

    assert result.peak == pytest.approx(0.95)

    silent = normalize_peak(AudioClip(np.zeros(10), 22050))
    assert silent.peak == 0.0
