# -*- coding: utf-8 -*-

"""
***********************************
tests.test_vocoder
***********************************

Tests for mel-to-waveform conversion defined in :ref:`vocalfoley.vocoder`.

"""
import sys

import numpy as np
import pytest

from tests.fixtures import sine, harmonic, burst, spectral_config, short_spectral_config

from vocalfoley.audio_io import AudioClip, load_wav, save_wav
from vocalfoley.config import SpectralConfig, VocoderConfig
from vocalfoley.dsp_features import MelSpectrogram, mel_spectrogram, stft_magnitude
from vocalfoley.vocoder import ExternalVocoder, griffin_lim, mel_to_linear, \
    phase_reconstruction, output_length, vocode, reconstruct
from vocalfoley.metrics import mel_similarity
from vocalfoley.errors import ConfigurationError, DimensionMismatchError, ParameterError, \
    VocoderAdapterError

ADAPTER_SCRIPT = '''
import os
import sys

import numpy as np
import soundfile as sf

mel_in, wav_out, rate, channels, mode = sys.argv[1:6]
assert os.path.getsize(mel_in) > 56
if mode == 'fail':
    sys.stderr.write('adapter failure')
    sys.exit(3)
if mode == 'write':
    t = np.arange(int(rate)) / float(rate)
    tone = 0.5 * np.sin(2 * np.pi * 440 * t)
    if int(channels) > 1:
        tone = np.stack([tone] * int(channels), axis = 1)
    sf.write(wav_out, tone, int(rate), subtype = 'PCM_16')
'''

COPY_SCRIPT = '''
import shutil
import sys

shutil.copyfile(sys.argv[2], sys.argv[3])
'''


@pytest.fixture
def adapter_command(tmp_path):
    script = tmp_path / 'adapter.py'
    script.write_text(ADAPTER_SCRIPT)

    def build(rate = 22050, channels = 1, mode = 'write'):
        return '"%s" "%s" {mel_in} {wav_out} %d %d %s' % (sys.executable, script, rate,
                                                           channels, mode)

    return build


def silent_mel(config, frames):
    return MelSpectrogram(np.full((frames, config.n_mels), np.log(config.log_floor)),
                          config = config)


def test_griffin_lim_silence(spectral_config):
    clip = griffin_lim(silent_mel(spectral_config, 431), n_iter = 4)

    assert len(clip) == 110080
    assert clip.sample_rate == 22050
    assert np.all(clip.samples == 0)


def test_griffin_lim_sine(short_spectral_config):
    mel = mel_spectrogram(sine(440, seconds = 1.0), short_spectral_config)

    clip = griffin_lim(mel, n_iter = 32, seed = 0, peak = 0.8)

    assert len(clip) == (87 - 1) * 256
    assert clip.peak == pytest.approx(0.8)
    spectrum = np.abs(np.fft.rfft(clip.samples))
    frequencies = np.fft.rfftfreq(len(clip), 1.0 / 22050)
    assert abs(frequencies[np.argmax(spectrum)] - 440) < 0.15 * 440


def test_griffin_lim_deterministic(short_spectral_config):
    mel = mel_spectrogram(sine(330, seconds = 1.0), short_spectral_config)

    first = griffin_lim(mel, n_iter = 8, seed = 5)
    second = griffin_lim(mel, n_iter = 8, seed = 5)

    assert np.array_equal(first.samples, second.samples)


def test_phase_reconstruction_errors(short_spectral_config):
    magnitude = stft_magnitude(sine(440, seconds = 1.0), short_spectral_config)

    samples, errors = phase_reconstruction(magnitude, short_spectral_config, n_iter = 20)

    assert len(errors) == 20
    assert len(samples) == (magnitude.shape[0] - 1) * 256
    assert errors[-1] < errors[0]
    assert errors[-1] < 0.5


@pytest.mark.parametrize('n_iter', [0, -3, 'many'])
def test_phase_reconstruction_n_iter(short_spectral_config, n_iter):
    with pytest.raises(ParameterError):
        phase_reconstruction(np.ones((4, 513)), short_spectral_config, n_iter = n_iter)


def test_mel_to_linear(short_spectral_config):
    mel = mel_spectrogram(sine(440, seconds = 1.0), short_spectral_config)

    magnitude = mel_to_linear(mel)

    assert magnitude.shape == (87, 513)
    assert np.all(magnitude >= 0)
    assert not np.any(mel_to_linear(silent_mel(short_spectral_config, 3)))


def test_vocoder_rejects_invalid_mel(spectral_config):
    normalized = MelSpectrogram(np.zeros((3, 80)), config = spectral_config, normalized = True)
    with pytest.raises(ParameterError):
        griffin_lim(normalized)

    narrow = MelSpectrogram(np.zeros((3, 40)), config = SpectralConfig(n_mels = 40))
    with pytest.raises(DimensionMismatchError):
        griffin_lim(narrow, config = spectral_config)


def test_reconstruct(short_spectral_config):
    clip = reconstruct(sine(440, seconds = 1.0), short_spectral_config,
                       VocoderConfig(n_iter = 4))

    assert len(clip) == 86 * 256


@pytest.mark.parametrize('command', [
    None,
    '',
    'vocoder --in {mel_in}',
    'vocoder --out {wav_out}',
])
def test_ExternalVocoder_configuration(command):
    with pytest.raises(ConfigurationError):
        ExternalVocoder(command)


def test_ExternalVocoder(short_spectral_config, adapter_command):
    adapter = ExternalVocoder(adapter_command(), spectral_config = short_spectral_config)

    clip = adapter(silent_mel(short_spectral_config, 10))

    assert clip.sample_rate == 22050
    assert len(clip) == 22050


@pytest.mark.parametrize('options', [
    {'rate': 16000},
    {'channels': 2},
    {'mode': 'fail'},
    {'mode': 'skip'},
])
def test_ExternalVocoder_failures(short_spectral_config, adapter_command, options):
    adapter = ExternalVocoder(adapter_command(**options), spectral_config = short_spectral_config)

    with pytest.raises(VocoderAdapterError):
        adapter(silent_mel(short_spectral_config, 10))


def test_ExternalVocoder_missing_program(short_spectral_config):
    adapter = ExternalVocoder('/nonexistent/vocoder {mel_in} {wav_out}',
                              spectral_config = short_spectral_config)

    with pytest.raises(VocoderAdapterError):
        adapter(silent_mel(short_spectral_config, 10))


def test_vocode_dispatch(short_spectral_config, adapter_command, monkeypatch):
    monkeypatch.delenv('VOCALFOLEY_VOCODER_COMMAND', raising = False)
    mel = silent_mel(short_spectral_config, 10)

    assert len(vocode(mel, VocoderConfig(n_iter = 2))) == 9 * 256

    with pytest.raises(ConfigurationError):
        vocode(mel, VocoderConfig(kind = 'external'))

    monkeypatch.setenv('VOCALFOLEY_VOCODER_COMMAND', adapter_command())
    assert len(vocode(mel, VocoderConfig(kind = 'external'))) == 22050


def noise_fixtures(sample_rate = 22050):
    """Gated white noise: every mel band follows the same on/off envelope."""
    t = np.arange(sample_rate) / float(sample_rate)
    swell = 0.5 * np.random.RandomState(4).uniform(-1, 1, sample_rate) * np.hanning(sample_rate)
    pair = burst(onset = 0.1, length = 0.2, seed = 5).samples + \
        burst(onset = 0.6, length = 0.2, seed = 6).samples
    pulsed = 0.5 * np.random.RandomState(7).uniform(-1, 1, sample_rate) * \
        (np.sin(2 * np.pi * 3 * t) > 0.3)

    return [burst(onset = 0.1, length = 0.3, seed = 1),
            burst(onset = 0.4, length = 0.4, seed = 2),
            AudioClip(swell, sample_rate),
            AudioClip(pair, sample_rate),
            AudioClip(pulsed, sample_rate)]


@pytest.mark.parametrize('frames, expected_length', [
    (1, 1024),
    (2, 1024),
    (3, 1024),
    (5, 1024),
    (6, 1280),
    (87, 22016),
])
def test_griffin_lim_short_mel(short_spectral_config, frames, expected_length):
    mel = mel_spectrogram(sine(440, seconds = 1.0), short_spectral_config)
    start = 40 if frames < 40 else 0
    short = MelSpectrogram(mel.values[start:start + frames], config = short_spectral_config)

    clip = griffin_lim(short, n_iter = 4)

    assert output_length(frames, short_spectral_config) == expected_length
    assert len(clip) == expected_length
    assert np.all(np.isfinite(clip.samples))
    assert clip.peak == pytest.approx(0.95)


@pytest.mark.parametrize('shape', [(4, 100), (0, 513), (513, )])
def test_phase_reconstruction_shape_error(short_spectral_config, shape):
    with pytest.raises(ParameterError):
        phase_reconstruction(np.ones(shape), short_spectral_config)


@pytest.mark.parametrize('clip', [
    sine(440),
    harmonic(220),
    burst(),
])
def test_phase_reconstruction_error_non_increasing(short_spectral_config, clip):
    magnitude = stft_magnitude(clip, short_spectral_config)

    samples, errors = phase_reconstruction(magnitude, short_spectral_config, n_iter = 30)

    assert len(samples) == 86 * 256
    for previous, current in zip(errors, errors[1:]):
        assert current <= previous + 1e-9


def test_mel_to_linear_sine_peak(short_spectral_config):
    mel = mel_spectrogram(sine(440, seconds = 1.0), short_spectral_config)

    magnitude = mel_to_linear(mel)

    assert abs(int(np.argmax(magnitude.sum(axis = 0))) - 20) <= 2


def test_external_vocoder_identity(tmp_path, short_spectral_config):
    script = tmp_path / 'copy.py'
    script.write_text(COPY_SCRIPT)
    fixed = str(tmp_path / 'fixed.wav')
    save_wav(sine(330, seconds = 0.5), fixed)
    command = '"%s" "%s" {mel_in} "%s" {wav_out}' % (sys.executable, script, fixed)

    clip = vocode(silent_mel(short_spectral_config, 10),
                  VocoderConfig(kind = 'external', command = command),
                  spectral_config = short_spectral_config)

    expected = load_wav(fixed)
    assert clip.sample_rate == expected.sample_rate
    assert np.array_equal(clip.samples, expected.samples)


@pytest.mark.slow
@pytest.mark.parametrize('index', range(5))
def test_griffin_lim_round_trip(short_spectral_config, index):
    clip = noise_fixtures()[index]
    mel = mel_spectrogram(clip, short_spectral_config)

    rebuilt = mel_spectrogram(griffin_lim(mel, n_iter = 60), short_spectral_config)

    assert rebuilt.frames == mel.frames
    assert mel_similarity(rebuilt, mel).correlation >= 0.9
