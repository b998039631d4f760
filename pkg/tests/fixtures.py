# -*- coding: utf-8 -*-

"""
***********************************
tests.fixtures
***********************************

Fixtures used by the vocalfoley test suite.

"""
import os

import numpy as np
import pytest
import torch

from validator_collection import checkers

from vocalfoley.audio_io import AudioClip
from vocalfoley.config import SpectralConfig, DecoderConfig, FusionConfig, TrainConfig, \
    PipelineConfig
from vocalfoley.decoder import DecoderModel, TrainingExample
from vocalfoley.dsp_features import MelStats
from vocalfoley.labels import LabelSet
from vocalfoley.toy_corpus import generate_toy_corpus

TOY_CLASSES = ['dog', 'rooster', 'siren']
TOY_TRAIN_IMITATORS = ['f1', 'f2']
TOY_EVAL_IMITATORS = ['m1']
TOY_PER_CLASS_TRAIN = 2
TOY_PER_CLASS_EVAL = 1

TINY_K = 5
TINY_MEL_DIM = 8
TINY_FRAMES = 6


class State(object):
    """Class to hold incremental test state."""
    # pylint: disable=too-few-public-methods
    pass


def sine(frequency, seconds = 1.0, sample_rate = 22050, amplitude = 0.5):
    t = np.arange(int(round(seconds * sample_rate))) / float(sample_rate)

    return AudioClip(amplitude * np.sin(2.0 * np.pi * frequency * t), sample_rate)


def harmonic(frequency, seconds = 1.0, sample_rate = 22050, partials = 4, amplitude = 0.5):
    t = np.arange(int(round(seconds * sample_rate))) / float(sample_rate)
    samples = sum(np.sin(2.0 * np.pi * frequency * (n + 1) * t) / (n + 1)
                  for n in range(partials))

    return AudioClip(amplitude * samples / np.max(np.abs(samples)), sample_rate)


def burst(seconds = 1.0, sample_rate = 22050, onset = 0.25, length = 0.25, seed = 0):
    """White noise inside ``[onset, onset + length)`` seconds, silence elsewhere."""
    samples = np.zeros(int(round(seconds * sample_rate)))
    start = int(onset * sample_rate)
    stop = start + int(length * sample_rate)
    random_state = np.random.RandomState(seed)
    samples[start:stop] = 0.5 * random_state.uniform(-1, 1, stop - start)

    return AudioClip(samples, sample_rate)


def tiny_decoder_config(**kwargs):
    values = {
        'prenet_dim': 8,
        'prenet_dropout': 0.0,
        'lstm_units': 16,
        'lstm_dropout': 0.0,
        'attention_dim': 8,
        'attention_filters': 4,
        'attention_kernel_size': 5,
        'mel_dim': TINY_MEL_DIM,
        'max_frames': 24,
        'postnet_layers': 2,
        'postnet_channels': 8,
        'postnet_kernel_size': 3,
        'postnet_dropout': 0.0,
    }
    values.update(kwargs)

    return DecoderConfig(**values)


def tiny_fusion_config(**kwargs):
    values = {
        'embedding_dim': 6,
        'fused_dim': 12,
        'num_classes': len(TOY_CLASSES),
    }
    values.update(kwargs)

    return FusionConfig(**values)


def build_tiny_model(seed = 0, centroids = None, fusion_kwargs = None, **decoder_kwargs):
    torch.manual_seed(seed)
    fusion_config = tiny_fusion_config(mode = 'centroid' if centroids is not None
                                       else 'embedding',
                                       **(fusion_kwargs or {}))
    model = DecoderModel(tiny_decoder_config(**decoder_kwargs),
                         fusion_config,
                         TINY_K,
                         centroids = centroids)
    model.spectral_config = SpectralConfig(n_mels = TINY_MEL_DIM)
    model.norm_stats = MelStats(np.zeros(TINY_MEL_DIM), np.ones(TINY_MEL_DIM))
    model.labels = LabelSet(TOY_CLASSES)
    model.codebook_hash = '0' * 64

    return model


def build_tiny_examples(count = 4, frames = TINY_FRAMES, seed = 0):
    random_state = np.random.RandomState(seed)

    return [TrainingExample(random_state.randint(0, TINY_K, size = frames),
                            index % len(TOY_CLASSES),
                            random_state.standard_normal((frames, TINY_MEL_DIM)))
            for index in range(count)]


def toy_overrides(corpus_root, workdir):
    return [
        'paths.workdir=%s' % workdir,
        'paths.esc50_root=%s' % os.path.join(corpus_root, 'esc50'),
        'paths.imitation_dir=%s' % os.path.join(corpus_root, 'imitations'),
        'dataset.class_subset=[%s]' % ', '.join(TOY_CLASSES),
        'dataset.train_imitators=[%s]' % ', '.join(TOY_TRAIN_IMITATORS),
        'dataset.eval_imitators=[%s]' % ', '.join(TOY_EVAL_IMITATORS),
        'dataset.per_class_train=%d' % TOY_PER_CLASS_TRAIN,
        'dataset.per_class_eval=%d' % TOY_PER_CLASS_EVAL,
        'fusion.num_classes=%d' % len(TOY_CLASSES),
        'train.num_workers=1',
        'train.batch_size=4',
        'train.max_steps=4',
        'train.checkpoint_every=2',
        'train.log_every=1',
        'vocoder.n_iter=4',
        'evaluation.spectrogram_samples=1',
    ]


def check_input_file(input_directory, input_value):
    inputs = os.path.abspath(input_directory)
    if not os.path.exists(input_directory):
        raise AssertionError('input directory (%s) does not exist' % inputs)
    elif not os.path.isdir(input_directory):
        raise AssertionError('input directory (%s) is not a directory' % inputs)

    try:
        input_file = os.path.join(input_directory, input_value)
    except (TypeError, AttributeError):
        input_file = None

    if input_file is not None and checkers.is_file(input_file):
        input_value = input_file

    return input_value


@pytest.fixture(scope = 'session')
def state(request):
    """Return the :class:`State` object that holds incremental test state."""
    return State()


@pytest.fixture
def input_files(request):
    """Return the ``--inputs`` command-line option."""
    return request.config.getoption("--inputs")


@pytest.fixture
def spectral_config(request):
    return SpectralConfig()


@pytest.fixture
def short_spectral_config(request):
    """Front end of the toy preset: one-second clips, 87 frames."""
    return SpectralConfig(clip_seconds = 1.0)


@pytest.fixture
def tiny_model(request):
    return build_tiny_model()


@pytest.fixture
def tiny_examples(request):
    return build_tiny_examples()


@pytest.fixture
def tiny_train_config(request):
    return TrainConfig(learning_rate = 1e-3,
                       batch_size = 2,
                       max_steps = 4,
                       checkpoint_every = 2,
                       log_every = 1,
                       num_workers = 1)


@pytest.fixture(scope = 'session')
def toy_corpus(tmpdir_factory):
    """Directory holding ``esc50/`` and ``imitations/`` of a three-class toy
    corpus with one-second clips."""
    root = str(tmpdir_factory.mktemp('toy_corpus'))
    generate_toy_corpus(os.path.join(root, 'esc50'),
                        os.path.join(root, 'imitations'),
                        TOY_CLASSES,
                        TOY_TRAIN_IMITATORS + TOY_EVAL_IMITATORS,
                        samples_per_class = TOY_PER_CLASS_TRAIN + TOY_PER_CLASS_EVAL,
                        seconds = 1.0,
                        seed = 0)

    return root


@pytest.fixture
def toy_config(toy_corpus, tmp_path):
    """Toy-preset :class:`PipelineConfig` reading ``toy_corpus`` and writing to
    a fresh work directory."""
    return PipelineConfig.load(toy = True,
                               overrides = toy_overrides(toy_corpus, str(tmp_path / 'work')))
