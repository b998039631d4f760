# -*- coding: utf-8 -*-

"""
************************
vocalfoley.toy_corpus
************************

Synthetic corpus with the directory layout of ESC-50 plus paired imitations,
small enough to exercise the whole pipeline in minutes.

Each class gets one kind of environment sound (harmonic tone, chirp or
band-passed noise burst, cycling over the classes) with a class-specific
frequency; each sample varies onset and length. The imitation of a sample is a
buzzy hum at the class frequency that follows the same onset and length, with
a small per-imitator detune.

"""
import logging
import os
from collections import OrderedDict

import numpy as np
import pandas as pd
from scipy import signal

from validator_collection import validators

from vocalfoley.audio_io import AudioClip, save_wav
from vocalfoley.dataset import imitation_path
from vocalfoley.utilities import ensure_writable

logger = logging.getLogger(__name__)

SOUND_KINDS = ('tone', 'chirp', 'burst')


def class_frequency(class_index):
    """Fundamental frequency in Hz of the ``class_index``-th toy class."""
    return 180.0 * (1.35 ** (class_index % 8))


def _envelope(n_samples, sample_rate, onset, length):
    envelope = np.zeros(n_samples)
    start = int(onset * sample_rate)
    stop = min(n_samples, start + int(length * sample_rate))
    if stop > start:
        envelope[start:stop] = np.hanning(stop - start)

    return envelope


def _timing(sample_index, seconds):
    onset = seconds * (0.1 + 0.05 * (sample_index % 4))
    length = seconds * (0.35 + 0.1 * (sample_index % 3))

    return onset, length


def environment_sound(class_index, sample_index, seconds, sample_rate, random_state):
    """Samples of one toy environment clip.

    :rtype: :class:`numpy.ndarray`
    """
    n_samples = int(round(seconds * sample_rate))
    t = np.arange(n_samples) / float(sample_rate)
    frequency = class_frequency(class_index)
    kind = SOUND_KINDS[class_index % len(SOUND_KINDS)]

    if kind == 'tone':
        samples = sum(np.sin(2.0 * np.pi * frequency * h * t) / h for h in (1, 2, 3))
    elif kind == 'chirp':
        samples = signal.chirp(t, f0 = frequency, t1 = seconds, f1 = 3.0 * frequency)
    else:
        noise = random_state.standard_normal(n_samples)
        high = min(4.0 * frequency, 0.45 * sample_rate)
        sos = signal.butter(4, [frequency, high], btype = 'bandpass', fs = sample_rate,
                            output = 'sos')
        samples = signal.sosfilt(sos, noise)

    onset, length = _timing(sample_index, seconds)
    samples = samples * _envelope(n_samples, sample_rate, onset, length)
    samples += 1e-3 * random_state.standard_normal(n_samples)

    return 0.7 * samples / max(np.max(np.abs(samples)), 1e-9)


def imitation_sound(class_index, sample_index, imitator_index, seconds, sample_rate):
    """Samples of one toy imitation: a hum following the environment clip's
    timing.

    :rtype: :class:`numpy.ndarray`
    """
    n_samples = int(round(seconds * sample_rate))
    t = np.arange(n_samples) / float(sample_rate)
    frequency = class_frequency(class_index) * (1.0 + 0.02 * (imitator_index - 2))

    samples = signal.sawtooth(2.0 * np.pi * frequency * t) * 0.5 + \
        np.sin(2.0 * np.pi * frequency * t)
    onset, length = _timing(sample_index, seconds)
    samples = samples * _envelope(n_samples, sample_rate, onset, length)

    return 0.6 * samples / max(np.max(np.abs(samples)), 1e-9)


def generate_toy_corpus(esc50_root,
                        imitation_dir,
                        class_subset,
                        imitators,
                        samples_per_class = 4,
                        seconds = 1.0,
                        environment_rate = 44100,
                        imitation_rate = 48000,
                        seed = 0,
                        csv_path = 'meta/esc50.csv',
                        audio_dir = 'audio'):
    """Write a toy corpus.

    :param esc50_root: Root of the ESC-50-shaped environment dataset.
    :param imitation_dir: Root of the imitation recordings.
    :param class_subset: Class names to generate.
    :param imitators: Imitator ids; every imitator imitates every clip.
    :param samples_per_class: Environment clips per class.

    :returns: Counts of the written environment clips and imitations.
    :rtype: :class:`dict <python:dict>`

    :raises OutputPathError: if a destination is not writable
    """
    samples_per_class = validators.integer(samples_per_class, minimum = 1)
    random_state = np.random.RandomState(seed)
    esc50_root = str(esc50_root)

    rows = []
    imitation_count = 0
    for class_index, event_class in enumerate(class_subset):
        for sample_index in range(samples_per_class):
            fold = 1 + (5 * sample_index) // samples_per_class
            filename = '%d-%06d-A-%d.wav' % (fold,
                                            class_index * 1000 + sample_index,
                                            class_index)
            samples = environment_sound(class_index, sample_index, seconds, environment_rate,
                                        random_state)
            save_wav(AudioClip(samples, environment_rate),
                     os.path.join(esc50_root, audio_dir, filename))
            rows.append(OrderedDict([('filename', filename),
                                     ('fold', fold),
                                     ('target', class_index),
                                     ('category', event_class),
                                     ('esc10', False),
                                     ('src_file', class_index * 1000 + sample_index),
                                     ('take', 'A')]))

            for imitator_index, imitator in enumerate(imitators):
                samples = imitation_sound(class_index, sample_index, imitator_index, seconds,
                                          imitation_rate)
                save_wav(AudioClip(samples, imitation_rate),
                         imitation_path(imitation_dir, event_class, sample_index, imitator))
                imitation_count += 1

    metadata = ensure_writable(os.path.join(esc50_root, csv_path))
    pd.DataFrame(rows).to_csv(metadata, index = False)

    logger.info('toy corpus: %d environment clips, %d imitations', len(rows), imitation_count)

    return {'environment_clips': len(rows), 'imitations': imitation_count}
