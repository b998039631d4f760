# -*- coding: utf-8 -*-
"""Environmental sound synthesis from vocal imitations and event labels.

While this entry point to the library exposes the main classes and functions
for convenience, those items themselves are actually implemented and documented
in child modules.

"""

import os

# Get the version number from the __version__.py file
version_dict = {}
with open(os.path.join(os.path.dirname(__file__), '__version__.py')) as version_file:
    exec(version_file.read(), version_dict)                                     # pylint: disable=W0122

__version__ = version_dict.get('__version__')

from vocalfoley.audio_io import AudioClip, load_wav, save_wav
from vocalfoley.config import PipelineConfig
from vocalfoley.dsp_features import MelSpectrogram, mel_spectrogram
from vocalfoley.labels import EventLabel, LabelSet
from vocalfoley.control_ops import pitch_shift, time_stretch
from vocalfoley.vocoder import griffin_lim, vocode
from vocalfoley.pipeline import prepare, fit_codebook, train, evaluate, Synthesizer

__all__ = [
    'AudioClip',
    'load_wav',
    'save_wav',
    'PipelineConfig',
    'MelSpectrogram',
    'mel_spectrogram',
    'EventLabel',
    'LabelSet',
    'pitch_shift',
    'time_stretch',
    'griffin_lim',
    'vocode',
    'prepare',
    'fit_codebook',
    'train',
    'evaluate',
    'Synthesizer',
]
