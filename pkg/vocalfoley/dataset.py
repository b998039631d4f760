# -*- coding: utf-8 -*-

"""
************************
vocalfoley.dataset
************************

Ingestion of ESC-50-style environmental sounds and the paired vocal
imitations, and the deterministic train / evaluation manifest.

Layout conventions:

* ``<esc50_root>/meta/esc50.csv`` with at least the columns ``filename``,
  ``target`` and ``category`` (``fold`` is kept when present) and the clips in
  ``<esc50_root>/audio/``.
* Within each class, environment clips are ordered by file name; the position
  in that order is the clip's ``sample_index``.
* Imitations live at ``<imitation_dir>/<class>/<sample_index>_<imitator_id>.wav``.

Training entries use sample indices ``0 .. per_class_train - 1`` of the
training imitators; evaluation entries use the next ``per_class_eval`` indices
of the evaluation imitators.

"""
import logging
import os
import warnings
from collections import OrderedDict, namedtuple

import pandas as pd

from validator_collection import validators, checkers

from vocalfoley.audio_io import load_wav, resample, fix_length
from vocalfoley.config import SpectralConfig
from vocalfoley.dsp_features import mel_spectrogram
from vocalfoley.errors import DatasetError, PairingError, SplitOverlapError, \
    PartialDatasetWarning, VocalFoleyError
from vocalfoley.labels import EventLabel, LabelSet
from vocalfoley.utilities import json, sha256_hex, ensure_writable

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
ESC50_CLASSES = 50
ESC50_CLIPS_PER_CLASS = 40
REQUIRED_COLUMNS = ('filename', 'target', 'category')
SPLITS = ('train', 'eval')

TrainingPair = namedtuple('TrainingPair', ['imitation', 'environment', 'label'])
ImitationReport = namedtuple('ImitationReport', ['present', 'missing', 'per_imitator'])


def imitation_path(imitation_dir, event_class, sample_index, imitator_id):
    """Path of an imitation under the documented naming convention."""
    return os.path.join(str(imitation_dir),
                        event_class,
                        '%d_%s.wav' % (sample_index, imitator_id))


def ingest_esc50(root_dir, csv_path = 'meta/esc50.csv', audio_dir = 'audio'):
    """Read the ESC-50 metadata into a catalog.

    :param root_dir: Dataset root.
    :param csv_path: Metadata CSV, relative to ``root_dir``.
    :param audio_dir: Audio directory, relative to ``root_dir``.

    :returns: One row per clip with the columns ``filename``, ``path``,
      ``category``, ``target``, ``fold``, ``sample_index`` and ``exists``,
      ordered by category and file name.
    :rtype: :class:`pandas.DataFrame`

    :raises DatasetError: if the metadata CSV is missing or lacks a required
      column

    A :class:`PartialDatasetWarning <vocalfoley.errors.PartialDatasetWarning>`
    is issued when the dataset has fewer than 50 classes of 40 clips or when
    referenced audio files are missing.
    """
    root_dir = str(root_dir)
    metadata = os.path.join(root_dir, csv_path)
    if not checkers.is_file(metadata):
        raise DatasetError('ESC-50 metadata not found: %s' % metadata)

    try:
        frame = pd.read_csv(metadata)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as error:
        raise DatasetError('cannot parse %s: %s' % (metadata, error))

    missing_columns = [x for x in REQUIRED_COLUMNS if x not in frame.columns]
    if missing_columns:
        raise DatasetError('%s lacks the columns: %s' % (metadata, ', '.join(missing_columns)))

    if 'fold' not in frame.columns:
        frame['fold'] = 0

    frame = frame[['filename', 'target', 'category', 'fold']].copy()
    frame['category'] = frame['category'].astype(str)
    frame = frame.sort_values(['category', 'filename'], kind = 'mergesort').reset_index(drop = True)
    frame['sample_index'] = frame.groupby('category').cumcount()
    frame['path'] = [os.path.join(root_dir, audio_dir, x) for x in frame['filename']]
    frame['exists'] = [os.path.isfile(x) for x in frame['path']]

    catalog = frame[['filename', 'path', 'category', 'target', 'fold', 'sample_index', 'exists']]

    counts = catalog.groupby('category').size()
    absent = int((~catalog['exists']).sum())
    if len(counts) < ESC50_CLASSES or (counts < ESC50_CLIPS_PER_CLASS).any() or absent:
        warnings.warn('partial ESC-50 dataset at %s: %d classes, %d clips, %d audio files '
                      'missing' % (root_dir, len(counts), len(catalog), absent),
                      PartialDatasetWarning)

    logger.info('ingested %d clips in %d classes from %s', len(catalog), len(counts), root_dir)

    return catalog


def missing_files(catalog):
    """Paths referenced by the catalog whose audio file is absent."""
    return list(catalog.loc[~catalog['exists'], 'path'])


def filter_catalog(catalog, class_subset):
    """Keep the rows whose category is in ``class_subset``.

    :raises DatasetError: if a class of the subset is absent from the catalog
    """
    class_subset = [validators.string(x) for x in class_subset]
    absent = sorted(set(class_subset) - set(catalog['category']))
    if absent:
        raise DatasetError('classes not found in the catalog: %s' % ', '.join(absent))

    return catalog[catalog['category'].isin(class_subset)].reset_index(drop = True)


def validate_imitations(imitation_dir, class_subset, imitators,
                        samples_per_class = ESC50_CLIPS_PER_CLASS):
    """Count the imitation recordings present for every imitator.

    :returns: Total present, the missing paths and a per-imitator mapping of
      ``(present, missing)`` counts.
    :rtype: :class:`ImitationReport`

    :raises DatasetError: if ``imitation_dir`` does not exist
    """
    imitation_dir = str(imitation_dir)
    if not checkers.is_directory(imitation_dir):
        raise DatasetError('imitation directory not found: %s' % imitation_dir)

    per_imitator = OrderedDict()
    missing = []
    present = 0
    for imitator in imitators:
        found = 0
        for event_class in class_subset:
            for index in range(samples_per_class):
                path = imitation_path(imitation_dir, event_class, index, imitator)
                if os.path.isfile(path):
                    found += 1
                else:
                    missing.append(path)
        expected = samples_per_class * len(class_subset)
        per_imitator[imitator] = (found, expected - found)
        present += found

    return ImitationReport(present, missing, per_imitator)


class ManifestEntry(object):
    """One (environment clip, imitation) pair of the manifest."""

    _keys = ('event_class', 'class_id', 'environment_file', 'imitation_file', 'imitator_id',
             'sample_index', 'split')

    def __init__(self, event_class, class_id, environment_file, imitation_file, imitator_id,
                 sample_index, split):
        if split not in SPLITS:
            raise DatasetError('split must be "train" or "eval", received %r' % (split, ))

        self.event_class = validators.string(event_class)
        self.class_id = validators.integer(class_id, minimum = 0)
        self.environment_file = str(environment_file)
        self.imitation_file = str(imitation_file)
        self.imitator_id = validators.string(imitator_id)
        self.sample_index = validators.integer(sample_index, minimum = 0)
        self.split = split

    @property
    def label(self):
        return EventLabel(self.class_id, self.event_class)

    @property
    def entry_id(self):
        """Stable identifier ``<class>/<sample_index>_<imitator_id>``."""
        return '%s/%d_%s' % (self.event_class, self.sample_index, self.imitator_id)

    def to_dict(self):
        return OrderedDict((x, getattr(self, x)) for x in self._keys)

    @classmethod
    def from_dict(cls, input_data):
        try:
            return cls(**dict((x, input_data[x]) for x in cls._keys))
        except KeyError as error:
            raise DatasetError('manifest entry lacks %s' % error)

    def __eq__(self, other):
        return isinstance(other, ManifestEntry) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'ManifestEntry(%s, %s)' % (self.entry_id, self.split)


class Manifest(object):
    """Ordered train / evaluation pairs with the settings that produced them.

    :raises SplitOverlapError: if an imitator appears in both splits
    :raises DatasetError: if an entry's class is not in ``class_subset``
    """

    def __init__(self, entries, class_subset, train_imitators, eval_imitators):
        self.entries = list(entries)
        self.class_subset = list(class_subset)
        self.train_imitators = list(train_imitators)
        self.eval_imitators = list(eval_imitators)

        overlap = set(self.train_imitators) & set(self.eval_imitators)
        if overlap:
            raise SplitOverlapError('imitators in both splits: %s' % ', '.join(sorted(overlap)))

        unknown = sorted(set(x.event_class for x in self.entries) - set(self.class_subset))
        if unknown:
            raise DatasetError('entries with classes outside the subset: %s' % ', '.join(unknown))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def split(self, name):
        """Entries of the ``train`` or ``eval`` split."""
        if name not in SPLITS:
            raise DatasetError('split must be "train" or "eval", received %r' % (name, ))

        return [x for x in self.entries if x.split == name]

    @property
    def labels(self):
        """The :class:`LabelSet <vocalfoley.labels.LabelSet>` of ``class_subset``."""
        return LabelSet(self.class_subset)

    def _header(self):
        return OrderedDict([('type', 'header'),
                            ('version', MANIFEST_VERSION),
                            ('class_subset', self.class_subset),
                            ('train_imitators', self.train_imitators),
                            ('eval_imitators', self.eval_imitators)])

    def checksum(self):
        """SHA-256 over the header settings and every entry, in order."""
        return sha256_hex({'header': self._header(),
                           'entries': [x.to_dict() for x in self.entries]})

    def save(self, path):
        """Write the manifest as JSON Lines: a header line followed by one line
        per entry.

        :raises OutputPathError: if ``path`` is not writable
        """
        path = ensure_writable(path)
        header = self._header()
        header['checksum'] = self.checksum()

        with open(path, 'w', encoding = 'utf-8', newline = '\n') as stream:
            stream.write(json.dumps(header) + '\n')
            for entry in self.entries:
                line = OrderedDict([('type', 'entry')])
                line.update(entry.to_dict())
                stream.write(json.dumps(line) + '\n')

        logger.info('wrote manifest %s (%d entries)', path, len(self.entries))

        return path

    @classmethod
    def load(cls, path):
        """Read a manifest written by :meth:`save`.

        :raises DatasetError: if the file is missing, malformed, or its
          checksum does not match its contents
        """
        path = str(path)
        if not checkers.is_file(path):
            raise DatasetError('manifest not found: %s' % path)

        with open(path, 'r', encoding = 'utf-8') as stream:
            lines = [x for x in stream.read().splitlines() if x.strip()]

        try:
            records = [json.loads(x) for x in lines]
        except ValueError as error:
            raise DatasetError('manifest %s is not valid JSON Lines: %s' % (path, error))

        if not records or records[0].get('type') != 'header':
            raise DatasetError('manifest %s does not start with a header line' % path)

        header = records[0]
        if header.get('version') != MANIFEST_VERSION:
            raise DatasetError('manifest %s has version %s, expected %s' % (
                path, header.get('version'), MANIFEST_VERSION))

        manifest = cls([ManifestEntry.from_dict(x) for x in records[1:]],
                       header.get('class_subset', []),
                       header.get('train_imitators', []),
                       header.get('eval_imitators', []))
        if manifest.checksum() != header.get('checksum'):
            raise DatasetError('manifest %s: checksum does not match its entries' % path)

        return manifest


def build_manifest(catalog,
                   imitation_dir,
                   class_subset,
                   train_imitators,
                   eval_imitators,
                   per_class_train = 35,
                   per_class_eval = 5):
    """Pair environment clips with imitations and split them by imitator.

    :param catalog: Output of :func:`ingest_esc50`.
    :type catalog: :class:`pandas.DataFrame`

    :param imitation_dir: Root of the imitation recordings.
    :param class_subset: Ordered class names; an entry's ``class_id`` is the
      position of its class in this list.
    :param train_imitators: Imitators whose recordings are used for training.
    :param eval_imitators: Imitators whose recordings are used for evaluation.
    :param per_class_train: Clips per class (and training imitator) for
      training, taken by ascending ``sample_index``.
    :param per_class_eval: Clips per class (and evaluation imitator) for
      evaluation, taken after the training clips.

    :rtype: :class:`Manifest`

    :raises SplitOverlapError: if an imitator is listed in both splits
    :raises PairingError: if a required environment clip or imitation is
      missing
    :raises DatasetError: if a class of the subset is absent from the catalog
    """
    overlap = set(train_imitators) & set(eval_imitators)
    if overlap:
        raise SplitOverlapError('imitators in both splits: %s' % ', '.join(sorted(overlap)))

    per_class_train = validators.integer(per_class_train, minimum = 0)
    per_class_eval = validators.integer(per_class_eval, minimum = 0)
    class_subset = list(class_subset)
    labels = LabelSet(class_subset)
    catalog = filter_catalog(catalog, class_subset)

    needed = per_class_train + per_class_eval
    entries = []
    missing = []
    for label in labels:
        clips = catalog[catalog['category'] == label.name].sort_values('sample_index')
        if len(clips) < needed:
            raise PairingError('class %s has %d clips, %d are needed' % (label.name,
                                                                         len(clips),
                                                                         needed))

        plan = [('train', x, range(per_class_train)) for x in train_imitators] + \
               [('eval', x, range(per_class_train, needed)) for x in eval_imitators]
        for split, imitator, indices in plan:
            for index in indices:
                row = clips.iloc[index]
                if not row['exists']:
                    missing.append(row['path'])
                    continue
                imitation = imitation_path(imitation_dir, label.name, index, imitator)
                if not os.path.isfile(imitation):
                    missing.append(imitation)
                    continue
                entries.append(ManifestEntry(label.name, label.class_id, row['path'],
                                             imitation, imitator, index, split))

    if missing:
        raise PairingError('%d files needed for pairing are missing, e.g. %s' % (
            len(missing), ', '.join(missing[:3])))

    manifest = Manifest(entries, class_subset, train_imitators, eval_imitators)
    logger.info('manifest: %d train, %d eval entries', len(manifest.split('train')),
                len(manifest.split('eval')))

    return manifest


def load_clip(path, spectral_config):
    """Load ``path``, resample to the model rate and fix its length to
    ``clip_seconds``.

    :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`
    """
    clip = resample(load_wav(path), spectral_config.sample_rate)

    return fix_length(clip, spectral_config.clip_seconds)


def load_training_pair(entry, spectral_config = None):
    """Load the imitation, the environment mel spectrogram and the label of an
    entry.

    :param entry: The manifest entry.
    :type entry: :class:`ManifestEntry`

    :returns: The imitation at the model rate fixed to ``clip_seconds``, the
      ``clip_frames x n_mels`` environment mel and the label.
    :rtype: :class:`TrainingPair`

    :raises DatasetError: if either file cannot be read
    """
    spectral_config = spectral_config or SpectralConfig()
    try:
        imitation = load_clip(entry.imitation_file, spectral_config)
        environment = load_clip(entry.environment_file, spectral_config)
    except VocalFoleyError as error:
        raise DatasetError('cannot load %s: %s' % (entry.entry_id, error))

    return TrainingPair(imitation, mel_spectrogram(environment, spectral_config), entry.label)
