# -*- coding: utf-8 -*-

"""
************************
vocalfoley.pipeline
************************

The end-to-end workflow: dataset preparation, codebook fitting, training,
synthesis and the control-sweep evaluation. Each step reads and writes the
artifacts named in the ``paths`` section of the configuration, so the steps can
run as separate processes.

Synthesis of an imitation ``x`` with label ``c``:

#. resample ``x`` to the model rate, optionally shift its pitch and / or
   change its speed, and fix its length to ``clip_seconds``;
#. extract embeddings, align them to the decoder's frame count and quantize
   them with the codebook;
#. fuse the tokens with the one-hot label, decode a mel spectrogram and
   vocode it.

"""
import logging
import os
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import pandas as pd

from validator_collection import validators, checkers

from vocalfoley.audio_io import resample, fix_length, save_wav
from vocalfoley.control_ops import apply_controls
from vocalfoley.dataset import ingest_esc50, validate_imitations, build_manifest, Manifest, \
    load_training_pair, load_clip, missing_files
from vocalfoley.decoder import DecoderModel, TrainingExample, Trainer, load_model, \
    latest_checkpoint, synthesize_mel, condition_tokens
from vocalfoley.dsp_features import MelStats, compute_mel_stats, normalize_mel, mel_spectrogram
from vocalfoley.embedding import build_extractor, align, extract_many
from vocalfoley.errors import ConfigurationError, CheckpointMismatchError, DatasetError, \
    DimensionMismatchError, SilentAudioError
from vocalfoley.labels import EventLabel, LabelSet
from vocalfoley.metrics import relative_centroid, relative_duration, render_spectrogram, \
    summarize_results, render_trend, EVALUATION_COLUMNS
from vocalfoley.quantizer import Codebook, fit, encode
from vocalfoley.utilities import seed_everything, ensure_writable
from vocalfoley.vocoder import vocode, reconstruct

logger = logging.getLogger(__name__)

PrepareReport = namedtuple('PrepareReport', ['manifest', 'stats', 'catalog_size',
                                             'missing_environment', 'imitations'])
SynthesisResult = namedtuple('SynthesisResult', ['audio', 'mel', 'tokens', 'label'])
EvaluationReport = namedtuple('EvaluationReport', ['results', 'summary', 'directory'])

CONTROL_TYPES = ('pitch', 'speed')


def _map(function, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [function(x) for x in items]

    with ThreadPoolExecutor(max_workers = workers) as executor:
        return list(executor.map(function, items))


def class_subset(config):
    """The configured class subset, or the names of the label file."""
    if config.dataset.class_subset:
        return list(config.dataset.class_subset)

    return LabelSet.load(config.paths.labels).names


def tokenize(clip, extractor, codebook, frames):
    """Quantized, frame-aligned tokens of ``clip``.

    :param frames: Number of decoder frames to align to.

    :rtype: :class:`TokenSequence <vocalfoley.quantizer.TokenSequence>`
    """
    embeddings = extract_many(extractor, [clip])[0]

    return encode(align(embeddings, frames), codebook)


def prepare(config):
    """Validate the dataset, build and save the manifest and save the mel
    normalization statistics of the training environment clips.

    :rtype: :class:`PrepareReport`

    :raises DatasetError: if a dataset directory is missing or pairing fails
    """
    esc50_root = config.paths.resolve('esc50_root')
    imitation_dir = config.paths.resolve('imitation_dir')
    for path in (esc50_root, imitation_dir):
        if not checkers.is_directory(path):
            raise DatasetError('dataset directory not found: %s' % path)

    dataset = config.dataset
    classes = class_subset(config)

    catalog = ingest_esc50(esc50_root, dataset.esc50_csv, dataset.esc50_audio)
    absent = missing_files(catalog[catalog['category'].isin(classes)])
    imitations = validate_imitations(imitation_dir,
                                     classes,
                                     list(dataset.train_imitators) + list(dataset.eval_imitators),
                                     samples_per_class = dataset.per_class_train +
                                     dataset.per_class_eval)

    manifest = build_manifest(catalog,
                              imitation_dir,
                              classes,
                              dataset.train_imitators,
                              dataset.eval_imitators,
                              per_class_train = dataset.per_class_train,
                              per_class_eval = dataset.per_class_eval)
    manifest.save(config.paths.resolve('manifest'))

    spectral = config.spectral
    environment_files = sorted(set(x.environment_file for x in manifest.split('train')))
    mels = _map(lambda x: mel_spectrogram(load_clip(x, spectral), spectral),
                environment_files,
                config.train.num_workers)
    stats = compute_mel_stats(mels)
    stats.save(config.paths.resolve('stats'), config_hash = spectral.config_hash())

    return PrepareReport(manifest, stats, len(catalog), absent, imitations)


def load_manifest(config):
    return Manifest.load(config.paths.resolve('manifest'))


def fit_codebook(config):
    """Fit the k-means codebook on embeddings of the training environment
    clips and save it.

    :rtype: :class:`Codebook <vocalfoley.quantizer.Codebook>`
    """
    manifest = load_manifest(config)
    extractor = build_extractor(config.extractor, config.spectral)

    files = sorted(set(x.environment_file for x in manifest.split('train')))
    clips = _map(lambda x: load_clip(x, config.spectral), files, config.train.num_workers)
    embeddings = extract_many(extractor, clips, workers = config.train.num_workers)

    quantizer = config.quantizer
    codebook = fit(embeddings,
                   k = quantizer.k,
                   iterations = quantizer.iterations,
                   seed = quantizer.seed,
                   extractor_id = extractor.extractor_id)
    codebook.save(config.paths.resolve('codebook'))
    logger.info('codebook: k=%d, %d iterations run, final inertia %.4f',
                codebook.k, codebook.iterations_run,
                codebook.inertia_history[-1] if codebook.inertia_history else float('nan'))

    return codebook


def load_codebook(config):
    return Codebook.load(config.paths.resolve('codebook'))


def build_examples(entries, config, extractor, codebook, stats):
    """Load, tokenize and normalize training pairs.

    :rtype: :class:`list <python:list>` of
      :class:`TrainingExample <vocalfoley.decoder.training.TrainingExample>`
    """
    def build(entry):
        pair = load_training_pair(entry, config.spectral)
        target = normalize_mel(pair.environment, stats)
        tokens = tokenize(pair.imitation, extractor, codebook, target.frames)

        return TrainingExample(tokens, pair.label.class_id, target)

    return _map(build, entries, config.train.num_workers)


def build_model(config, codebook, labels, stats):
    """Create an untrained decoder carrying the inference artifacts.

    :raises ConfigurationError: if the label set is larger than
      ``fusion.num_classes``
    """
    if len(labels) > config.fusion.num_classes:
        raise ConfigurationError('%d labels exceed fusion.num_classes (%d)' % (
            len(labels), config.fusion.num_classes))

    centroids = codebook.centroids if config.fusion.mode == 'centroid' else None
    model = DecoderModel(config.decoder, config.fusion, codebook.k, centroids = centroids)
    model.norm_stats = stats
    model.labels = labels
    model.codebook_hash = codebook.checksum()
    model.spectral_config = config.spectral

    return model


def train(config, resume = True, max_steps = None):
    """Train the decoder on the training split.

    :returns: The trained model and its loss log.
    :rtype: :class:`tuple <python:tuple>`
    """
    manifest = load_manifest(config)
    codebook = load_codebook(config)
    stats = MelStats.load(config.paths.resolve('stats'), config_hash = config.spectral.config_hash())
    extractor = build_extractor(config.extractor, config.spectral)

    examples = build_examples(manifest.split('train'), config, extractor, codebook, stats)
    logger.info('training on %d examples', len(examples))

    seed_everything(config.train.seed)
    model = build_model(config, codebook, manifest.labels, stats)

    trainer = Trainer(model,
                      config.train,
                      examples,
                      config.paths.resolve('checkpoints'),
                      log_path = config.paths.resolve('train_log'))
    history = trainer.run(resume = resume, max_steps = max_steps)

    return model, history


class Synthesizer(object):
    """Trained imitation-plus-label synthesizer.

    :param model: The trained decoder.
    :type model: :class:`DecoderModel <vocalfoley.decoder.model.DecoderModel>`

    :param codebook: The codebook the decoder was trained with.
    :type codebook: :class:`Codebook <vocalfoley.quantizer.Codebook>`

    :param extractor: The extractor the codebook was fitted with.

    :param config: The pipeline configuration.
    :type config: :class:`PipelineConfig <vocalfoley.config.PipelineConfig>`

    :raises CheckpointMismatchError: if the model was trained with another
      codebook
    :raises DimensionMismatchError: if the codebook was fitted with another
      extractor
    """

    def __init__(self, model, codebook, extractor, config):
        if model.codebook_hash is not None and model.codebook_hash != codebook.checksum():
            raise CheckpointMismatchError('the decoder was trained with a different codebook')
        if codebook.extractor_id != extractor.extractor_id:
            raise DimensionMismatchError('codebook was fitted on %s, extractor is %s' % (
                codebook.extractor_id, extractor.extractor_id))

        self.model = model
        self.codebook = codebook
        self.extractor = extractor
        self.config = config

    @classmethod
    def from_workdir(cls, config, checkpoint = None):
        """Load the latest checkpoint (or ``checkpoint``) and the codebook named
        by ``config``.

        :raises CheckpointMismatchError: if there is no checkpoint or it does
          not match the configuration
        """
        if checkpoint is None:
            checkpoint = latest_checkpoint(config.paths.resolve('checkpoints'))
            if checkpoint is None:
                raise CheckpointMismatchError('no checkpoint found in %s' % (
                    config.paths.resolve('checkpoints'), ))

        model = load_model(checkpoint,
                           decoder_config = config.decoder,
                           fusion_config = config.fusion,
                           spectral_config = config.spectral)

        return cls(model,
                   load_codebook(config),
                   build_extractor(config.extractor, config.spectral),
                   config)

    @property
    def labels(self):
        return self.model.labels

    def resolve_label(self, label):
        """Return the :class:`EventLabel <vocalfoley.labels.EventLabel>` for a
        name or label.

        :raises UnknownLabelError: if the name is not in the model's label set
        """
        if isinstance(label, EventLabel):
            return label
        labels = self.model.labels or LabelSet.load(self.config.paths.labels)

        return labels.get(label)

    def prepare_input(self, clip, pitch = None, pitch_unit = 'semitone', speed = None):
        """Resample, apply the controls and fix the length of an imitation.

        :rtype: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`
        """
        spectral = self.config.spectral
        clip = resample(clip, spectral.sample_rate)
        clip = apply_controls(clip,
                              pitch = pitch,
                              unit = pitch_unit,
                              speed = speed,
                              controls_config = self.config.controls)

        return fix_length(clip, spectral.clip_seconds)

    def synthesize(self,
                   clip,
                   label,
                   pitch = None,
                   pitch_unit = 'semitone',
                   speed = None,
                   label_only = False,
                   seed = None):
        """Synthesize an environmental sound from an imitation and a label.

        :param clip: The vocal imitation, at any sample rate.
        :type clip: :class:`AudioClip <vocalfoley.audio_io.AudioClip>`

        :param label: Label name or :class:`EventLabel <vocalfoley.labels.EventLabel>`.

        :param pitch: Optional pitch shift applied to the imitation first.
        :param pitch_unit: ``semitone`` or ``semioctave``.
        :param speed: Optional speed ratio applied to the imitation first.
        :param label_only: Ignore the imitation and condition on the label
          alone.
        :param seed: Decoding seed; defaults to the configuration seed.

        :rtype: :class:`SynthesisResult`

        :raises UnknownLabelError: if ``label`` is not known
        """
        seed = self.config.seed if seed is None else validators.integer(seed, minimum = 0)
        label = self.resolve_label(label)

        prepared = self.prepare_input(clip, pitch = pitch, pitch_unit = pitch_unit,
                                      speed = speed)
        frames = self.config.spectral.frames_for(len(prepared))
        tokens = tokenize(prepared, self.extractor, self.codebook, frames)

        conditioned = condition_tokens(self.model, tokens, label, label_only = label_only)
        mel = synthesize_mel(self.model, conditioned, seed = seed)
        audio = vocode(mel, self.config.vocoder, spectral_config = self.config.spectral)

        return SynthesisResult(audio, mel, tokens, label)


def _file_stem(text):
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', text)


def _sweep(config, control_type):
    if control_type == 'pitch':
        return [float(x) for x in config.controls.pitch_steps], 0.0
    if control_type == 'speed':
        return [float(x) for x in config.controls.speed_rates], 1.0

    raise ConfigurationError('control type must be pitch or speed, received %r' % (
        control_type, ))


def _relative(function, test, reference, gate_db, entry_id):
    try:
        return function(test, reference, gate_db = gate_db)
    except SilentAudioError as error:
        logger.warning('%s: %s', entry_id, error)
        return float('nan')


def evaluate(config, control_type, synthesizer = None):
    """Sweep a control over the evaluation split and measure the synthesized
    sounds relative to the unmodified imitation's synthesis.

    Writes ``results.csv``, ``summary.csv``, ``trend.png`` and spectrogram PNGs
    under ``<eval_dir>/<control_type>/``; with ``evaluation.write_audio`` also
    the controlled imitations, syntheses and vocoder reconstructions of the
    environment clips.

    :rtype: :class:`EvaluationReport`
    """
    values, neutral = _sweep(config, control_type)
    synthesizer = synthesizer or Synthesizer.from_workdir(config)
    evaluation = config.evaluation

    entries = load_manifest(config).split('eval')
    if evaluation.max_samples is not None:
        entries = entries[:evaluation.max_samples]

    directory = os.path.join(config.paths.resolve('eval_dir'), control_type)
    rows = []
    for position, entry in enumerate(entries):
        imitation = load_clip(entry.imitation_file, config.spectral)
        outputs = {}
        for value in values:
            controls = {'pitch': value, 'pitch_unit': config.controls.pitch_unit} \
                if control_type == 'pitch' else {'speed': value}
            outputs[value] = synthesizer.synthesize(imitation, entry.label, **controls)

        reference = outputs[neutral].audio
        stem = _file_stem('%s_%d_%s' % (entry.event_class, entry.sample_index, entry.imitator_id))
        for value in values:
            result = outputs[value]
            if value == neutral:
                centroid, duration = 1.0, 1.0
            else:
                centroid = _relative(relative_centroid, result.audio, reference,
                                     evaluation.centroid_gate_db, entry.entry_id)
                duration = _relative(relative_duration, result.audio, reference,
                                     evaluation.duration_gate_db, entry.entry_id)
            rows.append({
                'sample_id': entry.entry_id,
                'event_class': entry.event_class,
                'control_type': control_type,
                'control_value': value,
                'relative_centroid': centroid,
                'relative_duration': duration,
            })

            if position < evaluation.spectrogram_samples:
                render_spectrogram(result.mel,
                                   os.path.join(directory, 'spectrograms',
                                                '%s_%s_%g.png' % (stem, control_type, value)),
                                   title = '%s, %s %g' % (entry.entry_id, control_type, value))
            if evaluation.write_audio:
                save_wav(result.audio,
                         os.path.join(directory, 'audio', '%s_%g_synthesized.wav' % (stem, value)))
                controls = {'pitch': value, 'unit': config.controls.pitch_unit} \
                    if control_type == 'pitch' else {'speed': value}
                save_wav(apply_controls(imitation, controls_config = config.controls,
                                        **controls),
                         os.path.join(directory, 'audio', '%s_%g_imitation.wav' % (stem, value)))

        if evaluation.write_audio:
            environment = load_clip(entry.environment_file, config.spectral)
            save_wav(reconstruct(environment, config.spectral, config.vocoder),
                     os.path.join(directory, 'audio', '%s_reconstructed.wav' % stem))

    results = pd.DataFrame(rows, columns = EVALUATION_COLUMNS)
    results.to_csv(ensure_writable(os.path.join(directory, 'results.csv')), index = False)
    summary = summarize_results(results)
    summary.to_csv(ensure_writable(os.path.join(directory, 'summary.csv')), index = False)
    if len(results):
        render_trend(summary, control_type, os.path.join(directory, 'trend.png'))

    logger.info('evaluated %d samples x %d %s values into %s', len(entries), len(values),
                control_type, directory)

    return EvaluationReport(results, summary, directory)
