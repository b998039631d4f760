# -*- coding: utf-8 -*-

"""
************************
vocalfoley.cli
************************

The ``vocalfoley`` command. Every subcommand reads one configuration built from
the packaged defaults, the ``--toy`` preset, ``--config`` and ``--set``
overrides, then runs one step of :mod:`vocalfoley.pipeline`.

Exit status is ``0`` on success, ``1`` when a :class:`VocalFoleyError
<vocalfoley.errors.VocalFoleyError>` is raised and ``2`` on usage errors.

"""
import argparse
import logging
import os
import sys

from vocalfoley.__version__ import __version__
from vocalfoley import pipeline
from vocalfoley.audio_io import load_wav, save_wav
from vocalfoley.config import PipelineConfig
from vocalfoley.dsp_features import MelSpectrogram
from vocalfoley.errors import VocalFoleyError, ParameterError
from vocalfoley.metrics import read_results, summarize_results, render_trend, render_spectrogram
from vocalfoley.toy_corpus import generate_toy_corpus

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(verbose = False, quiet = False):
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    logging.basicConfig(level = level, format = LOG_FORMAT, stream = sys.stderr)


def load_config(args):
    """Build the :class:`PipelineConfig <vocalfoley.config.PipelineConfig>` of
    parsed command-line ``args``."""
    config = PipelineConfig.load(args.config, toy = args.toy, overrides = args.overrides)
    if args.seed is not None:
        config.apply_seed(args.seed)

    return config


def _ensure_toy_corpus(config):
    dataset = config.dataset
    esc50_root = config.paths.resolve('esc50_root')
    if os.path.isfile(os.path.join(esc50_root, dataset.esc50_csv)):
        return

    logger.info('generating toy corpus under %s', os.path.dirname(esc50_root))
    generate_toy_corpus(esc50_root,
                        config.paths.resolve('imitation_dir'),
                        pipeline.class_subset(config),
                        list(dataset.train_imitators) + list(dataset.eval_imitators),
                        samples_per_class = dataset.per_class_train + dataset.per_class_eval,
                        seconds = config.spectral.clip_seconds,
                        imitation_rate = dataset.imitation_sample_rate,
                        seed = config.seed,
                        csv_path = dataset.esc50_csv,
                        audio_dir = dataset.esc50_audio)


def cmd_prepare(config, args):
    if args.toy:
        _ensure_toy_corpus(config)

    report = pipeline.prepare(config)
    print('environment clips in catalog: %d' % report.catalog_size)
    print('environment clips missing:    %d' % len(report.missing_environment))
    print('imitations present:           %d' % report.imitations.present)
    print('imitations missing:           %d' % len(report.imitations.missing))
    for imitator, (found, absent) in report.imitations.per_imitator.items():
        print('  %s: %d present, %d missing' % (imitator, found, absent))
    print('manifest: %d train, %d eval entries (checksum %s)' % (
        len(report.manifest.split('train')),
        len(report.manifest.split('eval')),
        report.manifest.checksum()))


def cmd_fit_codebook(config, args):
    codebook = pipeline.fit_codebook(config)
    print('codebook: k=%d, dim=%d, %d iterations -> %s' % (
        codebook.k, codebook.dim, codebook.iterations_run,
        config.paths.resolve('codebook')))


def cmd_train(config, args):
    model, history = pipeline.train(config,
                                    resume = not args.no_resume,
                                    max_steps = args.max_steps)
    if len(history):
        print('step %d, loss %.6f' % (model.step, history['loss'].iloc[-1]))


def cmd_synthesize(config, args):
    synthesizer = pipeline.Synthesizer.from_workdir(config)
    result = synthesizer.synthesize(load_wav(args.input),
                                    args.label,
                                    pitch = args.pitch,
                                    pitch_unit = args.pitch_unit or config.controls.pitch_unit,
                                    speed = args.speed,
                                    label_only = args.label_only)
    save_wav(result.audio, args.out)
    if args.mel_out:
        result.mel.save(args.mel_out)
    print('%s: %.2f s of %s' % (args.out, result.audio.duration, result.label.name))


def cmd_evaluate(config, args):
    if args.write_audio:
        config.evaluation.write_audio = True
    for control_type in args.controls:
        report = pipeline.evaluate(config, control_type)
        print('%s: %d rows -> %s' % (control_type, len(report.results), report.directory))


def cmd_plot(config, args):
    if args.metrics:
        results = read_results(args.metrics)
        control_types = sorted(set(results['control_type']))
        if len(control_types) != 1:
            raise ParameterError('%s must hold exactly one control type, found %s' % (
                args.metrics, ', '.join(control_types) or 'none'))
        render_trend(summarize_results(results), control_types[0], args.out)
    elif args.input:
        if args.input.lower().endswith('.wav'):
            source = load_wav(args.input)
        else:
            source = MelSpectrogram.load(args.input, config = config.spectral)
        render_spectrogram(source, args.out, config = config.spectral,
                           title = os.path.basename(args.input))
    else:
        raise ParameterError('plot needs --metrics or --input')

    print(args.out)


def _add_global_options(parser):
    parser.add_argument('--config', help = 'YAML configuration file')
    parser.add_argument('--toy', action = 'store_true',
                        help = 'use the small preset and the synthetic toy corpus')
    parser.add_argument('--set', dest = 'overrides', action = 'append', default = [],
                        metavar = 'SECTION.KEY=VALUE', help = 'override one setting')
    parser.add_argument('--seed', type = int, help = 'seed for every random step')

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action = 'store_true')
    verbosity.add_argument('-q', '--quiet', action = 'store_true')


def build_parser():
    """Return the :class:`argparse.ArgumentParser` of the ``vocalfoley``
    command."""
    common = argparse.ArgumentParser(add_help = False)
    _add_global_options(common)

    parser = argparse.ArgumentParser(
        prog = 'vocalfoley',
        description = 'Environmental sound synthesis from vocal imitations and event labels.')
    parser.add_argument('--version', action = 'version', version = __version__)
    commands = parser.add_subparsers(dest = 'command', metavar = 'COMMAND')
    commands.required = True

    command = commands.add_parser('prepare', parents = [common],
                                  help = 'validate the dataset, write manifest and mel stats')
    command.set_defaults(handler = cmd_prepare)

    command = commands.add_parser('fit-codebook', parents = [common],
                                  help = 'fit the k-means codebook')
    command.set_defaults(handler = cmd_fit_codebook)

    command = commands.add_parser('train', parents = [common], help = 'train the decoder')
    command.add_argument('--max-steps', type = int)
    command.add_argument('--no-resume', action = 'store_true',
                         help = 'ignore existing checkpoints')
    command.set_defaults(handler = cmd_train)

    command = commands.add_parser('synthesize', parents = [common],
                                  help = 'synthesize a sound from an imitation and a label')
    command.add_argument('--input', required = True, help = 'vocal imitation WAV')
    command.add_argument('--label', required = True, help = 'sound event label')
    command.add_argument('--pitch', type = float, help = 'pitch shift of the imitation')
    command.add_argument('--pitch-unit', choices = ('semitone', 'semioctave'))
    command.add_argument('--speed', type = float, help = 'speed ratio of the imitation')
    command.add_argument('--label-only', action = 'store_true',
                         help = 'condition on the label alone')
    command.add_argument('--out', required = True, help = 'output WAV')
    command.add_argument('--mel-out', help = 'also write the synthesized mel (.vft)')
    command.set_defaults(handler = cmd_synthesize)

    command = commands.add_parser('evaluate', parents = [common],
                                  help = 'sweep a control over the evaluation split')
    command.add_argument('--controls', nargs = '+', choices = pipeline.CONTROL_TYPES,
                         default = list(pipeline.CONTROL_TYPES))
    command.add_argument('--write-audio', action = 'store_true')
    command.set_defaults(handler = cmd_evaluate)

    command = commands.add_parser('plot', parents = [common],
                                  help = 'plot a metric trend or a spectrogram')
    source = command.add_mutually_exclusive_group()
    source.add_argument('--metrics', help = 'evaluation results CSV')
    source.add_argument('--input', help = 'WAV or mel (.vft) file')
    command.add_argument('--out', required = True, help = 'output PNG')
    command.set_defaults(handler = cmd_plot)

    return parser


def main(argv = None):
    """Run the ``vocalfoley`` command.

    :returns: The exit status.
    :rtype: :class:`int <python:int>`
    """
    args = build_parser().parse_args(argv)
    configure_logging(verbose = args.verbose, quiet = args.quiet)

    try:
        config = load_config(args)
        args.handler(config, args)
    except VocalFoleyError as error:
        print('error: %s' % error, file = sys.stderr)
        return 1

    return 0


if __name__ == '__main__':
    sys.exit(main())
