# -*- coding: utf-8 -*-

"""
******************************
vocalfoley.decoder.checkpoint
******************************

Single-archive checkpoints of the decoder.

A checkpoint is a :func:`torch.save` archive holding a dictionary of tensors
and plain Python values only, so it can be read back with
``torch.load(..., weights_only = True)``:

``format_version``, ``step``, ``model_state``, ``optimizer_state``,
``decoder_config``, ``fusion_config``, ``spectral_config``, ``k``, ``labels``,
``norm_stats``, ``codebook_hash`` and ``config_hash``.

"""
import glob
import logging
import os
import re
from collections import OrderedDict

import torch

from validator_collection import checkers

from vocalfoley.config import DecoderConfig, FusionConfig, SpectralConfig
from vocalfoley.dsp_features import MelStats
from vocalfoley.errors import CheckpointMismatchError, VocalFoleyError
from vocalfoley.labels import LabelSet
from vocalfoley.utilities import ensure_writable, sha256_hex
from vocalfoley.decoder.model import DecoderModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
CHECKPOINT_TEMPLATE = 'step_%08d.pt'
_CHECKPOINT_RE = re.compile(r'^step_(\d{8})\.pt$')

_REQUIRED_KEYS = ('format_version', 'step', 'model_state', 'decoder_config',
                  'fusion_config', 'spectral_config', 'k', 'config_hash')


def architecture_hash(decoder_config, fusion_config, spectral_config, k):
    """SHA-256 of everything that determines parameter shapes and the meaning
    of the output frames."""
    return sha256_hex({
        'decoder': decoder_config.to_dict(),
        'fusion': fusion_config.to_dict(),
        'spectral': spectral_config.to_dict(),
        'k': int(k),
    })


def _model_hash(model):
    spectral = model.spectral_config or SpectralConfig(n_mels = model.decoder_config.mel_dim)

    return architecture_hash(model.decoder_config, model.fusion_config, spectral, model.k)


def save_model(model, path, optimizer = None):
    """Write ``model`` (and optionally the optimizer state) to ``path``.

    The archive is written to a temporary file first and renamed into place.

    :param model: The decoder.
    :type model: :class:`DecoderModel <vocalfoley.decoder.model.DecoderModel>`

    :param path: Destination file.
    :type path: path-like

    :param optimizer: Optimizer whose state should be stored for resuming.
    :type optimizer: :class:`torch.optim.Optimizer` / :obj:`None <python:None>`

    :returns: ``path``
    :rtype: :class:`str <python:str>`

    :raises OutputPathError: if ``path`` is not writable
    """
    path = ensure_writable(path)
    spectral = model.spectral_config or SpectralConfig(n_mels = model.decoder_config.mel_dim)

    archive = {
        'format_version': FORMAT_VERSION,
        'step': int(model.step),
        'model_state': OrderedDict((key, value.detach().cpu().clone())
                                   for key, value in model.state_dict().items()),
        'optimizer_state': optimizer.state_dict() if optimizer is not None else None,
        'decoder_config': dict(model.decoder_config.to_dict()),
        'fusion_config': dict(model.fusion_config.to_dict()),
        'spectral_config': dict(spectral.to_dict()),
        'k': int(model.k),
        'labels': dict(model.labels.to_dict()) if model.labels is not None else None,
        'norm_stats': torch.as_tensor(model.norm_stats.to_array())
                      if model.norm_stats is not None else None,
        'codebook_hash': model.codebook_hash,
        'config_hash': _model_hash(model),
    }

    temporary = '%s.tmp' % path
    torch.save(archive, temporary)
    os.replace(temporary, path)
    logger.info('saved checkpoint %s (step %d)', path, model.step)

    return path


def load_checkpoint(path):
    """Read and validate a checkpoint archive.

    :returns: The archive dictionary.
    :rtype: :class:`dict <python:dict>`

    :raises CheckpointMismatchError: if the file is missing, unreadable, of an
      unsupported version, incomplete, or its stored hash does not match its
      stored configuration
    """
    path = str(path)
    if not checkers.is_file(path):
        raise CheckpointMismatchError('checkpoint not found: %s' % path)

    try:
        archive = torch.load(path, map_location = 'cpu', weights_only = True)
    except Exception as error:
        raise CheckpointMismatchError('cannot read checkpoint %s: %s' % (path, error))

    if not isinstance(archive, dict):
        raise CheckpointMismatchError('%s is not a checkpoint archive' % path)

    missing = [x for x in _REQUIRED_KEYS if x not in archive]
    if missing:
        raise CheckpointMismatchError('checkpoint %s lacks: %s' % (path, ', '.join(missing)))

    if archive['format_version'] != FORMAT_VERSION:
        raise CheckpointMismatchError('checkpoint %s has format version %s, expected %s' % (
            path, archive['format_version'], FORMAT_VERSION))

    try:
        decoder_config = DecoderConfig.new_from_dict(archive['decoder_config'])
        fusion_config = FusionConfig.new_from_dict(archive['fusion_config'])
        spectral_config = SpectralConfig.new_from_dict(archive['spectral_config'])
    except VocalFoleyError as error:
        raise CheckpointMismatchError('checkpoint %s holds an invalid configuration: %s' % (
            path, error))

    stored_hash = architecture_hash(decoder_config, fusion_config, spectral_config, archive['k'])
    if stored_hash != archive['config_hash']:
        raise CheckpointMismatchError('checkpoint %s: configuration hash does not match its '
                                      'stored configuration' % path)

    archive['decoder_config'] = decoder_config
    archive['fusion_config'] = fusion_config
    archive['spectral_config'] = spectral_config

    return archive


def _differing_keys(expected, stored):
    expected = expected.to_dict()
    stored = stored.to_dict()

    return sorted(key for key in expected if expected.get(key) != stored.get(key))


def load_model(path,
               decoder_config = None,
               fusion_config = None,
               spectral_config = None):
    """Rebuild a :class:`DecoderModel <vocalfoley.decoder.model.DecoderModel>`
    from a checkpoint.

    :param decoder_config: When supplied, must equal the stored decoder
      configuration.
    :param fusion_config: When supplied, must equal the stored fusion
      configuration.
    :param spectral_config: When supplied, must equal the stored spectral
      configuration.

    :rtype: :class:`DecoderModel <vocalfoley.decoder.model.DecoderModel>`

    :raises CheckpointMismatchError: if a supplied configuration differs from
      the stored one (naming the differing keys) or the stored parameters do
      not fit the stored architecture
    """
    archive = load_checkpoint(path)

    for name, supplied in (('decoder', decoder_config),
                           ('fusion', fusion_config),
                           ('spectral', spectral_config)):
        stored = archive['%s_config' % name]
        if supplied is not None and supplied != stored:
            raise CheckpointMismatchError('%s configuration differs from checkpoint %s in: %s' % (
                name, path, ', '.join(_differing_keys(supplied, stored))))

    state = archive['model_state']
    centroids = state.get('fusion.centroids')
    model = DecoderModel(archive['decoder_config'],
                         archive['fusion_config'],
                         archive['k'],
                         centroids = centroids)
    try:
        model.load_state_dict(state)
    except RuntimeError as error:
        raise CheckpointMismatchError('checkpoint %s does not fit its architecture: %s' % (
            path, error))

    if archive.get('norm_stats') is not None:
        stats = archive['norm_stats'].double().numpy()
        model.norm_stats = MelStats(stats[0], stats[1])
    if archive.get('labels') is not None:
        model.labels = LabelSet.from_dict(archive['labels'])
    model.codebook_hash = archive.get('codebook_hash')
    model.spectral_config = archive['spectral_config']
    model.step = int(archive['step'])

    logger.debug('loaded checkpoint %s (step %d)', path, model.step)

    return model


def checkpoint_path(directory, step):
    """Return the path of the checkpoint for ``step`` inside ``directory``."""
    return os.path.join(str(directory), CHECKPOINT_TEMPLATE % step)


def latest_checkpoint(directory):
    """Return the path of the highest-step checkpoint in ``directory``, or
    :obj:`None <python:None>` when there is none."""
    directory = str(directory)
    if not checkers.is_directory(directory):
        return None

    found = []
    for candidate in glob.glob(os.path.join(directory, 'step_*.pt')):
        match = _CHECKPOINT_RE.match(os.path.basename(candidate))
        if match:
            found.append((int(match.group(1)), candidate))

    if not found:
        return None

    return max(found)[1]


def restore_training_state(model, optimizer, path):
    """Load parameters, step and optimizer state from ``path`` into an existing
    ``model`` and ``optimizer`` so training can resume.

    :returns: The restored step.
    :rtype: :class:`int <python:int>`

    :raises CheckpointMismatchError: if the checkpoint was written for a
      different architecture
    """
    archive = load_checkpoint(path)
    if archive['config_hash'] != _model_hash(model):
        raise CheckpointMismatchError('checkpoint %s was written for a different configuration'
                                      % path)

    model.load_state_dict(archive['model_state'])
    if optimizer is not None and archive.get('optimizer_state') is not None:
        optimizer.load_state_dict(archive['optimizer_state'])
    model.step = int(archive['step'])

    return model.step
