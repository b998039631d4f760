# -*- coding: utf-8 -*-

"""
****************************
vocalfoley.decoder.training
****************************

Teacher-forced training of the fusion layer and decoder.

The objective is the mean squared error between predicted and target
(normalized) mel frames, plus the same error after the post-net when it is
enabled, plus ``gate_loss_weight`` times the binary cross-entropy of the stop
gate, whose target is ``1`` on the last frame only.

Batches are drawn deterministically from ``train.seed + step`` so an
interrupted run resumed from a checkpoint sees the same batches it would have
seen without the interruption.

"""
import copy
import logging
import os
from collections import namedtuple

import numpy as np
import pandas as pd
import torch
from torch.nn import functional as F

from validator_collection import validators, checkers

from vocalfoley.errors import DecoderError, NonFiniteLossError, DimensionMismatchError
from vocalfoley.utilities import ensure_writable
from vocalfoley.decoder.checkpoint import save_model, latest_checkpoint, checkpoint_path, \
    restore_training_state

logger = logging.getLogger(__name__)

LOSS_LOG_COLUMNS = ['step', 'loss', 'mel_loss', 'postnet_loss', 'gate_loss', 'grad_norm']

LossTerms = namedtuple('LossTerms', ['total', 'mel', 'postnet', 'gate'])
StepResult = namedtuple('StepResult', ['loss', 'mel_loss', 'postnet_loss', 'gate_loss',
                                       'grad_norm'])
GradientCheckResult = namedtuple('GradientCheckResult', ['max_relative_error', 'checked',
                                                         'passed'])


class TrainingExample(object):
    """One training pair: aligned token ids, the class id and the normalized
    ``T x mel_dim`` target.

    :raises DimensionMismatchError: if the token count differs from the number
      of target frames
    """

    def __init__(self, tokens, class_id, target):
        tokens = np.asarray(getattr(tokens, 'tokens', tokens), dtype = np.int64).reshape(-1)
        target = np.asarray(getattr(target, 'values', target), dtype = np.float64)
        if target.ndim != 2:
            raise DimensionMismatchError('target must be a T x mel_dim matrix, received shape '
                                         '%s' % (target.shape, ))
        if tokens.shape[0] != target.shape[0]:
            raise DimensionMismatchError('%d tokens for %d target frames' % (tokens.shape[0],
                                                                           target.shape[0]))

        self.tokens = tokens
        self.class_id = validators.integer(class_id, minimum = 0)
        self.target = target

    def __len__(self):
        return self.target.shape[0]


def collate(examples, dtype = torch.float32):
    """Stack examples into ``(tokens, class_ids, targets)`` tensors.

    :raises DecoderError: if the batch is empty or its examples differ in
      length
    """
    if not examples:
        raise DecoderError('a training batch must not be empty')

    lengths = set(len(x) for x in examples)
    if len(lengths) != 1:
        raise DecoderError('examples in a batch must share one length, received %s' % (
            sorted(lengths), ))

    tokens = torch.as_tensor(np.stack([x.tokens for x in examples]))
    class_ids = torch.as_tensor([x.class_id for x in examples], dtype = torch.int64)
    targets = torch.as_tensor(np.stack([x.target for x in examples]), dtype = dtype)

    return tokens, class_ids, targets


def sample_batch(examples, batch_size, seed, step):
    """Return the batch for ``step``: a seeded permutation prefix, or a draw
    with replacement when ``batch_size`` exceeds the number of examples."""
    random_state = np.random.RandomState((seed + step) % (2 ** 32))
    count = len(examples)
    if batch_size <= count:
        indices = random_state.permutation(count)[:batch_size]
    else:
        indices = random_state.randint(0, count, size = batch_size)

    return [examples[x] for x in indices]


def build_optimizer(model, train_config):
    """Create the RAdam optimizer over all trainable parameters."""
    return torch.optim.RAdam(model.parameters(), lr = train_config.learning_rate)


def compute_loss(output, targets, gate_loss_weight = 1.0):
    """Return the :class:`LossTerms` of a teacher-forced
    :class:`DecoderOutput <vocalfoley.decoder.model.DecoderOutput>`."""
    mel_loss = F.mse_loss(output.mel, targets)
    if output.mel_postnet is output.mel:
        postnet_loss = mel_loss.new_zeros(())
    else:
        postnet_loss = F.mse_loss(output.mel_postnet, targets)

    gate_targets = torch.zeros_like(output.gate_logits)
    gate_targets[:, -1] = 1.0
    gate_loss = F.binary_cross_entropy_with_logits(output.gate_logits, gate_targets)

    total = mel_loss + postnet_loss + gate_loss_weight * gate_loss

    return LossTerms(total, mel_loss, postnet_loss, gate_loss)


def train_step(model, optimizer, batch, train_config):
    """Run one optimization step with teacher forcing.

    :param batch: The examples of this step.
    :type batch: :class:`list <python:list>` of :class:`TrainingExample`

    :returns: The loss terms computed before the parameter update and the
      (pre-clipping) gradient norm.
    :rtype: :class:`StepResult`

    :raises NonFiniteLossError: if the loss is NaN or infinite
    :raises DecoderError: if the batch is empty or the update leaves
      non-finite parameters
    """
    tokens, class_ids, targets = collate(batch, dtype = model.dtype)

    model.train()
    optimizer.zero_grad()
    output = model(tokens, class_ids, targets)
    terms = compute_loss(output, targets, train_config.gate_loss_weight)

    if not torch.isfinite(terms.total):
        raise NonFiniteLossError('non-finite loss at step %d (mel=%s post=%s gate=%s)' % (
            model.step, terms.mel.item(), terms.postnet.item(), terms.gate.item()))

    terms.total.backward()
    grad_norm = torch.nn.utils.clip_grad_norm_(model.parameters(), train_config.grad_clip)
    optimizer.step()
    model.step += 1
    model.check_finite()

    return StepResult(terms.total.item(),
                      terms.mel.item(),
                      terms.postnet.item(),
                      terms.gate.item(),
                      float(grad_norm))


class Trainer(object):
    """Training loop with periodic checkpoints, a CSV loss log and resume.

    :param model: The decoder; its ``norm_stats``, ``labels``,
      ``codebook_hash`` and ``spectral_config`` should be set so that
      checkpoints are usable for inference.
    :type model: :class:`DecoderModel <vocalfoley.decoder.model.DecoderModel>`

    :param train_config: Training settings.
    :type train_config: :class:`TrainConfig <vocalfoley.config.TrainConfig>`

    :param examples: Training pairs.
    :type examples: :class:`list <python:list>` of :class:`TrainingExample`

    :param checkpoint_dir: Directory receiving ``step_XXXXXXXX.pt`` files.
    :type checkpoint_dir: path-like

    :param log_path: Loss log CSV. Defaults to ``train_log.csv`` inside
      ``checkpoint_dir``.
    :type log_path: path-like / :obj:`None <python:None>`
    """

    def __init__(self, model, train_config, examples, checkpoint_dir, log_path = None):
        if not examples:
            raise DecoderError('no training examples were supplied')

        self.model = model
        self.train_config = train_config
        self.examples = list(examples)
        self.checkpoint_dir = str(checkpoint_dir)
        self.log_path = str(log_path) if log_path else os.path.join(self.checkpoint_dir,
                                                                    'train_log.csv')
        self.optimizer = build_optimizer(model, train_config)
        self.history = []

    def _restore(self):
        path = latest_checkpoint(self.checkpoint_dir)
        if path is None:
            return 0

        step = restore_training_state(self.model, self.optimizer, path)
        if checkers.is_file(self.log_path):
            log = pd.read_csv(self.log_path)
            log = log[log['step'] < step]
            self.history = log.to_dict('records')
        logger.info('resumed from %s at step %d', path, step)

        return step

    def _checkpoint(self):
        save_model(self.model,
                   checkpoint_path(self.checkpoint_dir, self.model.step),
                   optimizer = self.optimizer)
        self.write_log()

    def write_log(self):
        """Write the loss log CSV."""
        path = ensure_writable(self.log_path)
        frame = pd.DataFrame(self.history, columns = LOSS_LOG_COLUMNS)
        frame['step'] = frame['step'].astype(int)
        frame.to_csv(path, index = False)

        return path

    def run(self, resume = True, max_steps = None):
        """Train until ``max_steps`` optimization steps have been taken.

        :param resume: Continue from the latest checkpoint in
          ``checkpoint_dir`` when one exists.
        :param max_steps: Overrides ``train_config.max_steps``.

        :returns: The loss log.
        :rtype: :class:`pandas.DataFrame`
        """
        config = self.train_config
        max_steps = validators.integer(max_steps if max_steps is not None else config.max_steps,
                                       minimum = 1)

        self.history = []
        start = self._restore() if resume else 0
        self.model.step = start
        if start >= max_steps:
            logger.info('checkpoint already at step %d; nothing to train', start)
            return pd.DataFrame(self.history, columns = LOSS_LOG_COLUMNS)

        for step in range(start, max_steps):
            batch = sample_batch(self.examples, config.batch_size, config.seed, step)
            torch.manual_seed(config.seed + step)
            result = train_step(self.model, self.optimizer, batch, config)

            self.history.append({
                'step': step,
                'loss': result.loss,
                'mel_loss': result.mel_loss,
                'postnet_loss': result.postnet_loss,
                'gate_loss': result.gate_loss,
                'grad_norm': result.grad_norm,
            })
            if step % config.log_every == 0 or step == max_steps - 1:
                logger.info('step=%d loss=%.6f mel=%.6f post=%.6f gate=%.6f',
                            step, result.loss, result.mel_loss, result.postnet_loss,
                            result.gate_loss)

            if self.model.step % config.checkpoint_every == 0 and self.model.step < max_steps:
                self._checkpoint()

        self._checkpoint()

        return pd.DataFrame(self.history, columns = LOSS_LOG_COLUMNS)


def _total_loss(model, tokens, class_ids, targets, gate_loss_weight, seed):
    with torch.random.fork_rng(devices = []):
        torch.manual_seed(seed)
        output = model(tokens, class_ids, targets)

    return compute_loss(output, targets, gate_loss_weight).total


def check_gradients(model,
                    batch,
                    gate_loss_weight = 1.0,
                    samples = 50,
                    epsilon = 1e-6,
                    tolerance = 1e-3,
                    seed = 0):
    """Compare analytic gradients with central finite differences.

    The check runs on a float64 copy of ``model`` in evaluation mode; pre-net
    dropout masks are held fixed by reseeding before every forward pass.

    :param samples: Number of individual parameter entries to check.
    :param epsilon: Finite-difference step.
    :param tolerance: Largest accepted relative error
      ``|analytic - numeric| / max(|analytic|, |numeric|, 1e-6)``.

    :rtype: :class:`GradientCheckResult`
    """
    samples = validators.integer(samples, minimum = 1)
    shadow = copy.deepcopy(model).double()
    shadow.eval()

    tokens, class_ids, targets = collate(batch, dtype = torch.float64)

    shadow.zero_grad()
    _total_loss(shadow, tokens, class_ids, targets, gate_loss_weight, seed).backward()

    parameters = [x for x in shadow.parameters() if x.requires_grad]
    sizes = np.array([x.numel() for x in parameters])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    random_state = np.random.RandomState(seed)
    chosen = random_state.choice(offsets[-1], size = min(samples, offsets[-1]), replace = False)

    worst = 0.0
    with torch.no_grad():
        for flat_index in chosen:
            owner = int(np.searchsorted(offsets, flat_index, side = 'right') - 1)
            parameter = parameters[owner]
            entry = int(flat_index - offsets[owner])
            values = parameter.data.view(-1)
            grad = parameter.grad
            analytic = 0.0 if grad is None else grad.view(-1)[entry].item()

            original = values[entry].item()
            values[entry] = original + epsilon
            plus = _total_loss(shadow, tokens, class_ids, targets, gate_loss_weight, seed).item()
            values[entry] = original - epsilon
            minus = _total_loss(shadow, tokens, class_ids, targets, gate_loss_weight, seed).item()
            values[entry] = original

            numeric = (plus - minus) / (2.0 * epsilon)
            error = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, error)

    logger.debug('gradient check: %d entries, max relative error %.3e', len(chosen), worst)

    return GradientCheckResult(worst, len(chosen), worst < tolerance)
