# -*- coding: utf-8 -*-

"""
****************************
vocalfoley.decoder.model
****************************

Autoregressive attention decoder that turns a conditioned sequence into a
mel spectrogram, one frame per step.

Each step feeds the previous frame through the pre-net, updates the attention
LSTM, attends over the conditioned sequence with location-sensitive attention,
updates the decoder LSTM stack and projects ``[state, context]`` to the next
mel frame and a stop-gate logit. An optional post-net adds a residual
correction to the whole predicted spectrogram.

"""
import logging
import warnings
from collections import namedtuple

import numpy as np
import torch
from torch import nn

from vocalfoley.config import SpectralConfig
from vocalfoley.conditioning import ConditionedSequence, FusionParams
from vocalfoley.dsp_features import MelSpectrogram, denormalize_mel
from vocalfoley.errors import DecoderError, MaxFramesWarning
from vocalfoley.decoder._layers import FusionLayer, Prenet, LocationSensitiveAttention, \
    Postnet, linear_layer

logger = logging.getLogger(__name__)

DecoderOutput = namedtuple('DecoderOutput', ['mel', 'mel_postnet', 'gate_logits', 'alignments'])
TeacherForcedOutput = namedtuple('TeacherForcedOutput', ['mel', 'gate_logits', 'alignments'])


class DecoderModel(nn.Module):
    """Fusion layer plus attention decoder.

    :param decoder_config: Architecture settings.
    :type decoder_config: :class:`DecoderConfig <vocalfoley.config.DecoderConfig>`

    :param fusion_config: Fusion settings.
    :type fusion_config: :class:`FusionConfig <vocalfoley.config.FusionConfig>`

    :param k: Codebook size.
    :type k: :class:`int <python:int>`

    :param centroids: ``k x E`` codebook matrix; required when
      ``fusion_config.mode`` is ``centroid``.

    Besides the parameters the model carries the artifacts needed at inference
    time: :attr:`norm_stats`, :attr:`labels`, :attr:`codebook_hash` and
    :attr:`spectral_config`, all restored from checkpoints.
    """

    def __init__(self, decoder_config, fusion_config, k, centroids = None):
        super(DecoderModel, self).__init__()
        self.decoder_config = decoder_config
        self.fusion_config = fusion_config
        self.k = k

        memory_dim = fusion_config.fused_dim
        units = decoder_config.lstm_units
        mel_dim = decoder_config.mel_dim

        self.fusion = FusionLayer(k,
                                  fusion_config.num_classes,
                                  memory_dim,
                                  mode = fusion_config.mode,
                                  embedding_dim = fusion_config.embedding_dim,
                                  centroids = centroids)
        self.prenet = Prenet(mel_dim,
                             [decoder_config.prenet_dim] * decoder_config.prenet_layers,
                             dropout = decoder_config.prenet_dropout)
        self.attention_rnn = nn.LSTMCell(decoder_config.prenet_dim + memory_dim, units)
        self.attention = LocationSensitiveAttention(units,
                                                    memory_dim,
                                                    decoder_config.attention_dim,
                                                    decoder_config.attention_filters,
                                                    decoder_config.attention_kernel_size)
        self.decoder_rnns = nn.ModuleList([
            nn.LSTMCell(units + memory_dim if index == 0 else units, units)
            for index in range(decoder_config.lstm_layers - 1)
        ])
        self.linear_projection = linear_layer(units + memory_dim, mel_dim)
        self.gate_layer = linear_layer(units + memory_dim, 1, w_init_gain = 'sigmoid')

        if decoder_config.postnet:
            self.postnet = Postnet(mel_dim,
                                   decoder_config.postnet_channels,
                                   decoder_config.postnet_kernel_size,
                                   decoder_config.postnet_layers,
                                   dropout = decoder_config.postnet_dropout)
        else:
            self.postnet = None

        self.norm_stats = None
        self.labels = None
        self.codebook_hash = None
        self.spectral_config = None
        self.step = 0

    @property
    def dtype(self):
        return next(self.parameters()).dtype

    def check_finite(self):
        """:raises DecoderError: if any parameter holds a non-finite value"""
        for name, parameter in self.named_parameters():
            if not torch.isfinite(parameter).all():
                raise DecoderError('parameter %s contains non-finite values' % name)

    def condition(self, tokens, class_ids, label_only = False):
        """``(B, T)`` tokens and ``(B, )`` class ids to the ``(B, T, D)``
        conditioned sequence."""
        return self.fusion(tokens, class_ids, label_only = label_only)

    def _initial_state(self, memory):
        batch, max_time = memory.shape[0], memory.shape[1]
        units = self.decoder_config.lstm_units

        def zeros(*shape):
            return memory.new_zeros(shape)

        return {
            'attention_hidden': zeros(batch, units),
            'attention_cell': zeros(batch, units),
            'decoder': [(zeros(batch, units), zeros(batch, units)) for _ in self.decoder_rnns],
            'weights': zeros(batch, max_time),
            'weights_cum': zeros(batch, max_time),
            'context': zeros(batch, memory.shape[2]),
        }

    def _step(self, prenet_frame, state, memory, processed_memory):
        dropout = self.decoder_config.lstm_dropout

        cell_input = torch.cat([prenet_frame, state['context']], dim = -1)
        attention_hidden, attention_cell = self.attention_rnn(
            cell_input, (state['attention_hidden'], state['attention_cell']))
        attention_hidden = nn.functional.dropout(attention_hidden, dropout, self.training)

        weights_cat = torch.stack([state['weights'], state['weights_cum']], dim = 1)
        context, weights = self.attention(attention_hidden, memory, processed_memory, weights_cat)

        layer_input = torch.cat([attention_hidden, context], dim = -1)
        decoder_states = []
        for rnn, (hidden, cell) in zip(self.decoder_rnns, state['decoder']):
            hidden, cell = rnn(layer_input, (hidden, cell))
            hidden = nn.functional.dropout(hidden, dropout, self.training)
            decoder_states.append((hidden, cell))
            layer_input = hidden

        projection_input = torch.cat([layer_input, context], dim = -1)
        frame = self.linear_projection(projection_input)
        gate = self.gate_layer(projection_input).squeeze(1)

        new_state = {
            'attention_hidden': attention_hidden,
            'attention_cell': attention_cell,
            'decoder': decoder_states,
            'weights': weights,
            'weights_cum': state['weights_cum'] + weights,
            'context': context,
        }

        return frame, gate, new_state

    def _apply_postnet(self, mel):
        if self.postnet is None:
            return mel

        return mel + self.postnet(mel.transpose(1, 2)).transpose(1, 2)

    def decode_teacher_forced(self, memory, targets):
        """Teacher-forced decoding.

        :param memory: ``(B, T_in, D)`` conditioned sequence.
        :param targets: ``(B, T, mel_dim)`` target frames; frame ``t`` is
          predicted from target frame ``t - 1`` (zeros at ``t = 0``).

        :rtype: :class:`DecoderOutput`
        """
        go_frame = targets.new_zeros((targets.shape[0], 1, targets.shape[2]))
        inputs = torch.cat([go_frame, targets[:, :-1]], dim = 1)
        prenet_inputs = self.prenet(inputs)

        processed_memory = self.attention.memory_layer(memory)
        state = self._initial_state(memory)

        frames, gates, alignments = [], [], []
        for index in range(targets.shape[1]):
            frame, gate, state = self._step(prenet_inputs[:, index], state, memory,
                                            processed_memory)
            frames.append(frame)
            gates.append(gate)
            alignments.append(state['weights'])

        mel = torch.stack(frames, dim = 1)

        return DecoderOutput(mel,
                             self._apply_postnet(mel),
                             torch.stack(gates, dim = 1),
                             torch.stack(alignments, dim = 1))

    def forward(self, tokens, class_ids, targets, label_only = False):
        """Condition and decode with teacher forcing; used by training."""
        memory = self.condition(tokens, class_ids, label_only = label_only)

        return self.decode_teacher_forced(memory, targets)

    def infer(self, memory, max_frames, gate_threshold):
        """Free-running decoding of a single sequence.

        :param memory: ``(1, T_in, D)`` conditioned sequence.

        :returns: The :class:`DecoderOutput` and whether the gate fired before
          ``max_frames``.
        :rtype: :class:`tuple <python:tuple>`
        """
        processed_memory = self.attention.memory_layer(memory)
        state = self._initial_state(memory)
        frame = memory.new_zeros((memory.shape[0], self.decoder_config.mel_dim))

        frames, gates, alignments = [], [], []
        stopped = False
        for _ in range(max_frames):
            frame, gate, state = self._step(self.prenet(frame), state, memory, processed_memory)
            frames.append(frame)
            gates.append(gate)
            alignments.append(state['weights'])
            if torch.sigmoid(gate).item() > gate_threshold:
                stopped = True
                break

        mel = torch.stack(frames, dim = 1)

        return DecoderOutput(mel,
                             self._apply_postnet(mel),
                             torch.stack(gates, dim = 1),
                             torch.stack(alignments, dim = 1)), stopped


def _memory_tensor(model, cond):
    values = cond.values if isinstance(cond, ConditionedSequence) else np.asarray(cond)
    if values.ndim != 2:
        raise DecoderError('conditioned sequence must be T x D, received shape %s' % (
            values.shape, ))
    if values.shape[1] != model.fusion_config.fused_dim:
        raise DecoderError('conditioned sequence has width %d, decoder expects %d' % (
            values.shape[1], model.fusion_config.fused_dim))

    return torch.as_tensor(values, dtype = model.dtype).unsqueeze(0)


def _spectral_config(model):
    if model.spectral_config is not None:
        return model.spectral_config

    return SpectralConfig(n_mels = model.decoder_config.mel_dim)


def forward_teacher_forced(model, cond, target, seed = 0):
    """Teacher-forced prediction for one conditioned sequence.

    Runs without gradients in evaluation mode; pre-net dropout (if enabled)
    draws from a generator seeded with ``seed``.

    :param model: The decoder.
    :type model: :class:`DecoderModel`

    :param cond: ``T x D`` conditioned sequence.
    :type cond: :class:`ConditionedSequence <vocalfoley.conditioning.ConditionedSequence>`

    :param target: ``T x mel_dim`` (normalized) target.
    :type target: :class:`MelSpectrogram <vocalfoley.dsp_features.MelSpectrogram>` /
      array-like

    :returns: Predicted ``T x mel_dim`` frames (after the post-net when
      enabled), ``T`` gate logits and ``T x T`` attention weights.
    :rtype: :class:`TeacherForcedOutput`

    :raises DecoderError: if the frame counts differ or the parameters are not
      finite
    """
    model.check_finite()
    memory = _memory_tensor(model, cond)

    target_values = np.asarray(getattr(target, 'values', target))
    if target_values.ndim != 2 or target_values.shape[1] != model.decoder_config.mel_dim:
        raise DecoderError('target must be T x %d, received shape %s' % (
            model.decoder_config.mel_dim, target_values.shape))
    if target_values.shape[0] != memory.shape[1]:
        raise DecoderError('conditioned sequence has %d frames, target has %d' % (
            memory.shape[1], target_values.shape[0]))

    targets = torch.as_tensor(target_values, dtype = model.dtype).unsqueeze(0)

    was_training = model.training
    model.eval()
    try:
        with torch.no_grad(), torch.random.fork_rng(devices = []):
            torch.manual_seed(seed)
            output = model.decode_teacher_forced(memory, targets)
    finally:
        model.train(was_training)

    return TeacherForcedOutput(output.mel_postnet[0].double().numpy(),
                               output.gate_logits[0].double().numpy(),
                               output.alignments[0].double().numpy())


def synthesize_mel(model, cond, seed = 0, max_frames = None):
    """Autoregressively decode a mel spectrogram and denormalize it.

    Decoding stops after the first frame whose gate probability exceeds
    ``gate_threshold`` or after ``max_frames`` frames, in which case a
    :class:`MaxFramesWarning <vocalfoley.errors.MaxFramesWarning>` is issued.

    :param max_frames: Overrides ``decoder_config.max_frames`` when supplied; it
      can only lower the cap.

    :rtype: :class:`MelSpectrogram <vocalfoley.dsp_features.MelSpectrogram>`

    :raises DecoderError: if the model has no normalization statistics (it was
      neither trained nor loaded) or its parameters are not finite
    """
    if model.norm_stats is None:
        raise DecoderError('decoder has no normalization statistics; train it or load a '
                           'checkpoint first')
    model.check_finite()

    cap = model.decoder_config.max_frames
    if max_frames is not None:
        cap = max(1, min(cap, int(max_frames)))

    memory = _memory_tensor(model, cond)

    was_training = model.training
    model.eval()
    try:
        with torch.no_grad(), torch.random.fork_rng(devices = []):
            torch.manual_seed(seed)
            output, stopped = model.infer(memory, cap, model.decoder_config.gate_threshold)
    finally:
        model.train(was_training)

    if not stopped:
        warnings.warn('decoding reached max_frames (%d) before the stop gate fired' % cap,
                      MaxFramesWarning)

    values = output.mel_postnet[0].double().numpy()
    logger.debug('decoded %d frames (gate fired: %s)', values.shape[0], stopped)

    normalized = MelSpectrogram(values, config = _spectral_config(model), normalized = True)

    return denormalize_mel(normalized, model.norm_stats)


def condition_tokens(model, tokens, label, label_only = False):
    """Apply the model's trained fusion layer to one token sequence.

    :param tokens: Token ids of the imitation.
    :type tokens: :class:`TokenSequence <vocalfoley.quantizer.TokenSequence>` /
      array-like

    :param label: The sound event label.
    :type label: :class:`EventLabel <vocalfoley.labels.EventLabel>`

    :rtype: :class:`ConditionedSequence <vocalfoley.conditioning.ConditionedSequence>`
    """
    ids = np.asarray(getattr(tokens, 'tokens', tokens), dtype = np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= model.k):
        raise DecoderError('tokens must lie in [0, %d)' % model.k)

    token_tensor = torch.as_tensor(ids).unsqueeze(0)
    class_tensor = torch.as_tensor([label.class_id], dtype = torch.int64)
    if label.class_id >= model.fusion_config.num_classes:
        raise DecoderError('class id %d exceeds the %d classes the decoder was built for' % (
            label.class_id, model.fusion_config.num_classes))

    with torch.no_grad():
        values = model.condition(token_tensor, class_tensor, label_only = label_only)

    return ConditionedSequence(values[0].double().numpy(),
                               label = label,
                               tokens = tokens,
                               label_only = label_only)


def fusion_params(model):
    """Export the trained fusion projection as
    :class:`FusionParams <vocalfoley.conditioning.FusionParams>` for use with
    :func:`vocalfoley.conditioning.fuse`.

    :returns: The parameters and the ``k x E_in`` token table (the learned
      embedding table or the codebook centroids).
    :rtype: :class:`tuple <python:tuple>`
    """
    projection = model.fusion.projection
    params = FusionParams(projection.weight.detach().double().numpy(),
                          projection.bias.detach().double().numpy(),
                          num_classes = model.fusion_config.num_classes)
    if model.fusion.mode == 'embedding':
        table = model.fusion.token_table.weight.detach().double().numpy()
    else:
        table = model.fusion.centroids.detach().double().numpy()

    return params, table
