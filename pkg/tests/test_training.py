# -*- coding: utf-8 -*-

"""
***********************************
tests.test_training
***********************************

Tests for the training loop defined in :ref:`vocalfoley.decoder.training`.

"""
import os
import warnings

import numpy as np
import pandas as pd
import pytest
import torch

from tests.fixtures import tiny_model, tiny_examples, tiny_train_config, build_tiny_model, \
    build_tiny_examples, sine, harmonic, burst, short_spectral_config, TINY_K, TINY_MEL_DIM, \
    TINY_FRAMES, TOY_CLASSES

from vocalfoley.config import TrainConfig
from vocalfoley.decoder import TrainingExample, Trainer, train_step, build_optimizer, \
    check_gradients, latest_checkpoint, condition_tokens, synthesize_mel, DecoderOutput
from vocalfoley.decoder.training import collate, sample_batch, compute_loss, LOSS_LOG_COLUMNS
from vocalfoley.dsp_features import mel_spectrogram, compute_mel_stats, normalize_mel
from vocalfoley.labels import EventLabel
from vocalfoley.metrics import mel_similarity
from vocalfoley.errors import DecoderError, DimensionMismatchError, NonFiniteLossError

OVERFIT_FRAMES = 16


@pytest.mark.parametrize('tokens, target, fails', [
    ([0, 1, 2], np.zeros((3, 8)), False),
    ([0, 1], np.zeros((3, 8)), True),
    ([0, 1, 2], np.zeros(3), True),
])
def test_TrainingExample(tokens, target, fails):
    if not fails:
        example = TrainingExample(tokens, 1, target)
        assert len(example) == 3
        assert example.tokens.dtype == np.int64
    else:
        with pytest.raises(DimensionMismatchError):
            example = TrainingExample(tokens, 1, target)


def test_collate(tiny_examples):
    tokens, class_ids, targets = collate(tiny_examples)

    assert tuple(tokens.shape) == (4, TINY_FRAMES)
    assert class_ids.tolist() == [0, 1, 2, 0]
    assert tuple(targets.shape) == (4, TINY_FRAMES, TINY_MEL_DIM)
    assert targets.dtype == torch.float32

    with pytest.raises(DecoderError):
        collate([])

    with pytest.raises(DecoderError):
        collate(tiny_examples + build_tiny_examples(count = 1, frames = TINY_FRAMES + 1))


def test_sample_batch(tiny_examples):
    first = sample_batch(tiny_examples, 2, seed = 0, step = 5)
    second = sample_batch(tiny_examples, 2, seed = 0, step = 5)

    assert [id(x) for x in first] == [id(x) for x in second]
    assert len(set(id(x) for x in first)) == 2

    oversized = sample_batch(tiny_examples, 10, seed = 0, step = 0)
    assert len(oversized) == 10


def test_train_step(tiny_model, tiny_examples, tiny_train_config):
    optimizer = build_optimizer(tiny_model, tiny_train_config)
    before = [x.detach().clone() for x in tiny_model.parameters()]

    result = train_step(tiny_model, optimizer, tiny_examples[:2], tiny_train_config)

    assert np.isfinite(result.loss)
    assert result.loss == pytest.approx(result.mel_loss + result.postnet_loss +
                                        result.gate_loss, rel = 1e-5)
    assert result.grad_norm > 0
    assert tiny_model.step == 1
    assert any(not torch.equal(old, new) for old, new in zip(before, tiny_model.parameters()))


def test_train_step_non_finite(tiny_model, tiny_train_config):
    target = np.zeros((TINY_FRAMES, TINY_MEL_DIM))
    target[0, 0] = np.nan
    batch = [TrainingExample(np.zeros(TINY_FRAMES, dtype = np.int64), 0, target)]
    optimizer = build_optimizer(tiny_model, tiny_train_config)

    with pytest.raises(NonFiniteLossError):
        train_step(tiny_model, optimizer, batch, tiny_train_config)


def test_check_gradients(tiny_model, tiny_examples):
    result = check_gradients(tiny_model, tiny_examples[:2], samples = 40, seed = 1)

    assert result.checked == 40
    assert result.passed, result.max_relative_error
    assert next(tiny_model.parameters()).dtype == torch.float32


def test_Trainer_run(tmp_path, tiny_model, tiny_examples, tiny_train_config):
    checkpoints = str(tmp_path / 'checkpoints')
    trainer = Trainer(tiny_model, tiny_train_config, tiny_examples, checkpoints)

    history = trainer.run(resume = False)

    assert isinstance(history, pd.DataFrame)
    assert list(history.columns) == LOSS_LOG_COLUMNS
    assert history['step'].tolist() == [0, 1, 2, 3]
    assert np.all(np.isfinite(history['loss']))
    assert sorted(os.listdir(checkpoints)) == ['step_00000002.pt', 'step_00000004.pt',
                                               'train_log.csv']
    assert pd.read_csv(os.path.join(checkpoints, 'train_log.csv'))['step'].tolist() == \
        [0, 1, 2, 3]


def test_Trainer_resume_matches_uninterrupted(tmp_path, tiny_examples, tiny_train_config):
    straight = build_tiny_model(seed = 0)
    Trainer(straight, tiny_train_config, tiny_examples,
            str(tmp_path / 'straight')).run(resume = False, max_steps = 4)

    interrupted = build_tiny_model(seed = 0)
    Trainer(interrupted, tiny_train_config, tiny_examples,
            str(tmp_path / 'resumed')).run(resume = False, max_steps = 2)

    resumed = build_tiny_model(seed = 9)
    history = Trainer(resumed, tiny_train_config, tiny_examples,
                      str(tmp_path / 'resumed')).run(resume = True, max_steps = 4)

    assert history['step'].tolist() == [0, 1, 2, 3]
    assert resumed.step == 4
    for left, right in zip(straight.state_dict().values(), resumed.state_dict().values()):
        assert torch.allclose(left.double(), right.double(), atol = 1e-6)


def test_Trainer_nothing_to_do(tmp_path, tiny_model, tiny_examples, tiny_train_config):
    checkpoints = str(tmp_path / 'checkpoints')
    Trainer(tiny_model, tiny_train_config, tiny_examples, checkpoints).run(resume = False)
    latest = latest_checkpoint(checkpoints)

    history = Trainer(tiny_model, tiny_train_config, tiny_examples,
                      checkpoints).run(resume = True, max_steps = 3)

    assert history['step'].tolist() == [0, 1, 2, 3]
    assert latest_checkpoint(checkpoints) == latest


def test_Trainer_no_examples(tmp_path, tiny_model, tiny_train_config):
    with pytest.raises(DecoderError):
        Trainer(tiny_model, tiny_train_config, [], str(tmp_path))


def test_zero_predictor_loss_on_normalized_targets(short_spectral_config):
    mels = [mel_spectrogram(clip, short_spectral_config)
            for clip in (sine(440), harmonic(220), burst(), burst(onset = 0.5, seed = 2))]
    stats = compute_mel_stats(mels)
    targets = torch.as_tensor(np.stack([normalize_mel(x, stats).values for x in mels]))
    zeros = torch.zeros_like(targets)
    output = DecoderOutput(zeros, zeros, torch.zeros(targets.shape[:2], dtype = targets.dtype),
                           None)

    terms = compute_loss(output, targets)

    assert float(terms.mel) == pytest.approx(1.0, abs = 0.1)
    assert float(terms.postnet) == 0.0


def overfit_examples(count = 8, frames = OVERFIT_FRAMES, seed = 0):
    """Smooth per-bin sinusoids with random token sequences and labels."""
    random_state = np.random.RandomState(seed)
    t = np.arange(frames)[:, np.newaxis] / float(frames)
    examples = []
    for index in range(count):
        rates = random_state.uniform(0.5, 2.0, TINY_MEL_DIM)
        phases = random_state.uniform(0.0, 2.0 * np.pi, TINY_MEL_DIM)
        examples.append(TrainingExample(random_state.randint(0, TINY_K, size = frames),
                                        index % len(TOY_CLASSES),
                                        np.sin(2.0 * np.pi * rates * t + phases)))

    return examples


@pytest.mark.slow
def test_overfit_eight_pairs(tmp_path):
    model = build_tiny_model(seed = 0, lstm_units = 256, fusion_kwargs = {'fused_dim': 128})
    examples = overfit_examples()
    config = TrainConfig(learning_rate = 1e-3,
                         batch_size = 8,
                         max_steps = 2000,
                         checkpoint_every = 2000,
                         log_every = 200,
                         num_workers = 1)

    history = Trainer(model, config, examples, str(tmp_path)).run(resume = False)

    assert history['mel_loss'].iloc[-20:].mean() < 0.1 * history['mel_loss'].iloc[0]

    correlations = []
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        for example in examples:
            label = EventLabel(example.class_id, TOY_CLASSES[example.class_id])
            cond = condition_tokens(model, example.tokens, label)
            mel = synthesize_mel(model, cond, max_frames = OVERFIT_FRAMES)
            correlations.append(mel_similarity(mel, example.target).correlation)

    assert np.mean(correlations) >= 0.8
