# -*- coding: utf-8 -*-

from vocalfoley.decoder.model import DecoderModel, DecoderOutput, TeacherForcedOutput, \
    forward_teacher_forced, synthesize_mel, condition_tokens, fusion_params
from vocalfoley.decoder.checkpoint import save_model, load_model, load_checkpoint, \
    latest_checkpoint, restore_training_state
from vocalfoley.decoder.training import TrainingExample, StepResult, Trainer, train_step, \
    compute_loss, build_optimizer, check_gradients
