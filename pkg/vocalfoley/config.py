# -*- coding: utf-8 -*-

"""
************************
vocalfoley.config
************************

Configuration objects for every stage of the pipeline. Each section is a
:class:`ConfigurationMixin <vocalfoley._serialization_support.ConfigurationMixin>`
so it validates its values on assignment and round-trips through
:class:`dict <python:dict>`, JSON and YAML.

The complete annotated example lives in ``vocalfoley/data/default_config.yaml``.

"""
import os
from collections import OrderedDict

from validator_collection import validators, checkers

from vocalfoley._serialization_support import ConfigurationMixin
from vocalfoley.utilities import parse_yaml, parse_override, deep_update
from vocalfoley.errors import ConfigurationError

DATA_DIRECTORY = os.path.join(os.path.dirname(__file__), 'data')
DEFAULT_CONFIG_PATH = os.path.join(DATA_DIRECTORY, 'default_config.yaml')
TOY_CONFIG_PATH = os.path.join(DATA_DIRECTORY, 'toy_config.yaml')

EXTRACTOR_WEIGHTS_ENV = 'VOCALFOLEY_EXTRACTOR_WEIGHTS'
VOCODER_COMMAND_ENV = 'VOCALFOLEY_VOCODER_COMMAND'


def _choice(value, options, name):
    value = validators.string(value, allow_empty = False)
    if value not in options:
        raise ConfigurationError('%s must be one of %s, received "%s"' % (name,
                                                                         ', '.join(options),
                                                                         value))
    return value


def _number_list(value, name, minimum = None):
    if not checkers.is_iterable(value, forbid_literals = (str, bytes, dict)):
        raise ConfigurationError('%s must be a list of numbers' % name)

    return [validators.float(x, minimum = minimum) for x in value]


def _string_list(value, name, allow_empty = True):
    if value is None and allow_empty:
        return None
    if not checkers.is_iterable(value, forbid_literals = (str, bytes, dict)):
        raise ConfigurationError('%s must be a list of strings' % name)

    return [validators.string(x, allow_empty = False) for x in value]


class SpectralConfig(ConfigurationMixin):
    """Short-time Fourier transform and mel front-end settings."""

    _fields = (
        ('sample_rate', 22050),
        ('window', 'hamming'),
        ('win_length', 1024),
        ('hop_length', 256),
        ('fft_size', 1024),
        ('n_mels', 80),
        ('fmin', 0.0),
        ('fmax', None),
        ('log_floor', 1e-5),
        ('clip_seconds', 5.0),
    )

    @property
    def sample_rate(self):
        """Sample rate in Hz that every clip entering the front end must have.

        :rtype: :class:`int <python:int>`
        """
        return self._sample_rate

    @sample_rate.setter
    def sample_rate(self, value):
        self._sample_rate = validators.integer(value, minimum = 1)

    @property
    def window(self):
        """Analysis window name, as understood by ``scipy.signal.get_window``."""
        return self._window

    @window.setter
    def window(self, value):
        self._window = validators.string(value, allow_empty = False)

    @property
    def win_length(self):
        return self._win_length

    @win_length.setter
    def win_length(self, value):
        self._win_length = validators.integer(value, minimum = 1)

    @property
    def hop_length(self):
        return self._hop_length

    @hop_length.setter
    def hop_length(self, value):
        self._hop_length = validators.integer(value, minimum = 1)

    @property
    def fft_size(self):
        return self._fft_size

    @fft_size.setter
    def fft_size(self, value):
        self._fft_size = validators.integer(value, minimum = 2)

    @property
    def n_mels(self):
        return self._n_mels

    @n_mels.setter
    def n_mels(self, value):
        self._n_mels = validators.integer(value, minimum = 1)

    @property
    def fmin(self):
        return self._fmin

    @fmin.setter
    def fmin(self, value):
        self._fmin = validators.float(value, minimum = 0)

    @property
    def fmax(self):
        """Upper edge of the mel filterbank in Hz. :obj:`None <python:None>`
        means the Nyquist frequency.

        :rtype: :class:`float <python:float>` / :obj:`None <python:None>`
        """
        return self._fmax

    @fmax.setter
    def fmax(self, value):
        self._fmax = validators.float(value, allow_empty = True, minimum = 0)

    @property
    def log_floor(self):
        """Floor applied to mel energies before the natural log."""
        return self._log_floor

    @log_floor.setter
    def log_floor(self, value):
        value = validators.float(value)
        if value <= 0:
            raise ConfigurationError('log_floor must be positive, received %s' % value)
        self._log_floor = value

    @property
    def clip_seconds(self):
        """Fixed clip duration in seconds used for training targets and inputs."""
        return self._clip_seconds

    @clip_seconds.setter
    def clip_seconds(self, value):
        value = validators.float(value)
        if value <= 0:
            raise ConfigurationError('clip_seconds must be positive, received %s' % value)
        self._clip_seconds = value

    @property
    def nyquist(self):
        return self.sample_rate / 2.0

    @property
    def effective_fmax(self):
        """``fmax`` with :obj:`None <python:None>` resolved to Nyquist."""
        if self.fmax is None:
            return self.nyquist

        return self.fmax

    @property
    def n_bins(self):
        """Number of linear-frequency bins, ``fft_size / 2 + 1``."""
        return self.fft_size // 2 + 1

    def frames_for(self, n_samples):
        """Number of center-padded frames for a clip of ``n_samples`` samples.

        :rtype: :class:`int <python:int>`
        """
        return int(n_samples) // self.hop_length + 1

    @property
    def clip_samples(self):
        return int(round(self.clip_seconds * self.sample_rate))

    @property
    def clip_frames(self):
        """Frame count of a ``clip_seconds`` clip (431 with the defaults)."""
        return self.frames_for(self.clip_samples)

    def validate(self):
        """Check the relationships between fields.

        :raises ConfigurationError: if ``win_length > fft_size``,
          ``hop_length >= win_length``, ``n_mels >= fft_size / 2 + 1`` or
          ``fmax`` is not above ``fmin``
        """
        if self.win_length > self.fft_size:
            raise ConfigurationError('win_length (%s) exceeds fft_size (%s)' % (self.win_length,
                                                                               self.fft_size))
        if self.hop_length >= self.win_length:
            raise ConfigurationError('hop_length (%s) must be below win_length (%s)' % (
                self.hop_length, self.win_length))
        if self.n_mels >= self.n_bins:
            raise ConfigurationError('n_mels (%s) must be below fft_size / 2 + 1 (%s)' % (
                self.n_mels, self.n_bins))
        if self.effective_fmax <= self.fmin or self.effective_fmax > self.nyquist:
            raise ConfigurationError('fmax (%s) must lie in (fmin, Nyquist]' % self.effective_fmax)

        return self


class PathsConfig(ConfigurationMixin):
    """Locations of inputs and of every artifact the pipeline writes.

    Relative artifact paths are resolved against ``workdir``.
    """

    _fields = (
        ('workdir', 'work'),
        ('esc50_root', None),
        ('imitation_dir', None),
        ('labels', None),
        ('manifest', 'manifest.jsonl'),
        ('stats', 'mel_stats.vft'),
        ('codebook', 'codebook'),
        ('checkpoints', 'checkpoints'),
        ('train_log', 'train_log.csv'),
        ('eval_dir', 'eval'),
    )

    _inputs = ('esc50_root', 'imitation_dir', 'labels')

    @property
    def workdir(self):
        """Directory that receives every artifact."""
        return self._workdir

    @workdir.setter
    def workdir(self, value):
        self._workdir = validators.string(value, allow_empty = False)

    @property
    def esc50_root(self):
        """Root of the environmental sound collection (``meta/`` and ``audio/``)."""
        return self._esc50_root

    @esc50_root.setter
    def esc50_root(self, value):
        self._esc50_root = validators.string(value, allow_empty = True)

    @property
    def imitation_dir(self):
        """Root of the vocal imitation recordings, one folder per class."""
        return self._imitation_dir

    @imitation_dir.setter
    def imitation_dir(self, value):
        self._imitation_dir = validators.string(value, allow_empty = True)

    @property
    def labels(self):
        """Optional label-set YAML. :obj:`None <python:None>` uses the packaged set."""
        return self._labels

    @labels.setter
    def labels(self, value):
        self._labels = validators.string(value, allow_empty = True)

    @property
    def manifest(self):
        return self._manifest

    @manifest.setter
    def manifest(self, value):
        self._manifest = validators.string(value, allow_empty = False)

    @property
    def stats(self):
        return self._stats

    @stats.setter
    def stats(self, value):
        self._stats = validators.string(value, allow_empty = False)

    @property
    def codebook(self):
        """Codebook path stem; ``.vft`` and ``.yaml`` are appended."""
        return self._codebook

    @codebook.setter
    def codebook(self, value):
        self._codebook = validators.string(value, allow_empty = False)

    @property
    def checkpoints(self):
        return self._checkpoints

    @checkpoints.setter
    def checkpoints(self, value):
        self._checkpoints = validators.string(value, allow_empty = False)

    @property
    def train_log(self):
        return self._train_log

    @train_log.setter
    def train_log(self, value):
        self._train_log = validators.string(value, allow_empty = False)

    @property
    def eval_dir(self):
        return self._eval_dir

    @eval_dir.setter
    def eval_dir(self, value):
        self._eval_dir = validators.string(value, allow_empty = False)

    def resolve(self, name):
        """Return the absolute path of the artifact field ``name``.

        :raises ConfigurationError: if the field is unset
        """
        value = getattr(self, name)
        if value is None:
            raise ConfigurationError('paths.%s is not configured' % name)
        if name == 'workdir' or name in self._inputs or os.path.isabs(value):
            return os.path.abspath(value)

        return os.path.abspath(os.path.join(self.workdir, value))


class ExtractorConfig(ConfigurationMixin):
    """Selection and settings of the frame-level feature extractor."""

    _fields = (
        ('name', 'logmel-projection'),
        ('output_dim', 64),
        ('projection_seed', 0),
        ('delta_width', 9),
        ('weights_path', None),
        ('external_sample_rate', 16000),
        ('external_frame_rate', 100.0),
        ('external_output_dim', 2048),
    )

    @property
    def name(self):
        """Registered extractor name: ``logmel-projection`` (built in) or
        ``external`` (TorchScript adapter)."""
        return self._name

    @name.setter
    def name(self, value):
        self._name = _choice(value, ('logmel-projection', 'external'), 'extractor.name')

    @property
    def output_dim(self):
        return self._output_dim

    @output_dim.setter
    def output_dim(self, value):
        self._output_dim = validators.integer(value, minimum = 1)

    @property
    def projection_seed(self):
        return self._projection_seed

    @projection_seed.setter
    def projection_seed(self, value):
        self._projection_seed = validators.integer(value, minimum = 0)

    @property
    def delta_width(self):
        return self._delta_width

    @delta_width.setter
    def delta_width(self, value):
        value = validators.integer(value, minimum = 3)
        if value % 2 == 0:
            raise ConfigurationError('delta_width must be odd, received %s' % value)
        self._delta_width = value

    @property
    def weights_path(self):
        """Path of the external extractor's TorchScript file. Falls back to the
        ``VOCALFOLEY_EXTRACTOR_WEIGHTS`` environment variable when unset."""
        if self._weights_path is None:
            return os.environ.get(EXTRACTOR_WEIGHTS_ENV) or None
        return self._weights_path

    @weights_path.setter
    def weights_path(self, value):
        self._weights_path = validators.string(value, allow_empty = True)

    @property
    def external_sample_rate(self):
        return self._external_sample_rate

    @external_sample_rate.setter
    def external_sample_rate(self, value):
        self._external_sample_rate = validators.integer(value, minimum = 1)

    @property
    def external_frame_rate(self):
        return self._external_frame_rate

    @external_frame_rate.setter
    def external_frame_rate(self, value):
        value = validators.float(value)
        if value <= 0:
            raise ConfigurationError('external_frame_rate must be positive')
        self._external_frame_rate = value

    @property
    def external_output_dim(self):
        return self._external_output_dim

    @external_output_dim.setter
    def external_output_dim(self, value):
        self._external_output_dim = validators.integer(value, minimum = 1)

    def to_dict(self):
        as_dict = super(ExtractorConfig, self).to_dict()
        as_dict['weights_path'] = self._weights_path
        return as_dict


class QuantizerConfig(ConfigurationMixin):
    """k-means codebook settings."""

    _fields = (
        ('k', 200),
        ('iterations', 100),
        ('seed', 0),
    )

    @property
    def k(self):
        return self._k

    @k.setter
    def k(self, value):
        self._k = validators.integer(value, minimum = 1)

    @property
    def iterations(self):
        return self._iterations

    @iterations.setter
    def iterations(self, value):
        self._iterations = validators.integer(value, minimum = 1)

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value):
        self._seed = validators.integer(value, minimum = 0)


class FusionConfig(ConfigurationMixin):
    """Settings of the token / label fusion layer."""

    _fields = (
        ('mode', 'embedding'),
        ('embedding_dim', 256),
        ('fused_dim', 512),
        ('num_classes', 31),
    )

    @property
    def mode(self):
        """``embedding`` (learned token table) or ``centroid`` (codebook rows)."""
        return self._mode

    @mode.setter
    def mode(self, value):
        self._mode = _choice(value, ('embedding', 'centroid'), 'fusion.mode')

    @property
    def embedding_dim(self):
        return self._embedding_dim

    @embedding_dim.setter
    def embedding_dim(self, value):
        self._embedding_dim = validators.integer(value, minimum = 1)

    @property
    def fused_dim(self):
        """Width ``D`` of the conditioned sequence."""
        return self._fused_dim

    @fused_dim.setter
    def fused_dim(self, value):
        self._fused_dim = validators.integer(value, minimum = 1)

    @property
    def num_classes(self):
        return self._num_classes

    @num_classes.setter
    def num_classes(self, value):
        self._num_classes = validators.integer(value, minimum = 1)


class DecoderConfig(ConfigurationMixin):
    """Attention decoder architecture."""

    _fields = (
        ('prenet_layers', 2),
        ('prenet_dim', 256),
        ('prenet_dropout', 0.5),
        ('lstm_layers', 2),
        ('lstm_units', 1024),
        ('lstm_dropout', 0.1),
        ('attention_dim', 128),
        ('attention_filters', 32),
        ('attention_kernel_size', 31),
        ('mel_dim', 80),
        ('max_frames', 431),
        ('reduction_factor', 1),
        ('gate_threshold', 0.5),
        ('postnet', True),
        ('postnet_layers', 5),
        ('postnet_channels', 512),
        ('postnet_kernel_size', 5),
        ('postnet_dropout', 0.5),
    )

    @property
    def prenet_layers(self):
        return self._prenet_layers

    @prenet_layers.setter
    def prenet_layers(self, value):
        self._prenet_layers = validators.integer(value, minimum = 1)

    @property
    def prenet_dim(self):
        return self._prenet_dim

    @prenet_dim.setter
    def prenet_dim(self, value):
        self._prenet_dim = validators.integer(value, minimum = 1)

    @property
    def prenet_dropout(self):
        """Pre-net dropout probability, applied at training and inference time."""
        return self._prenet_dropout

    @prenet_dropout.setter
    def prenet_dropout(self, value):
        self._prenet_dropout = validators.float(value, minimum = 0, maximum = 0.99)

    @property
    def lstm_layers(self):
        """Number of recurrent layers: the attention LSTM plus
        ``lstm_layers - 1`` decoder LSTMs."""
        return self._lstm_layers

    @lstm_layers.setter
    def lstm_layers(self, value):
        self._lstm_layers = validators.integer(value, minimum = 2)

    @property
    def lstm_units(self):
        return self._lstm_units

    @lstm_units.setter
    def lstm_units(self, value):
        self._lstm_units = validators.integer(value, minimum = 1)

    @property
    def lstm_dropout(self):
        return self._lstm_dropout

    @lstm_dropout.setter
    def lstm_dropout(self, value):
        self._lstm_dropout = validators.float(value, minimum = 0, maximum = 0.99)

    @property
    def attention_dim(self):
        return self._attention_dim

    @attention_dim.setter
    def attention_dim(self, value):
        self._attention_dim = validators.integer(value, minimum = 1)

    @property
    def attention_filters(self):
        return self._attention_filters

    @attention_filters.setter
    def attention_filters(self, value):
        self._attention_filters = validators.integer(value, minimum = 1)

    @property
    def attention_kernel_size(self):
        return self._attention_kernel_size

    @attention_kernel_size.setter
    def attention_kernel_size(self, value):
        value = validators.integer(value, minimum = 1)
        if value % 2 == 0:
            raise ConfigurationError('attention_kernel_size must be odd, received %s' % value)
        self._attention_kernel_size = value

    @property
    def mel_dim(self):
        return self._mel_dim

    @mel_dim.setter
    def mel_dim(self, value):
        self._mel_dim = validators.integer(value, minimum = 1)

    @property
    def max_frames(self):
        """Hard cap on the number of decoded frames."""
        return self._max_frames

    @max_frames.setter
    def max_frames(self, value):
        self._max_frames = validators.integer(value, minimum = 1)

    @property
    def reduction_factor(self):
        return self._reduction_factor

    @reduction_factor.setter
    def reduction_factor(self, value):
        value = validators.integer(value, minimum = 1)
        if value != 1:
            raise ConfigurationError('only reduction_factor 1 is supported')
        self._reduction_factor = value

    @property
    def gate_threshold(self):
        return self._gate_threshold

    @gate_threshold.setter
    def gate_threshold(self, value):
        value = validators.float(value)
        if not 0 < value < 1:
            raise ConfigurationError('gate_threshold must lie in (0, 1), received %s' % value)
        self._gate_threshold = value

    @property
    def postnet(self):
        return self._postnet

    @postnet.setter
    def postnet(self, value):
        self._postnet = bool(value)

    @property
    def postnet_layers(self):
        return self._postnet_layers

    @postnet_layers.setter
    def postnet_layers(self, value):
        self._postnet_layers = validators.integer(value, minimum = 1)

    @property
    def postnet_channels(self):
        return self._postnet_channels

    @postnet_channels.setter
    def postnet_channels(self, value):
        self._postnet_channels = validators.integer(value, minimum = 1)

    @property
    def postnet_kernel_size(self):
        return self._postnet_kernel_size

    @postnet_kernel_size.setter
    def postnet_kernel_size(self, value):
        value = validators.integer(value, minimum = 1)
        if value % 2 == 0:
            raise ConfigurationError('postnet_kernel_size must be odd, received %s' % value)
        self._postnet_kernel_size = value

    @property
    def postnet_dropout(self):
        """Post-net dropout probability, applied in training mode only."""
        return self._postnet_dropout

    @postnet_dropout.setter
    def postnet_dropout(self, value):
        self._postnet_dropout = validators.float(value, minimum = 0, maximum = 0.99)


class TrainConfig(ConfigurationMixin):
    """Optimization settings of the fusion layer and decoder."""

    _fields = (
        ('optimizer', 'radam'),
        ('learning_rate', 1e-4),
        ('batch_size', 64),
        ('max_steps', 10000),
        ('seed', 0),
        ('teacher_forcing', True),
        ('gate_loss_weight', 1.0),
        ('grad_clip', 1.0),
        ('checkpoint_every', 500),
        ('log_every', 50),
        ('num_workers', 4),
    )

    @property
    def optimizer(self):
        return self._optimizer

    @optimizer.setter
    def optimizer(self, value):
        self._optimizer = _choice(value, ('radam',), 'train.optimizer')

    @property
    def learning_rate(self):
        return self._learning_rate

    @learning_rate.setter
    def learning_rate(self, value):
        value = validators.float(value)
        if value <= 0:
            raise ConfigurationError('learning_rate must be positive, received %s' % value)
        self._learning_rate = value

    @property
    def batch_size(self):
        return self._batch_size

    @batch_size.setter
    def batch_size(self, value):
        self._batch_size = validators.integer(value, minimum = 1)

    @property
    def max_steps(self):
        return self._max_steps

    @max_steps.setter
    def max_steps(self, value):
        self._max_steps = validators.integer(value, minimum = 1)

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value):
        self._seed = validators.integer(value, minimum = 0)

    @property
    def teacher_forcing(self):
        """Always ``True``; scheduled sampling is not supported."""
        return self._teacher_forcing

    @teacher_forcing.setter
    def teacher_forcing(self, value):
        if value is not True:
            raise ConfigurationError('teacher_forcing must remain enabled')
        self._teacher_forcing = True

    @property
    def gate_loss_weight(self):
        return self._gate_loss_weight

    @gate_loss_weight.setter
    def gate_loss_weight(self, value):
        self._gate_loss_weight = validators.float(value, minimum = 0)

    @property
    def grad_clip(self):
        """Global gradient-norm clipping threshold. ``0`` disables clipping."""
        return self._grad_clip

    @grad_clip.setter
    def grad_clip(self, value):
        self._grad_clip = validators.float(value, minimum = 0)

    @property
    def checkpoint_every(self):
        return self._checkpoint_every

    @checkpoint_every.setter
    def checkpoint_every(self, value):
        self._checkpoint_every = validators.integer(value, minimum = 1)

    @property
    def log_every(self):
        return self._log_every

    @log_every.setter
    def log_every(self, value):
        self._log_every = validators.integer(value, minimum = 1)

    @property
    def num_workers(self):
        """Threads used to prepare training pairs."""
        return self._num_workers

    @num_workers.setter
    def num_workers(self, value):
        self._num_workers = validators.integer(value, minimum = 1)


class VocoderConfig(ConfigurationMixin):
    """Mel-to-waveform conversion settings."""

    _fields = (
        ('kind', 'griffin_lim'),
        ('n_iter', 60),
        ('peak', 0.95),
        ('seed', 0),
        ('command', None),
        ('timeout', 600.0),
    )

    @property
    def kind(self):
        """``griffin_lim`` (built in) or ``external`` (command adapter)."""
        return self._kind

    @kind.setter
    def kind(self, value):
        self._kind = _choice(value, ('griffin_lim', 'external'), 'vocoder.kind')

    @property
    def n_iter(self):
        return self._n_iter

    @n_iter.setter
    def n_iter(self, value):
        self._n_iter = validators.integer(value, minimum = 1)

    @property
    def peak(self):
        return self._peak

    @peak.setter
    def peak(self, value):
        value = validators.float(value)
        if not 0 < value <= 1:
            raise ConfigurationError('peak must lie in (0, 1], received %s' % value)
        self._peak = value

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value):
        self._seed = validators.integer(value, minimum = 0)

    @property
    def command(self):
        """Command template with ``{mel_in}`` and ``{wav_out}`` placeholders.
        Falls back to ``VOCALFOLEY_VOCODER_COMMAND`` when unset."""
        if self._command is None:
            return os.environ.get(VOCODER_COMMAND_ENV) or None
        return self._command

    @command.setter
    def command(self, value):
        self._command = validators.string(value, allow_empty = True)

    @property
    def timeout(self):
        return self._timeout

    @timeout.setter
    def timeout(self, value):
        value = validators.float(value)
        if value <= 0:
            raise ConfigurationError('timeout must be positive')
        self._timeout = value

    def to_dict(self):
        as_dict = super(VocoderConfig, self).to_dict()
        as_dict['command'] = self._command
        return as_dict


class ControlsConfig(ConfigurationMixin):
    """Control sweeps and phase-vocoder settings."""

    _fields = (
        ('pitch_steps', [-6.0, 0.0, 6.0]),
        ('pitch_unit', 'semitone'),
        ('speed_rates', [0.5, 1.0, 1.5]),
        ('n_fft', 1024),
        ('hop_length', 256),
    )

    @property
    def pitch_steps(self):
        """Pitch-shift sweep; must contain ``0``, the reference value."""
        return self._pitch_steps

    @pitch_steps.setter
    def pitch_steps(self, value):
        value = _number_list(value, 'controls.pitch_steps')
        if 0.0 not in value:
            raise ConfigurationError('controls.pitch_steps must include 0')
        self._pitch_steps = value

    @property
    def pitch_unit(self):
        return self._pitch_unit

    @pitch_unit.setter
    def pitch_unit(self, value):
        self._pitch_unit = _choice(value, ('semitone', 'semioctave'), 'controls.pitch_unit')

    @property
    def speed_rates(self):
        """Speed sweep; must contain ``1``, the reference value."""
        return self._speed_rates

    @speed_rates.setter
    def speed_rates(self, value):
        value = _number_list(value, 'controls.speed_rates')
        if any(x <= 0 for x in value):
            raise ConfigurationError('controls.speed_rates must be positive')
        if 1.0 not in value:
            raise ConfigurationError('controls.speed_rates must include 1')
        self._speed_rates = value

    @property
    def n_fft(self):
        return self._n_fft

    @n_fft.setter
    def n_fft(self, value):
        self._n_fft = validators.integer(value, minimum = 4)

    @property
    def hop_length(self):
        return self._hop_length

    @hop_length.setter
    def hop_length(self, value):
        self._hop_length = validators.integer(value, minimum = 1)


class EvaluationConfig(ConfigurationMixin):
    """Objective evaluation settings."""

    _fields = (
        ('centroid_gate_db', 40.0),
        ('duration_gate_db', 35.0),
        ('max_samples', None),
        ('spectrogram_samples', 2),
        ('write_audio', False),
    )

    @property
    def centroid_gate_db(self):
        return self._centroid_gate_db

    @centroid_gate_db.setter
    def centroid_gate_db(self, value):
        self._centroid_gate_db = validators.float(value, minimum = 0)

    @property
    def duration_gate_db(self):
        return self._duration_gate_db

    @duration_gate_db.setter
    def duration_gate_db(self, value):
        self._duration_gate_db = validators.float(value, minimum = 0)

    @property
    def max_samples(self):
        """Limit on evaluated manifest entries; :obj:`None <python:None>` for all."""
        return self._max_samples

    @max_samples.setter
    def max_samples(self, value):
        self._max_samples = validators.integer(value, allow_empty = True, minimum = 1)

    @property
    def spectrogram_samples(self):
        return self._spectrogram_samples

    @spectrogram_samples.setter
    def spectrogram_samples(self, value):
        self._spectrogram_samples = validators.integer(value, minimum = 0)

    @property
    def write_audio(self):
        return self._write_audio

    @write_audio.setter
    def write_audio(self, value):
        self._write_audio = bool(value)


class DatasetConfig(ConfigurationMixin):
    """Dataset structure and split rule."""

    _fields = (
        ('class_subset', None),
        ('train_imitators', ['f1', 'f2', 'm1', 'm2']),
        ('eval_imitators', ['f3', 'm3']),
        ('per_class_train', 35),
        ('per_class_eval', 5),
        ('esc50_csv', 'meta/esc50.csv'),
        ('esc50_audio', 'audio'),
        ('imitation_sample_rate', 48000),
    )

    @property
    def class_subset(self):
        """Ordered class names. :obj:`None <python:None>` uses the label set."""
        return self._class_subset

    @class_subset.setter
    def class_subset(self, value):
        self._class_subset = _string_list(value, 'dataset.class_subset')

    @property
    def train_imitators(self):
        return self._train_imitators

    @train_imitators.setter
    def train_imitators(self, value):
        self._train_imitators = _string_list(value, 'dataset.train_imitators',
                                             allow_empty = False)

    @property
    def eval_imitators(self):
        return self._eval_imitators

    @eval_imitators.setter
    def eval_imitators(self, value):
        self._eval_imitators = _string_list(value, 'dataset.eval_imitators',
                                            allow_empty = False)

    @property
    def per_class_train(self):
        return self._per_class_train

    @per_class_train.setter
    def per_class_train(self, value):
        self._per_class_train = validators.integer(value, minimum = 1)

    @property
    def per_class_eval(self):
        return self._per_class_eval

    @per_class_eval.setter
    def per_class_eval(self, value):
        self._per_class_eval = validators.integer(value, minimum = 1)

    @property
    def esc50_csv(self):
        return self._esc50_csv

    @esc50_csv.setter
    def esc50_csv(self, value):
        self._esc50_csv = validators.string(value, allow_empty = False)

    @property
    def esc50_audio(self):
        return self._esc50_audio

    @esc50_audio.setter
    def esc50_audio(self, value):
        self._esc50_audio = validators.string(value, allow_empty = False)

    @property
    def imitation_sample_rate(self):
        """Expected recording rate of imitations; informational, files are
        resampled whatever their rate."""
        return self._imitation_sample_rate

    @imitation_sample_rate.setter
    def imitation_sample_rate(self, value):
        self._imitation_sample_rate = validators.integer(value, minimum = 1)


class PipelineConfig(ConfigurationMixin):
    """Root configuration holding every section."""

    _fields = (
        ('seed', 0),
    )

    _sections = (
        ('paths', PathsConfig),
        ('spectral', SpectralConfig),
        ('extractor', ExtractorConfig),
        ('quantizer', QuantizerConfig),
        ('fusion', FusionConfig),
        ('decoder', DecoderConfig),
        ('train', TrainConfig),
        ('vocoder', VocoderConfig),
        ('controls', ControlsConfig),
        ('evaluation', EvaluationConfig),
        ('dataset', DatasetConfig),
    )

    @property
    def seed(self):
        """Global seed; ``--seed`` on the command line overrides every
        section seed with it."""
        return self._seed

    @seed.setter
    def seed(self, value):
        self._seed = validators.integer(value, minimum = 0)

    def apply_seed(self, seed):
        """Propagate ``seed`` to every section that carries one."""
        self.seed = seed
        self.quantizer.seed = seed
        self.train.seed = seed
        self.vocoder.seed = seed

        return self

    def validate(self):
        """Check cross-section relationships.

        :raises ConfigurationError: on inconsistent sections
        """
        self.spectral.validate()
        if self.decoder.mel_dim != self.spectral.n_mels:
            raise ConfigurationError('decoder.mel_dim (%s) differs from spectral.n_mels (%s)' % (
                self.decoder.mel_dim, self.spectral.n_mels))
        if self.decoder.max_frames < 1:
            raise ConfigurationError('decoder.max_frames must be positive')
        overlap = set(self.dataset.train_imitators) & set(self.dataset.eval_imitators)
        if overlap:
            raise ConfigurationError('imitators in both splits: %s' % ', '.join(sorted(overlap)))

        return self

    @classmethod
    def load(cls, path = None, toy = False, overrides = None):
        """Build the configuration from the packaged defaults, the optional toy
        preset, an optional user file and ``section.key=value`` overrides, in
        that order.

        :param path: Optional YAML file supplied by the user.
        :type path: Path-like / :obj:`None <python:None>`

        :param toy: If ``True``, applies the packaged toy preset.
        :type toy: :class:`bool <python:bool>`

        :param overrides: ``section.key=value`` strings.
        :type overrides: iterable of :class:`str <python:str>` / :obj:`None <python:None>`

        :rtype: :class:`PipelineConfig`

        :raises ConfigurationError: if ``path`` does not exist or values are invalid
        :raises ExtraKeyError: if any layer contains unknown keys
        """
        merged = OrderedDict(parse_yaml(DEFAULT_CONFIG_PATH) or {})
        if toy:
            deep_update(merged, parse_yaml(TOY_CONFIG_PATH) or {})

        if path is not None:
            if not checkers.is_file(str(path)):
                raise ConfigurationError('configuration file not found: %s' % path)
            deep_update(merged, parse_yaml(str(path)) or {})

        for override in overrides or []:
            deep_update(merged, parse_override(override))

        config = cls.new_from_dict(merged)
        config.validate()

        return config
