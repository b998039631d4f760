# -*- coding: utf-8 -*-

# The lack of a module docstring for this module is **INTENTIONAL**.
# The module is imported into the documentation using Sphinx's autodoc
# extension, and its member class documentation is automatically incorporated
# there as needed.

class VocalFoleyError(ValueError):
    """Base error raised by **vocalfoley**. Inherits from
    :class:`ValueError <python:ValueError>`.
    """
    pass

class VocalFoleyWarning(UserWarning):
    """Base warning raised by **vocalfoley**. Inherits from
    :class:`UserWarning <python:warnings.UserWarning>`."""
    pass

class ConfigurationError(VocalFoleyError):
    """Error raised when a configuration value does not match expectations."""
    pass

class ExtraKeyError(ConfigurationError):
    """Error raised when a configuration section contains extra (unrecognized)
    keys."""
    pass

class DeserializationError(VocalFoleyError):
    """Error raised when something went wrong parsing input YAML or JSON data."""
    pass

class ParameterError(VocalFoleyError):
    """Error raised when an operation receives an argument outside its domain,
    such as a non-positive rate or an unknown unit."""
    pass

class OutputPathError(VocalFoleyError):
    """Error raised when an output file cannot be written."""
    pass

class AudioFileNotFoundError(VocalFoleyError, FileNotFoundError):
    """Error raised when an audio file does not exist."""
    pass

class AudioFormatError(VocalFoleyError):
    """Error raised when an audio file uses an unsupported container or codec."""
    pass

class EmptyAudioError(AudioFormatError):
    """Error raised when an audio file or clip contains no samples."""
    pass

class AudioTooShortError(VocalFoleyError):
    """Error raised when a clip is shorter than one analysis window."""
    pass

class SampleRateMismatchError(VocalFoleyError):
    """Error raised when a clip's sample rate differs from the one a
    configuration expects."""
    pass

class TensorFormatError(VocalFoleyError):
    """Error raised when a tensor file is malformed or was produced under a
    different configuration."""
    pass

class ExtractorWeightsError(ConfigurationError):
    """Error raised when the weights of an external feature extractor cannot
    be found."""
    pass

class DimensionMismatchError(VocalFoleyError):
    """Error raised when array dimensions (or extractor identities) do not
    agree."""
    pass

class InsufficientFramesError(VocalFoleyError):
    """Error raised when a codebook is fitted on fewer distinct frames than
    clusters."""
    pass

class TokenRangeError(VocalFoleyError):
    """Error raised when a token is outside ``[0, k)``."""
    pass

class UnknownLabelError(VocalFoleyError):
    """Error raised when a sound event label name or class id is not part of
    the label set."""
    pass

class DecoderError(VocalFoleyError):
    """Error raised when the decoder receives inconsistent inputs or is not
    ready for inference."""
    pass

class NonFiniteLossError(DecoderError):
    """Error raised when a training step produces a non-finite loss."""
    pass

class CheckpointMismatchError(DecoderError):
    """Error raised when a checkpoint does not match the expected version or
    configuration."""
    pass

class VocoderAdapterError(VocalFoleyError):
    """Error raised when the external vocoder fails or returns invalid audio."""
    pass

class SilentAudioError(VocalFoleyError):
    """Error raised when every analysis frame of a clip falls below the energy
    gate."""
    pass

class DatasetError(VocalFoleyError):
    """Error raised when a dataset directory does not have the expected
    structure."""
    pass

class PairingError(DatasetError):
    """Error raised when an environmental sound has no matching vocal
    imitation recording."""
    pass

class SplitOverlapError(DatasetError):
    """Error raised when an imitator is assigned to both the training and the
    evaluation split."""
    pass

class ZeroVarianceWarning(VocalFoleyWarning):
    """Warning raised when a mel bin has zero standard deviation and its
    normalization divisor is replaced by 1."""
    pass

class PartialDatasetWarning(VocalFoleyWarning):
    """Warning raised when a dataset is incomplete but still usable."""
    pass

class ShapeMismatchWarning(VocalFoleyWarning):
    """Warning raised when two spectrograms are truncated to a common shape
    before being compared."""
    pass

class MaxFramesWarning(VocalFoleyWarning):
    """Warning raised when autoregressive decoding reaches ``max_frames``
    without the stop gate firing."""
    pass
