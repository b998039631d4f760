# -*- coding: utf-8 -*-

# The lack of a module docstring for this module is **INTENTIONAL**.
# The module is imported into the documentation using Sphinx's autodoc
# extension, and its member class documentation is automatically incorporated
# there as needed.

import torch
from torch import nn
from torch.nn import functional as F

from vocalfoley.errors import DecoderError


def linear_layer(in_dim, out_dim, bias = True, w_init_gain = 'linear'):
    """:class:`torch.nn.Linear` with Xavier-uniform initialization."""
    linear = nn.Linear(in_dim, out_dim, bias = bias)
    nn.init.xavier_uniform_(linear.weight, gain = nn.init.calculate_gain(w_init_gain))

    return linear


def conv1d_layer(in_channels, out_channels, kernel_size = 1, bias = True, w_init_gain = 'linear'):
    """'Same'-padded :class:`torch.nn.Conv1d` with Xavier-uniform initialization."""
    conv = nn.Conv1d(in_channels,
                     out_channels,
                     kernel_size = kernel_size,
                     padding = (kernel_size - 1) // 2,
                     bias = bias)
    nn.init.xavier_uniform_(conv.weight, gain = nn.init.calculate_gain(w_init_gain))

    return conv


class FusionLayer(nn.Module):
    """Trainable fusion of token ids and the one-hot label.

    :param k: Codebook size.
    :param num_classes: Size of the one-hot label.
    :param fused_dim: Output width ``D``.
    :param mode: ``embedding`` (learned ``k x embedding_dim`` table) or
      ``centroid`` (fixed codebook rows, passed as ``centroids``).
    :param embedding_dim: Width of the learned token table.
    :param centroids: ``k x E`` codebook matrix, required in ``centroid`` mode.
    """

    def __init__(self, k, num_classes, fused_dim, mode = 'embedding', embedding_dim = 256,
                 centroids = None):
        super(FusionLayer, self).__init__()
        self.k = k
        self.num_classes = num_classes
        self.mode = mode

        if mode == 'embedding':
            self.token_table = nn.Embedding(k, embedding_dim)
            input_dim = embedding_dim
        else:
            if centroids is None:
                raise DecoderError('centroid mode needs the codebook centroids')
            centroids = torch.as_tensor(centroids, dtype = torch.float32)
            self.register_buffer('centroids', centroids)
            input_dim = centroids.shape[1]

        self.input_dim = input_dim
        self.projection = linear_layer(input_dim + num_classes, fused_dim)

    def token_vectors(self, tokens):
        """``(B, T)`` token ids to ``(B, T, E_in)`` vectors."""
        if self.mode == 'embedding':
            return self.token_table(tokens)

        return self.centroids[tokens]

    def forward(self, tokens, class_ids, label_only = False):
        vectors = self.token_vectors(tokens)
        if label_only:
            vectors = torch.zeros_like(vectors)

        labels = F.one_hot(class_ids, self.num_classes).to(vectors.dtype)
        labels = labels.unsqueeze(1).expand(-1, vectors.shape[1], -1)

        return self.projection(torch.cat([vectors, labels], dim = -1))


class Prenet(nn.Module):
    """Bottleneck of ReLU layers applied to the previous mel frame. Dropout is
    active in training and inference whenever ``dropout > 0``."""

    def __init__(self, in_dim, sizes, dropout = 0.5):
        super(Prenet, self).__init__()
        in_sizes = [in_dim] + list(sizes[:-1])
        self.layers = nn.ModuleList([linear_layer(i, o, bias = False)
                                     for i, o in zip(in_sizes, sizes)])
        self.dropout = dropout

    def forward(self, x):
        for linear in self.layers:
            x = F.relu(linear(x))
            if self.dropout > 0:
                x = F.dropout(x, p = self.dropout, training = True)

        return x


class LocationLayer(nn.Module):
    """Convolution over the previous and cumulative attention weights."""

    def __init__(self, n_filters, kernel_size, attention_dim):
        super(LocationLayer, self).__init__()
        self.location_conv = conv1d_layer(2, n_filters, kernel_size = kernel_size, bias = False)
        self.location_dense = linear_layer(n_filters, attention_dim, bias = False,
                                           w_init_gain = 'tanh')

    def forward(self, attention_weights_cat):
        processed = self.location_conv(attention_weights_cat).transpose(1, 2)

        return self.location_dense(processed)


class LocationSensitiveAttention(nn.Module):
    """Additive attention whose energies also see the previous and cumulative
    alignments.

    :param query_dim: Width of the attention LSTM state.
    :param memory_dim: Width ``D`` of the conditioned sequence.
    :param attention_dim: Width of the hidden scoring space.
    :param n_filters: Location convolution filters.
    :param kernel_size: Location convolution kernel size.
    """

    def __init__(self, query_dim, memory_dim, attention_dim, n_filters, kernel_size):
        super(LocationSensitiveAttention, self).__init__()
        self.query_layer = linear_layer(query_dim, attention_dim, bias = False,
                                        w_init_gain = 'tanh')
        self.memory_layer = linear_layer(memory_dim, attention_dim, bias = False,
                                         w_init_gain = 'tanh')
        self.v = linear_layer(attention_dim, 1, bias = False)
        self.location_layer = LocationLayer(n_filters, kernel_size, attention_dim)

    def forward(self, query, memory, processed_memory, attention_weights_cat):
        """Return ``(context, weights)``; ``weights`` sum to 1 over the memory
        axis."""
        processed_query = self.query_layer(query.unsqueeze(1))
        processed_location = self.location_layer(attention_weights_cat)
        energies = self.v(torch.tanh(processed_query + processed_location + processed_memory))

        weights = F.softmax(energies.squeeze(2), dim = 1)
        context = torch.bmm(weights.unsqueeze(1), memory).squeeze(1)

        return context, weights


class Postnet(nn.Module):
    """Stack of 1-D convolutions predicting a residual correction of the
    decoder output."""

    def __init__(self, n_mels, channels, kernel_size, n_layers, dropout = 0.5):
        super(Postnet, self).__init__()
        self.dropout = dropout
        self.convolutions = nn.ModuleList()
        for index in range(n_layers):
            last = index == n_layers - 1
            in_channels = n_mels if index == 0 else channels
            out_channels = n_mels if last else channels
            self.convolutions.append(nn.Sequential(
                conv1d_layer(in_channels,
                             out_channels,
                             kernel_size = kernel_size,
                             w_init_gain = 'linear' if last else 'tanh'),
                nn.BatchNorm1d(out_channels),
            ))

    def forward(self, x):
        """``x`` is ``(B, n_mels, T)``."""
        last = len(self.convolutions) - 1
        for index, conv in enumerate(self.convolutions):
            x = conv(x)
            if index < last:
                x = torch.tanh(x)
            x = F.dropout(x, self.dropout, training = self.training)

        return x
