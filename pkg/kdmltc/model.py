# -*- coding: utf-8 -*-
#  This file is part of kdmltc.
#
#  kdmltc is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  kdmltc is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with kdmltc.  If not, see <http://www.gnu.org/licenses/>.
#
# Copyright 2026 the kdmltc developers

"""
Feed-forward text classifiers over hashed TF-IDF features with one two-logit head per
label. Index 0 of a head is "label absent", index 1 is "label present".
"""

from __future__ import division, print_function

import numpy as np
import scipy.sparse as sp

from kdmltc.core import network
from kdmltc.core import io as core_io
from kdmltc.core.special_fcts import softmax_t
from kdmltc.core.utils import make_rng
from kdmltc.exceptions import NonFiniteGradientError, NonFiniteUpdateError, CheckpointError

ROLES = ["teacher", "student"]
POSITIVE = 1

__all__ = ["EncoderSpec", "ModelState", "ForwardResult", "OptimizerConfig", "Gradients",
           "init_model", "init_projection", "forward", "forward_batch", "backward", "softmax_t",
           "clip_gradients", "sgd_step", "predict_proba", "predict_proba_batch", "save_model",
           "load_model"]


class EncoderSpec(object):
    """
    Architecture of an encoder.

    Parameters
    ----------
    input_dim : int
        feature dimension
    hidden_sizes : list of int
        width of every layer, the last one is the hidden size H
    activation : str, optional
        'tanh' or 'relu'
    role : str, optional
        'teacher' or 'student'
    """
    def __init__(self, input_dim, hidden_sizes, activation="tanh", role="student"):
        hidden_sizes = [int(h) for h in hidden_sizes]
        if not hidden_sizes or min(hidden_sizes) < 1:
            raise ValueError("hidden_sizes has to be a non-empty list of positive widths")
        if activation not in network.ACTIVATIONS:
            raise ValueError("activation '%s' unknown has to be one of %s" % (activation, network.ACTIVATIONS))
        if role not in ROLES:
            raise ValueError("role '%s' unknown has to be one of %s" % (role, ROLES))
        if int(input_dim) < 1:
            raise ValueError("input_dim has to be positive")
        self.input_dim = int(input_dim)
        self.hidden_sizes = hidden_sizes
        self.activation = activation
        self.role = role

    @property
    def H(self):
        return self.hidden_sizes[-1]

    @classmethod
    def teacher_default(cls, input_dim):
        return cls(input_dim, [128, 64], "tanh", "teacher")

    @classmethod
    def student_default(cls, input_dim):
        return cls(input_dim, [32], "tanh", "student")

    def __eq__(self, other):
        return isinstance(other, EncoderSpec) and vars(self) == vars(other)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "EncoderSpec(%d, %r, %r, %r)" % (self.input_dim, self.hidden_sizes, self.activation, self.role)


class OptimizerConfig(object):
    """Plain mini-batch gradient descent settings."""
    def __init__(self, learning_rate, batch_size, epochs, seed=0):
        if not learning_rate >= 0:
            raise ValueError("learning_rate has to be nonnegative, got %r" % (learning_rate,))
        if int(batch_size) < 1:
            raise ValueError("batch_size has to be at least 1, got %r" % (batch_size,))
        if int(epochs) < 1:
            raise ValueError("epochs has to be at least 1, got %r" % (epochs,))
        self.learning_rate = float(learning_rate)
        self.batch_size = int(batch_size)
        self.epochs = int(epochs)
        self.seed = int(seed)


class ModelState(object):
    """
    Parameters of an encoder plus per-label heads.

    Parameters
    ----------
    spec : EncoderSpec
        the architecture
    encoder : list of (W, b)
        encoder layers, W of shape (fan_in, fan_out)
    head_W : np.ndarray
        head weights, shape (num_labels, H, 2)
    head_b : np.ndarray
        head biases, shape (num_labels, 2)
    projection : np.ndarray, optional
        matrix mapping this model's hidden state to a teacher's, shape (H_teacher, H)
    """
    def __init__(self, spec, encoder, head_W, head_b, projection=None):
        self.spec = spec
        self.encoder = [(np.asarray(W, dtype=np.float64), np.asarray(b, dtype=np.float64))
                        for W, b in encoder]
        self.head_W = np.asarray(head_W, dtype=np.float64)
        self.head_b = np.asarray(head_b, dtype=np.float64)
        self.projection = None if projection is None else np.asarray(projection, dtype=np.float64)
        if self.head_W.shape[1:] != (spec.H, 2) or self.head_b.shape != (self.head_W.shape[0], 2):
            raise ValueError("head shapes %s, %s do not match hidden size %d"
                             % (self.head_W.shape, self.head_b.shape, spec.H))

    @property
    def num_labels(self):
        return self.head_W.shape[0]

    def copy(self):
        return ModelState(self.spec, [(W.copy(), b.copy()) for W, b in self.encoder],
                          self.head_W.copy(), self.head_b.copy(),
                          None if self.projection is None else self.projection.copy())

    def parameters(self):
        """(name, array) pairs of all parameters."""
        out = []
        for l, (W, b) in enumerate(self.encoder):
            out += [("encoder.%d.W" % l, W), ("encoder.%d.b" % l, b)]
        out += [("heads.W", self.head_W), ("heads.b", self.head_b)]
        if self.projection is not None:
            out.append(("projection", self.projection))
        return out

    def is_finite(self):
        return all(np.all(np.isfinite(p)) for _, p in self.parameters())

    def __eq__(self, other):
        if not isinstance(other, ModelState) or self.spec != other.spec:
            return False
        a, b = self.parameters(), other.parameters()
        return len(a) == len(b) and all(n1 == n2 and np.array_equal(p1, p2)
                                        for (n1, p1), (n2, p2) in zip(a, b))


class ForwardResult(object):
    """Hidden representation and head logits of a single document."""
    def __init__(self, hidden, logits):
        self.hidden = hidden
        self.logits = logits


class Gradients(object):
    """
    Gradients of a ModelState for one label head.

    Attributes
    ----------
    encoder : list of (dW, db)
        the first dW is a network.SparseRows for sparse input
    label : int
        the head the gradient belongs to
    head : tuple
        (dW, db) of that head
    projection : np.ndarray or None
    """
    def __init__(self, encoder, label, head, projection=None):
        self.encoder = encoder
        self.label = label
        self.head = head
        self.projection = projection

    def named(self):
        out = []
        for l, (dW, db) in enumerate(self.encoder):
            out += [("encoder.%d.W" % l, dW), ("encoder.%d.b" % l, db)]
        out += [("heads.%d.W" % self.label, self.head[0]), ("heads.%d.b" % self.label, self.head[1])]
        if self.projection is not None:
            out.append(("projection", self.projection))
        return out


def init_model(spec, num_labels, seed):
    """
    Glorot uniform initialised model with zero biases.

    Parameters
    ----------
    spec : EncoderSpec
        architecture
    num_labels : int
        number of heads
    seed : int
        random seed

    Returns
    -------
    model : ModelState
    """
    if num_labels < 1:
        raise ValueError("num_labels has to be at least 1")
    rng = make_rng(seed)
    encoder = network.init_encoder(rng, spec.input_dim, spec.hidden_sizes)
    W, b = network.init_heads(rng, spec.H, num_labels)
    return ModelState(spec, encoder, W, b)


def init_projection(model, target_dim, seed):
    """Attach a Glorot initialised projection of shape (target_dim, H) to model."""
    rng = make_rng(seed)
    model.projection = network.glorot_uniform(rng, target_dim, model.spec.H)
    return model


def _check_input(model, X, label):
    if X.shape[-1] != model.spec.input_dim:
        raise ValueError("feature dimension %d does not match model input dimension %d"
                         % (X.shape[-1], model.spec.input_dim))
    if not 0 <= label < model.num_labels:
        raise ValueError("label index %d outside [0, %d)" % (label, model.num_labels))


def _as_rows(features):
    if sp.issparse(features):
        return sp.csr_matrix(features)
    return np.atleast_2d(np.asarray(features, dtype=np.float64))


def forward_batch(model, X, label):
    """
    Forward pass of a batch through the encoder and one head.

    Parameters
    ----------
    model : ModelState
    X : scipy.sparse matrix or array_like
        features, shape (n, input_dim)
    label : int
        head index

    Returns
    -------
    hidden : np.ndarray
        shape (n, H)
    logits : np.ndarray
        shape (n, 2)
    cache : tuple
        intermediate values for backward
    """
    X = _as_rows(X)
    _check_input(model, X, label)
    hidden, enc_cache = network.encode(model.encoder, X, model.spec.activation)
    logits = network.head_logits(hidden, model.head_W[label], model.head_b[label])
    return hidden, logits, (hidden, enc_cache)


def forward(model, features, label):
    """
    Forward pass of a single document.

    Returns
    -------
    result : ForwardResult
        hidden vector of length H and the two logits of the head
    """
    hidden, logits, _ = forward_batch(model, features, label)
    return ForwardResult(hidden[0], logits[0])


def backward(model, cache, label, d_logits, d_hidden=None):
    """
    Exact gradients given the gradient of a loss with respect to the head logits and,
    optionally, an additional gradient with respect to the hidden representation.

    Returns
    -------
    grads : Gradients
    """
    hidden, enc_cache = cache
    dW, db, dh = network.head_backward(hidden, model.head_W[label], d_logits)
    if d_hidden is not None:
        dh = dh + d_hidden
    enc = network.encoder_backward(model.encoder, enc_cache, dh, model.spec.activation)
    return Gradients(enc, label, (dW, db))


def _finite(g):
    if isinstance(g, network.SparseRows):
        return g.isfinite()
    return bool(np.all(np.isfinite(g)))


def _targets(model, grads):
    out = []
    for l, (dW, db) in enumerate(grads.encoder):
        out += [(model.encoder[l][0], dW), (model.encoder[l][1], db)]
    out += [(model.head_W[grads.label], grads.head[0]), (model.head_b[grads.label], grads.head[1])]
    if grads.projection is not None:
        out.append((model.projection, grads.projection))
    return out


def clip_gradients(grads, max_norm):
    """
    Rescale all gradients in place so that their joint L2 norm is at most max_norm.
    max_norm <= 0 leaves them unchanged. Returns the norm before clipping.
    """
    norm = np.sqrt(sum(network.squared_norm(g) for _, g in grads.named()))
    if max_norm > 0 and norm > max_norm:
        f = max_norm / norm
        grads.encoder = [(network.scale_grad(dW, f), db * f) for dW, db in grads.encoder]
        grads.head = (grads.head[0] * f, grads.head[1] * f)
        if grads.projection is not None:
            grads.projection = grads.projection * f
    return norm


def sgd_step(model, grads, lr):
    """
    Gradient descent step p <- p - lr g on every parameter that has a gradient. The
    model is updated in place and returned.

    Raises
    ------
    NonFiniteGradientError
        if any gradient holds NaN or inf, before anything is updated
    NonFiniteUpdateError
        if the step would turn a parameter non-finite, before anything is updated
    """
    named = grads.named()
    for name, g in named:
        if not _finite(g):
            raise NonFiniteGradientError(name)
    targets = _targets(model, grads)
    for (name, _), (p, g) in zip(named, targets):
        if not network.step_is_finite(p, g, lr):
            raise NonFiniteUpdateError(name)
    for p, g in targets:
        network.sgd_update(p, g, lr)
    return model


def predict_proba_batch(model, X, label):
    """Probability of the label being present for every row of X."""
    _, logits, _ = forward_batch(model, X, label)
    return softmax_t(logits, 1.)[:, POSITIVE]


def predict_proba(model, features, label):
    """Probability of the label being present for one document."""
    return float(predict_proba_batch(model, features, label)[0])


def save_model(model, fn):
    """Save a model to a HDF5 checkpoint, the round trip is exact."""
    s = model.spec
    attrs = {"input_dim": s.input_dim, "hidden_sizes": np.array(s.hidden_sizes, dtype=np.int64),
             "activation": s.activation, "role": s.role}
    return core_io.write_checkpoint(fn, attrs, model.encoder, model.head_W, model.head_b,
                                    model.projection)


def load_model(fn):
    """Load a model saved by save_model."""
    attrs, layers, W, b, P = core_io.read_checkpoint(fn, ["input_dim", "hidden_sizes", "activation", "role"])
    try:
        spec = EncoderSpec(int(attrs["input_dim"]), [int(h) for h in attrs["hidden_sizes"]],
                           str(attrs["activation"]), str(attrs["role"]))
        return ModelState(spec, layers, W, b, P)
    except ValueError as err:
        raise CheckpointError("inconsistent checkpoint %s: %s" % (fn, err))
