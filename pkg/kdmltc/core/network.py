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
Array level feed-forward encoders, two-logit heads and plain gradient descent.

An encoder is a list of (W, b) pairs with W of shape (fan_in, fan_out), applied as
A_l = act(A_{l-1} W_l + b_l) with A_0 the (sparse) feature matrix. The first layer
gradient is returned as a SparseRows object holding only the rows of W_1 that belong to
features present in the batch. All other rows of that gradient are exactly zero.
"""

from __future__ import division, print_function

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

ACTIVATIONS = ["tanh", "relu"]


class SparseRows(object):
    """
    Row-sparse gradient of a weight matrix.

    Parameters
    ----------
    rows : array_like
        sorted row indices
    values : array_like
        gradient rows, shape (len(rows), n_columns)
    shape : tuple
        shape of the full matrix
    """
    def __init__(self, rows, values, shape):
        self.rows = np.asarray(rows, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        self.shape = tuple(shape)

    def to_dense(self):
        out = np.zeros(self.shape, dtype=np.float64)
        out[self.rows] = self.values
        return out

    def isfinite(self):
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other):
        if isinstance(other, SparseRows):
            rows = np.union1d(self.rows, other.rows)
            vals = np.zeros((rows.size, self.shape[1]))
            vals[np.searchsorted(rows, self.rows)] += self.values
            vals[np.searchsorted(rows, other.rows)] += other.values
            return SparseRows(rows, vals, self.shape)
        return self.to_dense() + other

    __radd__ = __add__


def glorot_uniform(rng, fan_in, fan_out):
    """Weights drawn uniformly from [-a, a], a = sqrt(6/(fan_in + fan_out))."""
    a = np.sqrt(6. / (fan_in + fan_out))
    return rng.uniform(-a, a, size=(fan_in, fan_out))


def init_encoder(rng, input_dim, hidden_sizes):
    """
    Glorot initialised encoder layers with zero biases.

    Returns
    -------
    layers : list of (np.ndarray, np.ndarray)
    """
    layers = []
    fan_in = input_dim
    for h in hidden_sizes:
        layers.append((glorot_uniform(rng, fan_in, h), np.zeros(h)))
        fan_in = h
    return layers


def init_heads(rng, hidden, num_labels):
    """
    Per-label two-logit heads.

    Returns
    -------
    W : np.ndarray
        shape (num_labels, hidden, 2)
    b : np.ndarray
        shape (num_labels, 2)
    """
    W = np.stack([glorot_uniform(rng, hidden, 2) for _ in range(num_labels)])
    return W, np.zeros((num_labels, 2))


def _activate(z, activation):
    if activation == "tanh":
        return np.tanh(z)
    elif activation == "relu":
        return np.maximum(z, 0.)
    else:
        raise ValueError("activation '%s' unknown has to be one of %s" % (activation, ACTIVATIONS))


def _activation_grad(z, a, activation):
    if activation == "tanh":
        return 1. - a**2
    else:
        return (z > 0).astype(np.float64)


def encode(layers, X, activation):
    """
    Run the encoder.

    Parameters
    ----------
    layers : list of (W, b)
        encoder parameters
    X : array_like or scipy.sparse matrix
        input features, shape (n, input_dim)
    activation : str
        'tanh' or 'relu'

    Returns
    -------
    hidden : np.ndarray
        last hidden representation, shape (n, H)
    cache : tuple
        (inputs, pre-activations, activations) needed by encoder_backward
    """
    A = X
    zs = []
    acts = []
    for W, b in layers:
        z = np.asarray(A @ W) + b
        A = _activate(z, activation)
        zs.append(z)
        acts.append(A)
    return A, (X, zs, acts)


def encoder_backward(layers, cache, d_hidden, activation):
    """
    Backpropagate a gradient with respect to the last hidden representation.

    Parameters
    ----------
    layers : list of (W, b)
        encoder parameters
    cache : tuple
        cache returned by encode
    d_hidden : np.ndarray
        gradient of the loss with respect to the encoder output, shape (n, H)
    activation : str
        activation used in encode

    Returns
    -------
    grads : list of (dW, db)
        gradient per layer, the first dW is SparseRows when the input was sparse
    """
    X, zs, acts = cache
    grads = [None] * len(layers)
    dA = d_hidden
    for l in range(len(layers) - 1, -1, -1):
        dz = dA * _activation_grad(zs[l], acts[l], activation)
        db = dz.sum(axis=0)
        if l > 0:
            dW = acts[l - 1].T @ dz
            dA = dz @ layers[l][0].T
        elif sp.issparse(X):
            Xc = X.tocsr()
            rows = np.unique(Xc.indices)
            dW = SparseRows(rows, np.asarray(Xc[:, rows].T @ dz), layers[0][0].shape)
        else:
            dW = np.asarray(X).T @ dz
        grads[l] = (dW, db)
    return grads


def head_logits(hidden, W, b):
    """Two logits W.T h + b for every row of hidden."""
    return hidden @ W + b


def head_backward(hidden, W, d_logits):
    """
    Gradients of a head and of the hidden representation.

    Returns
    -------
    dW, db, d_hidden
    """
    return hidden.T @ d_logits, d_logits.sum(axis=0), d_logits @ W.T


def sgd_update(param, grad, lr):
    """
    In-place gradient descent step p <- p - lr g. grad may be a SparseRows object.
    """
    if isinstance(grad, SparseRows):
        param[grad.rows] -= lr * grad.values
    else:
        param -= lr * grad
    return param


def step_is_finite(param, grad, lr):
    """True if p - lr g stays finite on every entry the step touches."""
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(grad, SparseRows):
            return bool(np.all(np.isfinite(param[grad.rows] - lr * grad.values)))
        return bool(np.all(np.isfinite(param - lr * grad)))


def squared_norm(grad):
    values = grad.values if isinstance(grad, SparseRows) else grad
    return float(np.sum(np.square(values)))


def scale_grad(grad, factor):
    if isinstance(grad, SparseRows):
        return SparseRows(grad.rows, grad.values * factor, grad.shape)
    return grad * factor


def batches(n, batch_size, rng):
    """
    Shuffle range(n) once and cut it into consecutive mini-batches; the last partial batch is kept.
    """
    order = rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def logistic_fit(X, y, lr, batch_size, epochs, rng):
    """
    Fit a linear logistic classifier p = sigmoid(X w + b) by mini-batch gradient descent on
    the mean logistic loss, starting from zero weights.

    Parameters
    ----------
    X : scipy.sparse matrix
        features, shape (n, d)
    y : array_like
        binary targets
    lr : float
        step size
    batch_size : int
        mini-batch size
    epochs : int
        passes over the data
    rng : np.random.Generator
        generator for the batch order

    Returns
    -------
    w : np.ndarray
        weights, shape (d,)
    b : float
        bias
    """
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    w = np.zeros(X.shape[1])
    b = 0.
    for _ in range(epochs):
        for idx in batches(X.shape[0], batch_size, rng):
            Xb = X[idx]
            g = (expit(Xb @ w + b) - y[idx]) / idx.size
            rows = np.unique(Xb.indices)
            w[rows] -= lr * (Xb[:, rows].T @ g)
            b -= lr * g.sum()
    return w, b


def logistic_proba(X, w, b):
    return expit(sp.csr_matrix(X) @ w + b)
