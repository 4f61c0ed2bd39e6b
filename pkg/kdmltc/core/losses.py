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
Distillation losses on rows of two-class logits, with their exact gradients.

All functions work row-wise: logits have shape (n, 2) (a single 2-vector is treated as
n = 1) and values are returned per row. Gradients are with respect to the student
logits, or for the contrastive loss with respect to the projection and the student
hidden state; the teacher side is always constant.
"""

from __future__ import division, print_function

import numpy as np

from kdmltc.core.special_fcts import softmax_t, log_softmax_t

ZERO_NORM = 1e-12


def _rows(z):
    return np.atleast_2d(np.asarray(z, dtype=np.float64))


def soft_loss_and_grad(z_s, z_t, T):
    """
    Temperature-scaled distillation loss T^2 KL(sigma_t || sigma_s), sigma = softmax(z/T).

    Returns
    -------
    loss : np.ndarray
        per row, nonnegative
    grad : np.ndarray
        d loss / d z_s = T (sigma_s - sigma_t), shape (n, 2)
    """
    z_s = _rows(z_s)
    z_t = _rows(z_t)
    log_s = log_softmax_t(z_s, T)
    log_t = log_softmax_t(z_t, T)
    sig_t = np.exp(log_t)
    kl = np.sum(sig_t * (log_t - log_s), axis=-1)
    # rounding can leave -1e-17 for identical inputs
    loss = T**2 * np.maximum(kl, 0.)
    grad = T * (np.exp(log_s) - sig_t)
    return loss, grad


def hard_loss_and_grad(z_s, y):
    """
    Cross entropy -ln softmax(z_s)[y].

    Returns
    -------
    loss : np.ndarray
        per row
    grad : np.ndarray
        softmax(z_s) - onehot(y)
    """
    z_s = _rows(z_s)
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    logp = log_softmax_t(z_s, 1.)
    idx = np.arange(z_s.shape[0])
    loss = -logp[idx, y]
    grad = np.exp(logp)
    grad[idx, y] -= 1.
    return loss, grad


def kd_loss_and_grad(z_s, z_t, y, T, alpha):
    """
    Combined loss alpha * soft + (1 - alpha) * hard and its gradient.
    """
    if not 0. <= alpha <= 1.:
        raise ValueError("alpha has to be in [0, 1], got %r" % (alpha,))
    ls, gs = soft_loss_and_grad(z_s, z_t, T)
    lh, gh = hard_loss_and_grad(z_s, y)
    return alpha * ls + (1. - alpha) * lh, alpha * gs + (1. - alpha) * gh


def contrastive_loss_and_grad(h_s, h_t, P):
    """
    Alignment loss 1 - cos(P h_s, h_t) between projected student and teacher hidden states.
    Rows where either vector has norm below 1e-12 contribute a loss of 1 and no gradient.

    Parameters
    ----------
    h_s : array_like
        student hidden states, shape (n, H_s)
    h_t : array_like
        teacher hidden states, shape (n, H_t)
    P : array_like
        projection, shape (H_t, H_s)

    Returns
    -------
    loss : np.ndarray
        per row, in [0, 2]
    dP : np.ndarray
        gradient of the summed loss with respect to P
    dh_s : np.ndarray
        gradient with respect to h_s, shape (n, H_s)
    """
    h_s = _rows(h_s)
    h_t = _rows(h_t)
    P = np.asarray(P, dtype=np.float64)
    if P.shape != (h_t.shape[1], h_s.shape[1]) or h_s.shape[0] != h_t.shape[0]:
        raise ValueError("dimension mismatch: projection %s, student %s, teacher %s"
                         % (P.shape, h_s.shape, h_t.shape))
    a = h_s @ P.T
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(h_t, axis=1)
    ok = (na >= ZERO_NORM) & (nb >= ZERO_NORM)
    cos = np.zeros(a.shape[0])
    d_a = np.zeros_like(a)
    if np.any(ok):
        ao, bo = a[ok], h_t[ok]
        nao, nbo = na[ok][:, None], nb[ok][:, None]
        c = np.sum(ao * bo, axis=1) / (nao[:, 0] * nbo[:, 0])
        cos[ok] = c
        d_a[ok] = -(bo / (nao * nbo) - c[:, None] * ao / nao**2)
    loss = np.clip(1. - cos, 0., 2.)
    return loss, d_a.T @ h_s, d_a @ P
