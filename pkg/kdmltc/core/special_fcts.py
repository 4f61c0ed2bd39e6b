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

from __future__ import division, print_function

import numpy as np
from scipy.special import betainc, stdtrit


def _check_temperature(T):
    if not T > 0:
        raise ValueError("temperature T has to be positive, got %r" % (T,))


def log_softmax_t(z, T=1.):
    """
    Logarithm of the temperature softmax along the last axis, computed in the
    max-shifted form so that extreme logits do not overflow.

    Parameters
    ----------
    z : array_like
        logits, last axis are the classes
    T : float, optional
        temperature, has to be positive

    Returns
    -------
    out : np.ndarray
        log probabilities with the shape of z
    """
    _check_temperature(T)
    u = np.asarray(z, dtype=np.float64) / T
    m = np.max(u, axis=-1, keepdims=True)
    s = u - m
    return s - np.log(np.sum(np.exp(s), axis=-1, keepdims=True))


def softmax_t(z, T=1.):
    """
    Temperature softmax sigma_i = exp(z_i/T - m) / sum_j exp(z_j/T - m), m = max_i z_i/T.

    Parameters
    ----------
    z : array_like
        logits, last axis are the classes
    T : float, optional
        temperature, larger values give flatter distributions

    Returns
    -------
    sigma : np.ndarray
        probabilities summing to one along the last axis
    """
    _check_temperature(T)
    u = np.asarray(z, dtype=np.float64) / T
    e = np.exp(u - np.max(u, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


def t_sf2(t, df):
    """
    Two-sided tail probability P(|T| >= |t|) of Student's t distribution, computed with
    the regularized incomplete beta function I_x(df/2, 1/2), x = df/(df + t^2).
    """
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(np.isinf(t), 0., df / (df + t**2))
    return betainc(0.5 * df, 0.5, x)


def t_cdf(t, df):
    """Cumulative distribution function of Student's t distribution with df degrees of freedom."""
    t = np.asarray(t, dtype=np.float64)
    half_tail = 0.5 * t_sf2(t, df)
    return np.where(t > 0, 1. - half_tail, half_tail)


def t_ppf(q, df):
    """Quantile function of Student's t distribution."""
    return stdtrit(df, q)


def f_sf(F, dfn, dfd):
    """
    Survival function P(X >= F) of the F distribution with (dfn, dfd) degrees of freedom,
    I_x(dfd/2, dfn/2) with x = dfd/(dfd + dfn F).
    """
    F = np.asarray(F, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(np.isinf(F), 0., dfd / (dfd + dfn * F))
    return betainc(0.5 * dfd, 0.5 * dfn, x)
