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
Multi-label classification scores on boolean truth/prediction matrices of shape
(n_documents, n_labels). Quotients with a zero denominator are defined as 0, except the
per-document F1 of a document with neither true nor predicted labels, which is 1.
"""

from __future__ import division, print_function

import math

import numpy as np
from scipy.stats import rankdata


def _div(num, den):
    return num / den if den else 0.


def confusion_counts(truth, predicted):
    """
    Per-label confusion counts.

    Parameters
    ----------
    truth : array_like
        boolean matrix of true labels
    predicted : array_like
        boolean matrix of predicted labels

    Returns
    -------
    tp, fp, fn, tn : np.ndarray
        integer counts per label
    """
    truth = np.atleast_2d(np.asarray(truth, dtype=bool))
    predicted = np.atleast_2d(np.asarray(predicted, dtype=bool))
    tp = np.sum(truth & predicted, axis=0)
    fp = np.sum(~truth & predicted, axis=0)
    fn = np.sum(truth & ~predicted, axis=0)
    tn = np.sum(~truth & ~predicted, axis=0)
    return tp, fp, fn, tn


def prf1(tp, fp, fn):
    """
    Precision TP/(TP+FP), recall TP/(TP+FN) and F1 = 2PR/(P+R) of a set of counts.
    """
    p = _div(float(tp), tp + fp)
    r = _div(float(tp), tp + fn)
    return p, r, _div(2. * p * r, p + r)


def example_f1(truth, predicted):
    """
    Mean over documents of 2|Y & Yhat| / (|Y| + |Yhat|), a document with both sets empty
    scores 1.
    """
    truth = np.atleast_2d(np.asarray(truth, dtype=bool))
    predicted = np.atleast_2d(np.asarray(predicted, dtype=bool))
    inter = np.sum(truth & predicted, axis=1)
    total = np.sum(truth, axis=1) + np.sum(predicted, axis=1)
    f1 = [1. if t == 0 else 2. * i / t for i, t in zip(inter, total)]
    return math.fsum(f1) / len(f1)


def micro_f1(truth, predicted):
    """F1 of the label-pooled counts."""
    tp, fp, fn, tn = confusion_counts(truth, predicted)
    return prf1(tp.sum(), fp.sum(), fn.sum())[2]


def label_f1(truth, predicted):
    """F1 of every label."""
    tp, fp, fn, tn = confusion_counts(truth, predicted)
    return np.array([prf1(*c)[2] for c in zip(tp, fp, fn)])


def macro_f1(truth, predicted):
    """Unweighted mean of the per-label F1 over all labels."""
    f1 = label_f1(truth, predicted)
    return math.fsum(f1.tolist()) / f1.size


def weighted_f1(truth, predicted, literal=False):
    """
    Support weighted mean of the per-label F1.

    Parameters
    ----------
    truth, predicted : array_like
        boolean matrices
    literal : bool, optional
        if True use w_j = support_j / n_documents, which does not sum to one for
        multi-label data, instead of w_j = support_j / sum_k support_k

    Returns
    -------
    f1 : float
    """
    truth = np.atleast_2d(np.asarray(truth, dtype=bool))
    f1 = label_f1(truth, predicted)
    support = truth.sum(axis=0)
    total = truth.shape[0] if literal else support.sum()
    if total == 0:
        return 0.
    return math.fsum((s / total) * f for s, f in zip(support.tolist(), f1.tolist()))


def auc(scores, truth):
    """
    Area under the ROC curve as the Mann-Whitney statistic: the fraction of
    (positive, negative) pairs with the positive scored higher, ties counting one half.

    Parameters
    ----------
    scores : array_like
        real valued scores
    truth : array_like
        binary targets

    Returns
    -------
    auc : float or None
        None when there are no positives or no negatives
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=bool)
    P = int(truth.sum())
    N = truth.size - P
    if P == 0 or N == 0:
        return None
    ranks = rankdata(scores, method="average")
    U = ranks[truth].sum() - P * (P + 1) / 2.
    return U / (P * N)
