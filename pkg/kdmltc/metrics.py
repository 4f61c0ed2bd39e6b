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
Example based and label based evaluation of a PredictionSet.
"""

from __future__ import division, print_function

import math
import warnings
from collections import namedtuple, OrderedDict

import numpy as np

from kdmltc.core import scores
from kdmltc.core.io import render_ini, comment_block

THRESHOLD = 0.5

ConfusionCounts = namedtuple("ConfusionCounts", ["tp", "fp", "fn", "tn"])


def prf1(c):
    """Precision, recall and F1 of a ConfusionCounts, 0/0 is taken as 0."""
    return scores.prf1(c.tp, c.fp, c.fn)


def _matrices(p, threshold=THRESHOLD):
    return p.truth_matrix(), p.binary(threshold)


def confusion_counts(p, threshold=THRESHOLD):
    """ConfusionCounts of every label, in label order."""
    Y, Yhat = _matrices(p, threshold)
    return [ConfusionCounts(*map(int, c)) for c in zip(*scores.confusion_counts(Y, Yhat))]


def example_f1(p, threshold=THRESHOLD):
    return scores.example_f1(*_matrices(p, threshold))


def micro_f1(p, threshold=THRESHOLD):
    return scores.micro_f1(*_matrices(p, threshold))


def macro_f1(p, threshold=THRESHOLD):
    return scores.macro_f1(*_matrices(p, threshold))


def weighted_f1(p, threshold=THRESHOLD, literal=False):
    """
    Support weighted F1. By default the weights are normalised to sum to one; literal=True
    divides the supports by the number of documents instead.
    """
    return scores.weighted_f1(*_matrices(p, threshold), literal=literal)


def auc(pairs):
    """
    Area under the ROC curve of (probability, true bit) pairs.

    Returns
    -------
    auc : float or None
        None if the pairs contain only one class
    """
    pairs = list(pairs)
    s = np.array([q for q, _ in pairs], dtype=np.float64)
    t = np.array([b for _, b in pairs], dtype=bool)
    return scores.auc(s, t)


def mean_auc(values):
    """Mean over the defined AUC values, None if there are none."""
    defined = [a for a in values if a is not None]
    if not defined:
        return None
    return math.fsum(defined) / len(defined)


class MetricsReport(object):
    """
    All metrics of a prediction set.

    Attributes
    ----------
    example_f1, micro_f1, macro_f1, weighted_f1 : float
    mean_auc : float or None
        mean of the defined per-label AUCs
    per_label : OrderedDict
        label -> (precision, recall, f1, auc), auc is None where undefined
    counts : OrderedDict
        label -> ConfusionCounts
    """
    KEYS = ("example_f1", "micro_f1", "macro_f1", "weighted_f1")

    def __init__(self, example_f1, micro_f1, macro_f1, weighted_f1, per_label, counts, mean_auc=None):
        self.example_f1 = example_f1
        self.micro_f1 = micro_f1
        self.macro_f1 = macro_f1
        self.weighted_f1 = weighted_f1
        self.per_label = per_label
        self.counts = counts
        self.mean_auc = mean_auc

    def summary(self):
        return OrderedDict((k, getattr(self, k)) for k in self.KEYS)

    def to_ini(self, header=None):
        """
        Render the report as INI text with values to six decimals. Undefined AUCs are
        left empty.
        """
        fmt = lambda x: "" if x is None else "%.6f" % x
        sections = OrderedDict()
        sections["metrics"] = OrderedDict((k, fmt(v)) for k, v in self.summary().items())
        sections["metrics"]["mean_auc"] = fmt(self.mean_auc)
        for l, (pr, rc, f1, a) in self.per_label.items():
            c = self.counts[l]
            sections["label:%s" % l] = OrderedDict([("precision", fmt(pr)), ("recall", fmt(rc)),
                                                     ("f1", fmt(f1)), ("auc", fmt(a)),
                                                     ("tp", c.tp), ("fp", c.fp), ("fn", c.fn),
                                                     ("tn", c.tn)])
        out = render_ini(sections)
        if header:
            out = comment_block(header) + out
        return out

    def __eq__(self, other):
        return isinstance(other, MetricsReport) and vars(self) == vars(other)


def full_report(p, threshold=THRESHOLD, literal_weights=False):
    """
    Evaluate a complete PredictionSet.

    Parameters
    ----------
    p : PredictionSet
        predictions with true bits
    threshold : float, optional
        decision threshold on the probabilities
    literal_weights : bool, optional
        use support / number of documents as weighted F1 weights

    Returns
    -------
    report : MetricsReport
    """
    Y, Yhat = _matrices(p, threshold)
    P = p.proba_matrix()
    tp, fp, fn, tn = scores.confusion_counts(Y, Yhat)
    per_label = OrderedDict()
    counts = OrderedDict()
    for j, l in enumerate(p.labels):
        c = ConfusionCounts(int(tp[j]), int(fp[j]), int(fn[j]), int(tn[j]))
        a = scores.auc(P[:, j], Y[:, j])
        if a is None:
            warnings.warn("AUC undefined for label '%s', only one class present" % l)
        per_label[l] = prf1(c) + (a,)
        counts[l] = c
    return MetricsReport(scores.example_f1(Y, Yhat), scores.micro_f1(Y, Yhat),
                         scores.macro_f1(Y, Yhat),
                         scores.weighted_f1(Y, Yhat, literal=literal_weights),
                         per_label, counts, mean_auc([v[3] for v in per_label.values()]))
