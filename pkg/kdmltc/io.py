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

from kdmltc.corpus import load_corpus, save_corpus
from kdmltc.model import load_model, save_model
from kdmltc.distill import PredictionSet
from kdmltc.core import io as core_io
from kdmltc.exceptions import InvariantError, PredictionFormatError


def save_predictions(p, fn, header=None):
    """
    Write a PredictionSet as JSON lines with the fields id, label, probability, truth and
    fold. Probabilities are written exactly.
    """
    recs = [dict(zip(core_io.PREDICTION_FIELDS, r)) for r in p.records()]
    return core_io.write_jsonl(fn, recs, header)


def load_predictions(fn, labels=None):
    """
    Read a prediction file.

    Parameters
    ----------
    fn : str
        file name
    labels : sequence of str, optional
        label order, by default the order of first appearance in the file

    Returns
    -------
    p : PredictionSet
    """
    recs = core_io.read_prediction_records(fn)
    if labels is None:
        labels = []
        for r in recs:
            if r[2] not in labels:
                labels.append(r[2])
    p = PredictionSet(labels)
    known = set(labels)
    for lineno, doc_id, label, prob, truth, fold in recs:
        if label not in known:
            raise PredictionFormatError("unknown label '%s'" % label, lineno)
        try:
            p.add(doc_id, label, prob, truth, fold)
        except InvariantError as err:
            raise PredictionFormatError(str(err), lineno)
    return p


def save_trace(trace, fn, header=None):
    """Write a swarm trace, one JSON record per iteration."""
    return core_io.write_jsonl(fn, trace, header)
