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

from kdmltc.corpus import Corpus, Document, LabelVocabulary
from kdmltc.core.utils import make_rng

_SYNTHETIC_STREAM = 7


def keyword(j):
    """Keyword that marks label j."""
    return "kw%d" % j


def label_name(j):
    return "topic_%d" % j


def generate_synthetic(num_docs, num_labels, seed=0, prevalence=0.3, correlation=0., filler_vocab=200,
                       doc_length=12, keyword_repeats=2):
    """
    Generate a keyword separable multi-label corpus.

    Label j of a document is present if and only if the keyword of label j occurs in its
    text. Every document is made of doc_length filler words drawn uniformly from a
    vocabulary of filler_vocab words plus keyword_repeats copies of the keyword of every
    present label, in random order.

    Parameters
    ----------
    num_docs : int
        number of documents
    num_labels : int
        number of labels
    seed : int, optional
        random seed
    prevalence : float or array_like, optional
        probability of every label (or of each label) when drawn independently
    correlation : float, optional
        probability that label j > 0 copies label j-1 instead of being drawn
        independently
    filler_vocab : int, optional
        number of distinct filler words
    doc_length : int, optional
        number of filler words per document, at least 1
    keyword_repeats : int, optional
        occurrences of each present keyword

    Returns
    -------
    corpus : Corpus
    """
    if num_docs < 0 or num_labels < 1 or filler_vocab < 1 or doc_length < 1 or keyword_repeats < 1:
        raise ValueError("num_labels, filler_vocab, doc_length and keyword_repeats have to be positive")
    if not 0. <= correlation <= 1.:
        raise ValueError("correlation has to be in [0, 1]")
    prev = np.broadcast_to(np.asarray(prevalence, dtype=np.float64), (num_labels,))
    if np.any((prev < 0) | (prev > 1)):
        raise ValueError("prevalence has to be in [0, 1]")
    rng = make_rng(seed, _SYNTHETIC_STREAM)
    Y = np.zeros((num_docs, num_labels), dtype=bool)
    for j in range(num_labels):
        indep = rng.random(num_docs) < prev[j]
        if j == 0:
            Y[:, j] = indep
        else:
            copy = rng.random(num_docs) < correlation
            Y[:, j] = np.where(copy, Y[:, j - 1], indep)
    vocab = LabelVocabulary([label_name(j) for j in range(num_labels)])
    docs = []
    for i in range(num_docs):
        words = ["w%d" % w for w in rng.integers(0, filler_vocab, doc_length)]
        for j in np.flatnonzero(Y[i]):
            words += [keyword(j)] * keyword_repeats
        words = [words[k] for k in rng.permutation(len(words))]
        docs.append(Document("doc%05d" % i, " ".join(words), Y[i].tolist()))
    return Corpus(docs, vocab)
