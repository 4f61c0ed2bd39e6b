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
Labelled text corpora, hashed TF-IDF features and stratified sampling and k-fold
splitting of multi-label data.
"""

from __future__ import division, print_function

import hashlib
import logging

import numpy as np
from bitarray import bitarray

from kdmltc.core import text, stratify
from kdmltc.core import io as core_io
from kdmltc.core.utils import make_rng
from kdmltc.exceptions import CorpusFormatError, DataError, VocabularyError

logger = logging.getLogger(__name__)

DEFAULT_DIM = 2**15

# stream tags for make_rng
_SAMPLE_STREAM = 1
_KFOLD_STREAM = 2


class LabelVocabulary(object):
    """
    Ordered set of label names.

    Parameters
    ----------
    labels : sequence of str
        unique, non-empty label names, their order defines the label index
    """
    def __init__(self, labels):
        labels = tuple(labels)
        for l in labels:
            if not isinstance(l, str) or not l.strip():
                raise VocabularyError("label names have to be non-empty strings, got %r" % (l,))
        if len(set(labels)) != len(labels):
            dup = sorted(set(l for l in labels if labels.count(l) > 1))
            raise VocabularyError("duplicate label name(s): %s" % ", ".join(dup))
        self.labels = labels
        self.index = {l: j for j, l in enumerate(labels)}

    @classmethod
    def from_file(cls, fn):
        return cls(core_io.read_vocabulary(fn))

    def permuted(self, order):
        """
        Vocabulary with the labels rearranged.

        Parameters
        ----------
        order : sequence of int or str
            the new order given as old indices or label names

        Returns
        -------
        vocab : LabelVocabulary
        """
        order = [self.index[o] if isinstance(o, str) else int(o) for o in order]
        if sorted(order) != list(range(len(self))):
            raise ValueError("label order has to be a permutation of %d labels" % len(self))
        return LabelVocabulary([self.labels[j] for j in order])

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, j):
        return self.labels[j]

    def __eq__(self, other):
        return isinstance(other, LabelVocabulary) and self.labels == other.labels

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "LabelVocabulary(%r)" % (list(self.labels),)


class Document(object):
    """
    A labelled document.

    Parameters
    ----------
    id : str
        document id
    text : str
        raw text, may not be blank
    label_set : bitarray
        one bit per vocabulary label
    """
    __slots__ = ("id", "text", "label_set")

    def __init__(self, id, text, label_set):
        if not text.strip():
            raise DataError("document '%s' has an empty text" % id)
        self.id = id
        self.text = text
        self.label_set = bitarray(label_set)

    def label_indices(self):
        return [j for j, bit in enumerate(self.label_set) if bit]

    def __getstate__(self):
        return self.id, self.text, self.label_set

    def __setstate__(self, state):
        self.id, self.text, self.label_set = state

    def __eq__(self, other):
        return (isinstance(other, Document) and self.id == other.id and self.text == other.text
                and self.label_set == other.label_set)

    def __repr__(self):
        return "Document(%r, %r, %s)" % (self.id, self.text[:30], self.label_set.to01())


class Corpus(object):
    """
    Ordered list of documents labelled from a vocabulary.

    Parameters
    ----------
    documents : list of Document
        documents with unique ids and label sets of length len(vocab)
    vocab : LabelVocabulary
        the label vocabulary
    """
    def __init__(self, documents, vocab):
        self.documents = list(documents)
        self.vocab = vocab
        seen = set()
        for d in self.documents:
            if d.id in seen:
                raise DataError("duplicate document id '%s'" % d.id)
            if len(d.label_set) != len(vocab):
                raise DataError("document '%s' has %d label bits, vocabulary has %d labels"
                                % (d.id, len(d.label_set), len(vocab)))
            seen.add(d.id)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def ids(self):
        return [d.id for d in self.documents]

    @property
    def texts(self):
        return [d.text for d in self.documents]

    def label_matrix(self):
        """Boolean array of shape (n_documents, n_labels)."""
        Y = np.zeros((len(self.documents), len(self.vocab)), dtype=bool)
        for i, d in enumerate(self.documents):
            Y[i] = d.label_set.tolist()
        return Y

    def prevalence(self):
        """Fraction of documents carrying each label."""
        if not self.documents:
            return np.zeros(len(self.vocab))
        return self.label_matrix().mean(axis=0)

    def subset(self, indices):
        """Corpus of the documents at indices, in the given order."""
        return Corpus([self.documents[i] for i in indices], self.vocab)

    def split(self, folds, fold):
        """
        Training and validation parts of a fold.

        Returns
        -------
        train, validation : Corpus
            documents outside and inside fold, each in corpus order
        """
        f = folds.fold_array(self)
        return self.subset(np.flatnonzero(f != fold)), self.subset(np.flatnonzero(f == fold))

    def with_vocab(self, vocab):
        """Same documents with the label bits rearranged to a permutation of the vocabulary."""
        if sorted(vocab) != sorted(self.vocab):
            raise VocabularyError("vocabularies hold different labels")
        perm = [self.vocab.index[l] for l in vocab]
        docs = [Document(d.id, d.text, [d.label_set[j] for j in perm]) for d in self.documents]
        return Corpus(docs, vocab)


class FeatureMatrix(object):
    """
    Hashed TF-IDF rows of a corpus.

    Parameters
    ----------
    X : scipy.sparse.csr_matrix
        features, one row per document
    doc_ids : list of str
        ids parallel to the rows
    """
    def __init__(self, X, doc_ids):
        self.X = X
        self.doc_ids = list(doc_ids)
        assert X.shape[0] == len(self.doc_ids)

    @property
    def dim(self):
        return self.X.shape[1]

    def __len__(self):
        return self.X.shape[0]

    def row(self, i):
        """(feature indices, weights) of row i."""
        s = slice(self.X.indptr[i], self.X.indptr[i + 1])
        return self.X.indices[s].copy(), self.X.data[s].copy()


class FoldAssignment(object):
    """
    Assignment of documents to k folds.

    Parameters
    ----------
    k : int
        number of folds
    fold_of : dict
        document id -> fold index in [0, k)
    """
    def __init__(self, k, fold_of):
        self.k = int(k)
        self.fold_of = dict(fold_of)
        bad = [f for f in self.fold_of.values() if not 0 <= f < self.k]
        if bad:
            raise ValueError("fold index %d outside [0, %d)" % (bad[0], self.k))

    def fold_array(self, corpus):
        """Fold index of every document of corpus, in corpus order."""
        try:
            return np.array([self.fold_of[i] for i in corpus.ids], dtype=np.int64)
        except KeyError as err:
            raise DataError("document %s has no fold" % err)

    def sizes(self):
        return np.bincount(np.array(list(self.fold_of.values()), dtype=np.int64),
                           minlength=self.k)

    def digest(self):
        """Stable hash of the assignment."""
        h = hashlib.sha256()
        h.update(("%d\n" % self.k).encode("utf-8"))
        for doc_id in sorted(self.fold_of):
            h.update(("%s\t%d\n" % (doc_id, self.fold_of[doc_id])).encode("utf-8"))
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, FoldAssignment) and self.k == other.k and self.fold_of == other.fold_of


def load_corpus(fn, vocab_fn):
    """
    Load a corpus from a JSON lines file with a label vocabulary file.

    Parameters
    ----------
    fn : str
        corpus file, one {"id": ..., "text": ..., "labels": [...]} object per line
    vocab_fn : str
        vocabulary file, one label per line

    Returns
    -------
    corpus : Corpus
        the documents in file order
    """
    vocab = LabelVocabulary.from_file(vocab_fn)
    docs = []
    seen = set()
    for lineno, doc_id, txt, labels in core_io.read_corpus_records(fn):
        if not txt.strip():
            raise CorpusFormatError("empty text", lineno)
        bits = bitarray(len(vocab))
        bits.setall(0)
        for l in labels:
            if l not in vocab.index:
                raise CorpusFormatError("unknown label '%s'" % l, lineno)
            bits[vocab.index[l]] = 1
        if doc_id in seen:
            raise CorpusFormatError("duplicate document id '%s'" % doc_id, lineno)
        seen.add(doc_id)
        docs.append(Document(doc_id, txt, bits))
    logger.info("loaded %d documents with %d labels from %s", len(docs), len(vocab), fn)
    return Corpus(docs, vocab)


def save_corpus(corpus, fn, vocab_fn=None, header=None):
    """
    Write a corpus in the format read by load_corpus, and optionally its vocabulary.
    """
    recs = [{"id": d.id, "text": d.text, "labels": [corpus.vocab[j] for j in d.label_indices()]}
            for d in corpus]
    core_io.write_jsonl(fn, recs, header)
    if vocab_fn is not None:
        core_io.atomic_write_text(vocab_fn, "".join(l + "\n" for l in corpus.vocab))
    return fn


def fit_idf(corpus, max_length=None):
    """
    Document frequencies of the tokens of a corpus.

    Returns
    -------
    df : collections.Counter
        token -> document count
    N : int
        number of documents
    """
    return text.document_frequencies([text.tokenize(t, max_length) for t in corpus.texts])


def featurize(corpus, dim=DEFAULT_DIM, max_length=None, idf=None):
    """
    Hashed TF-IDF features of a corpus.

    Parameters
    ----------
    corpus : Corpus
        non-empty corpus
    dim : int, optional
        number of hash buckets, at least 2
    max_length : int, optional
        only the first max_length tokens of each document are used
    idf : tuple, optional
        (document frequencies, N) from fit_idf, by default computed on corpus itself

    Returns
    -------
    features : FeatureMatrix
    """
    if dim < 2:
        raise ValueError("feature dimension has to be at least 2, got %d" % dim)
    if len(corpus) == 0:
        raise DataError("can not featurize an empty corpus")
    tokens = [text.tokenize(t, max_length) for t in corpus.texts]
    if idf is None:
        idf = text.document_frequencies(tokens)
    df, N = idf
    return FeatureMatrix(text.tfidf_matrix(tokens, int(dim), df, N), corpus.ids)


def stratified_sample(corpus, size, seed):
    """
    Subset of a corpus that keeps the label prevalence.

    Parameters
    ----------
    corpus : Corpus
        the corpus to sample from
    size : int
        number of documents, 1 <= size <= len(corpus)
    seed : int
        random seed

    Returns
    -------
    sample : Corpus
        the selected documents in corpus order
    """
    n = len(corpus)
    if not 1 <= size <= n:
        raise ValueError("sample size has to be in [1, %d], got %d" % (n, size))
    if size == n:
        return corpus.subset(range(n))
    part = stratify.iterative_stratification(corpus.label_matrix(), [size, n - size],
                                             make_rng(seed, _SAMPLE_STREAM))
    return corpus.subset(np.flatnonzero(part == 0))


def stratified_kfold(corpus, k, seed):
    """
    Stratified k-fold assignment of a corpus.

    Parameters
    ----------
    corpus : Corpus
        the documents to split
    k : int
        number of folds, 2 <= k <= len(corpus)
    seed : int
        random seed

    Returns
    -------
    folds : FoldAssignment
    """
    n = len(corpus)
    if not 2 <= k <= n:
        raise ValueError("number of folds has to be in [2, %d], got %d" % (n, k))
    part = stratify.iterative_stratification(corpus.label_matrix(), stratify.part_sizes(n, k),
                                             make_rng(seed, _KFOLD_STREAM))
    return FoldAssignment(k, zip(corpus.ids, part.tolist()))
