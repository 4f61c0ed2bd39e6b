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
Tokenization and hashed TF-IDF features.

Tokens are mapped to feature columns with the hashing trick: the bucket is the CRC32 of
the UTF-8 token modulo the dimension and the sign is taken from the most significant bit
of the same hash. Colliding tokens therefore cancel in expectation instead of
accumulating. IDF uses the smooth form idf(t) = ln((1 + N) / (1 + df(t))) + 1.
"""

from __future__ import division, print_function

import re
import zlib
from collections import Counter

import numpy as np
import scipy.sparse as sp

_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text, max_length=None):
    """
    Lowercase text and split it on every non-alphanumeric character.

    Parameters
    ----------
    text : str
        input text
    max_length : int, optional
        keep only the first max_length tokens

    Returns
    -------
    tokens : list of str
        the tokens in text order, empty fragments dropped
    """
    tokens = [t for t in _SPLIT.split(text.lower()) if t]
    if max_length is not None:
        tokens = tokens[:max_length]
    return tokens


def hash_token(token, dim):
    """
    Bucket and sign of a token.

    Parameters
    ----------
    token : str
        the token
    dim : int
        number of feature buckets

    Returns
    -------
    bucket : int
        column index in [0, dim)
    sign : float
        +1. or -1.
    """
    h = zlib.crc32(token.encode("utf-8")) & 0xffffffff
    sign = -1. if (h >> 31) & 1 else 1.
    return h % dim, sign


def document_frequencies(token_lists):
    """
    Count in how many documents each token occurs.

    Returns
    -------
    df : collections.Counter
        token -> number of documents containing it
    N : int
        number of documents
    """
    df = Counter()
    for tokens in token_lists:
        df.update(set(tokens))
    return df, len(token_lists)


def idf_weight(df_t, N):
    """Smooth inverse document frequency ln((1+N)/(1+df)) + 1."""
    return np.log((1. + N) / (1. + df_t)) + 1.


def tfidf_matrix(token_lists, dim, df, N):
    """
    Build the hashed, L2-normalised TF-IDF matrix.

    Parameters
    ----------
    token_lists : list of list of str
        tokens per document (already truncated to the maximum length)
    dim : int
        feature dimension
    df : mapping
        document frequencies token -> count
    N : int
        number of documents the frequencies were counted on

    Returns
    -------
    X : scipy.sparse.csr_matrix
        matrix of shape (len(token_lists), dim), float64, rows of unit L2 norm
        unless all-zero
    """
    indptr = [0]
    indices = []
    data = []
    for tokens in token_lists:
        row = {}
        for tok, tf in sorted(Counter(tokens).items()):
            bucket, sign = hash_token(tok, dim)
            row[bucket] = row.get(bucket, 0.) + sign * tf * idf_weight(df.get(tok, 0), N)
        cols = np.array(sorted(row), dtype=np.int64)
        vals = np.array([row[c] for c in cols], dtype=np.float64)
        norm = np.sqrt(np.sum(vals**2))
        if norm > 0:
            vals = vals / norm
        keep = vals != 0
        indices.extend(cols[keep].tolist())
        data.extend(vals[keep].tolist())
        indptr.append(len(indices))
    return sp.csr_matrix((np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64),
                          np.array(indptr, dtype=np.int64)), shape=(len(token_lists), dim))
