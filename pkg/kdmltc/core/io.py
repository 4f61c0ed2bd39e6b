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
File formats: JSON lines for corpora, predictions and traces, plain text for label
vocabularies, INI for reports and configurations and HDF5 (through pytables) for model
checkpoints. Lines of JSON lines files that start with '#' are comments.
"""

from __future__ import division, print_function

import io
import json
import configparser

import numpy as np
import tables as tb

from kdmltc.core.utils import atomic_path, atomic_write_text
from kdmltc.exceptions import (VocabularyError, CorpusFormatError, PredictionFormatError,
                               CheckpointError)

CHECKPOINT_VERSION = 1
PREDICTION_FIELDS = ("id", "label", "probability", "truth", "fold")


def comment_block(text):
    """Prefix every line of text with '# '."""
    return "".join("# " + l + "\n" for l in text.splitlines())


def read_vocabulary(fn):
    """
    Read a label vocabulary, one label per line. Blank lines are ignored.

    Returns
    -------
    labels : list of str
    """
    try:
        with io.open(fn, "r", encoding="utf-8") as fp:
            labels = [l.strip() for l in fp]
    except OSError as err:
        raise VocabularyError("can not read vocabulary file %s: %s" % (fn, err))
    labels = [l for l in labels if l]
    if not labels:
        raise VocabularyError("vocabulary file %s contains no labels" % fn)
    return labels


def iter_jsonl(fn, error=CorpusFormatError):
    """
    Iterate over the records of a JSON lines file.

    Parameters
    ----------
    fn : str
        file name
    error : type, optional
        exception class raised for malformed lines, called with (msg, lineno)

    Yields
    ------
    lineno : int
        1-based line number
    record : dict
        the parsed object
    """
    with io.open(fn, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except ValueError as err:
                raise error("malformed record: %s" % err, lineno)
            if not isinstance(rec, dict):
                raise error("record is not an object", lineno)
            yield lineno, rec


def write_jsonl(fn, records, header=None):
    """
    Atomically write records as JSON lines, preceded by an optional comment header.
    Floats are written with their shortest exact representation.
    """
    lines = []
    if header:
        lines.append(comment_block(header))
    for rec in records:
        lines.append(json.dumps(rec, ensure_ascii=False) + "\n")
    return atomic_write_text(fn, "".join(lines))


def read_corpus_records(fn):
    """
    Read and check the raw records of a corpus file.

    Returns
    -------
    records : list of (lineno, id, text, labels)
        id is the 0-based record line index as a string when absent
    """
    out = []
    for lineno, rec in iter_jsonl(fn, CorpusFormatError):
        text = rec.get("text")
        labels = rec.get("labels", [])
        if not isinstance(text, str):
            raise CorpusFormatError("field 'text' missing or not a string", lineno)
        if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
            raise CorpusFormatError("field 'labels' has to be a list of strings", lineno)
        doc_id = rec.get("id", str(lineno - 1))
        if not isinstance(doc_id, str):
            doc_id = str(doc_id)
        out.append((lineno, doc_id, text, labels))
    return out


def read_prediction_records(fn):
    """
    Read and check the records of a prediction file.

    Returns
    -------
    records : list of (lineno, id, label, probability, truth, fold)
    """
    out = []
    for lineno, rec in iter_jsonl(fn, PredictionFormatError):
        missing = [f for f in PREDICTION_FIELDS if f not in rec]
        if missing:
            raise PredictionFormatError("missing field(s) %s" % ", ".join(missing), lineno)
        prob = rec["probability"]
        if isinstance(prob, bool) or not isinstance(prob, (int, float)) or not 0. <= prob <= 1.:
            raise PredictionFormatError("probability %r not in [0, 1]" % (prob,), lineno)
        if rec["truth"] not in (0, 1) or isinstance(rec["truth"], float):
            raise PredictionFormatError("truth has to be 0 or 1, got %r" % (rec["truth"],), lineno)
        if isinstance(rec["fold"], bool) or not isinstance(rec["fold"], int) or rec["fold"] < 0:
            raise PredictionFormatError("fold has to be a nonnegative integer", lineno)
        out.append((lineno, str(rec["id"]), str(rec["label"]), float(prob), int(rec["truth"]),
                    rec["fold"]))
    return out


def render_ini(sections):
    """
    Render an ordered mapping section -> {key: value} as INI text. Values are converted
    with str, floats with repr.
    """
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for sec, items in sections.items():
        cp.add_section(sec)
        for k, v in items.items():
            if isinstance(v, float):
                v = repr(v)
            elif v is None:
                v = ""
            cp.set(sec, k, str(v))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def read_ini(fn):
    """Parse an INI file, keys keep their case."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with io.open(fn, "r", encoding="utf-8") as fp:
        cp.read_file(fp)
    return cp


def write_checkpoint(fn, attrs, layers, head_W, head_b, projection=None):
    """
    Save model arrays to a HDF5 file.

    Parameters
    ----------
    fn : str
        file name
    attrs : dict
        scalar or array attributes stored on the root node
    layers : list of (W, b)
        encoder parameters
    head_W, head_b : np.ndarray
        stacked per-label heads
    projection : np.ndarray, optional
        projection matrix of contrastive training
    """
    with atomic_path(fn) as tmp:
        with tb.open_file(tmp, "w", title="kdmltc model checkpoint") as h5f:
            h5f.root._v_attrs.format_version = CHECKPOINT_VERSION
            for k, v in attrs.items():
                setattr(h5f.root._v_attrs, k, v)
            enc = h5f.create_group("/", "encoder", "encoder layers")
            enc._v_attrs.num_layers = len(layers)
            for i, (W, b) in enumerate(layers):
                h5f.create_array(enc, "W%d" % i, np.ascontiguousarray(W))
                h5f.create_array(enc, "b%d" % i, np.ascontiguousarray(b))
            heads = h5f.create_group("/", "heads", "per-label heads")
            h5f.create_array(heads, "W", np.ascontiguousarray(head_W))
            h5f.create_array(heads, "b", np.ascontiguousarray(head_b))
            if projection is not None:
                h5f.create_array("/", "projection", np.ascontiguousarray(projection))
    return fn


def read_checkpoint(fn, attr_names):
    """
    Load a checkpoint written by write_checkpoint.

    Returns
    -------
    attrs : dict
    layers : list of (W, b)
    head_W, head_b : np.ndarray
    projection : np.ndarray or None
    """
    try:
        h5f = tb.open_file(fn, "r")
    except (OSError, tb.HDF5ExtError) as err:
        raise CheckpointError("can not open checkpoint %s: %s" % (fn, err))
    with h5f:
        rattrs = h5f.root._v_attrs
        version = getattr(rattrs, "format_version", None)
        if version != CHECKPOINT_VERSION:
            raise CheckpointError("unsupported checkpoint format version %r" % (version,))
        try:
            attrs = {k: getattr(rattrs, k) for k in attr_names}
            enc = h5f.root.encoder
            layers = [(getattr(enc, "W%d" % i).read(), getattr(enc, "b%d" % i).read())
                      for i in range(int(enc._v_attrs.num_layers))]
            head_W = h5f.root.heads.W.read()
            head_b = h5f.root.heads.b.read()
        except (AttributeError, tb.NoSuchNodeError) as err:
            raise CheckpointError("incomplete checkpoint %s: %s" % (fn, err))
        projection = h5f.root.projection.read() if "/projection" in h5f else None
    return attrs, layers, head_W, head_b, projection
