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
Teacher fine-tuning, response based knowledge distillation and the cross-validated
training procedures built on them.

All procedures loop over folds, then over labels in vocabulary order (or a given
permutation), and collect the validation predictions of every (fold, label) pair in a
PredictionSet. The sequential procedures keep one teacher and one student per fold and
carry their encoders from label to label; the binary relevance procedures start from
fresh models for every label.
"""

from __future__ import division, print_function

import logging
import warnings

import numpy as np
import scipy.sparse as sp

from kdmltc import model as mdl
from kdmltc.corpus import fit_idf, featurize, DEFAULT_DIM
from kdmltc.core import losses
from kdmltc.core.network import batches, logistic_fit, logistic_proba
from kdmltc.core.utils import make_rng, derive_seed, map_workers
from kdmltc.exceptions import DataError, InvariantError

logger = logging.getLogger(__name__)

VARIANTS = ["sequential_kd", "binary_relevance_kd", "sequential_kd_contrastive",
            "binary_relevance_kd_contrastive", "classifier_chains_baseline",
            "teacher_only", "student_only"]
ABLATION_VARIANTS = VARIANTS[:4]

# stream tags for seed derivation
_TEACHER = 1
_STUDENT = 2
_PROJECTION = 3
_BATCH = 4
_CHAIN = 5


class DistillConfig(object):
    """
    Hyperparameters of a distillation run.

    Parameters
    ----------
    temperature : float
        softmax temperature T > 0 of the soft loss
    alpha : float
        weight of the soft loss in [0, 1]
    learning_rate : float
        nominal learning rate
    batch_size : int
        mini-batch size
    epochs : int
        passes over the training split per label
    max_length : int
        tokens per document used for the features
    lr_scale : float, optional
        factor between the nominal and the applied learning rate
    max_grad_norm : float, optional
        joint L2 norm every mini-batch gradient is clipped to, 0 disables clipping
    """
    FIELDS = ("temperature", "alpha", "learning_rate", "batch_size", "epochs", "max_length")

    def __init__(self, temperature=2., alpha=0.5, learning_rate=2e-5, batch_size=16, epochs=5,
                 max_length=128, lr_scale=5e3, max_grad_norm=1.):
        if not temperature > 0:
            raise ValueError("temperature has to be positive, got %r" % (temperature,))
        if not 0. <= alpha <= 1.:
            raise ValueError("alpha has to be in [0, 1], got %r" % (alpha,))
        if not learning_rate >= 0 or not lr_scale > 0:
            raise ValueError("learning_rate has to be nonnegative and lr_scale positive")
        if not max_grad_norm >= 0:
            raise ValueError("max_grad_norm has to be nonnegative, got %r" % (max_grad_norm,))
        if int(batch_size) < 1 or int(epochs) < 1 or int(max_length) < 1:
            raise ValueError("batch_size, epochs and max_length have to be at least 1")
        self.temperature = float(temperature)
        self.alpha = float(alpha)
        self.learning_rate = float(learning_rate)
        self.batch_size = int(batch_size)
        self.epochs = int(epochs)
        self.max_length = int(max_length)
        self.lr_scale = float(lr_scale)
        self.max_grad_norm = float(max_grad_norm)

    @property
    def effective_lr(self):
        return self.learning_rate * self.lr_scale

    def optimizer(self, seed=0):
        return mdl.OptimizerConfig(self.effective_lr, self.batch_size, self.epochs, seed)

    def replace(self, **kwargs):
        d = self.as_dict()
        d["lr_scale"] = self.lr_scale
        d["max_grad_norm"] = self.max_grad_norm
        d.update(kwargs)
        return DistillConfig(**d)

    def as_dict(self):
        return {f: getattr(self, f) for f in self.FIELDS}

    def __repr__(self):
        return "DistillConfig(%s)" % ", ".join("%s=%r" % kv for kv in sorted(self.as_dict().items()))


class TrainingMode(object):
    """
    Training procedure.

    Parameters
    ----------
    variant : str
        one of VARIANTS
    contrastive_weight : float, optional
        weight beta of the contrastive loss, only for the contrastive variants where it
        defaults to 0.5
    """
    def __init__(self, variant, contrastive_weight=None):
        if variant not in VARIANTS:
            raise ValueError("training mode '%s' unknown has to be one of %s" % (variant, VARIANTS))
        if self._is_contrastive(variant):
            if contrastive_weight is None:
                contrastive_weight = 0.5
            if not 0. <= contrastive_weight <= 1.:
                raise ValueError("contrastive_weight has to be in [0, 1]")
            contrastive_weight = float(contrastive_weight)
        elif contrastive_weight is not None:
            raise ValueError("contrastive_weight is only defined for the contrastive variants")
        self.variant = variant
        self.contrastive_weight = contrastive_weight

    @staticmethod
    def _is_contrastive(variant):
        return variant.endswith("_contrastive")

    @property
    def contrastive(self):
        return self._is_contrastive(self.variant)

    @property
    def sequential(self):
        return not self.variant.startswith("binary_relevance")

    def __repr__(self):
        return "TrainingMode(%r, %r)" % (self.variant, self.contrastive_weight)


class PredictionSet(object):
    """
    Validation predictions collected over folds.

    Parameters
    ----------
    labels : sequence of str
        label names, in vocabulary order
    doc_ids : sequence of str, optional
        the expected documents, if not given documents are registered on first use
    """
    def __init__(self, labels, doc_ids=None):
        self.labels = list(labels)
        self._label_index = {l: j for j, l in enumerate(self.labels)}
        self._fixed = doc_ids is not None
        self.doc_ids = list(doc_ids) if doc_ids is not None else []
        self._doc_index = {d: i for i, d in enumerate(self.doc_ids)}
        self._proba = {}
        self._truth = {}
        self.fold_of = {}

    def __len__(self):
        return len(self._proba)

    def add(self, doc_id, label, probability, truth, fold):
        """Store the prediction of one (document, label) pair."""
        if isinstance(label, str):
            label = self._label_index[label]
        if doc_id not in self._doc_index:
            if self._fixed:
                raise InvariantError("prediction for unknown document '%s'" % doc_id)
            self._doc_index[doc_id] = len(self.doc_ids)
            self.doc_ids.append(doc_id)
        key = (doc_id, label)
        if key in self._proba:
            raise InvariantError("second prediction for document '%s', label '%s'"
                                 % (doc_id, self.labels[label]))
        if self.fold_of.get(doc_id, fold) != fold:
            raise InvariantError("document '%s' predicted in two folds" % doc_id)
        if not 0. <= probability <= 1.:
            raise InvariantError("probability %r outside [0, 1]" % (probability,))
        self._proba[key] = float(probability)
        self._truth[key] = int(truth)
        self.fold_of[doc_id] = int(fold)

    def add_many(self, doc_ids, label, probabilities, truths, fold):
        for d, p, t in zip(doc_ids, probabilities, truths):
            self.add(d, label, float(p), int(t), fold)

    def is_complete(self):
        return len(self._proba) == len(self.doc_ids) * len(self.labels)

    def records(self):
        """(doc id, label name, probability, true bit, fold) in document then label order."""
        out = []
        for d in self.doc_ids:
            for j, l in enumerate(self.labels):
                if (d, j) in self._proba:
                    out.append((d, l, self._proba[(d, j)], self._truth[(d, j)], self.fold_of[d]))
        return out

    def _matrix(self, store, dtype):
        if not self.doc_ids:
            raise DataError("empty prediction set")
        if not self.is_complete():
            raise InvariantError("prediction set is incomplete: %d of %d pairs"
                                 % (len(self._proba), len(self.doc_ids) * len(self.labels)))
        return np.array([[store[(d, j)] for j in range(len(self.labels))] for d in self.doc_ids],
                        dtype=dtype)

    def proba_matrix(self):
        return self._matrix(self._proba, np.float64)

    def truth_matrix(self):
        return self._matrix(self._truth, bool)

    def binary(self, threshold=0.5):
        """Predicted label matrix, label assigned when probability >= threshold."""
        return self.proba_matrix() >= threshold

    def __eq__(self, other):
        return isinstance(other, PredictionSet) and self.labels == other.labels \
            and self.records() == other.records()


class TrainingSplit(object):
    """Features and label matrix of a set of documents."""
    def __init__(self, X, Y, doc_ids):
        self.X = sp.csr_matrix(X)
        self.Y = np.asarray(Y, dtype=bool)
        self.doc_ids = list(doc_ids)

    def __len__(self):
        return self.X.shape[0]


def make_splits(train, validation, dim, max_length):
    """Featurize a train/validation pair with document frequencies of the training part."""
    idf = fit_idf(train, max_length)
    tr = TrainingSplit(featurize(train, dim, max_length, idf).X, train.label_matrix(), train.ids)
    va = TrainingSplit(featurize(validation, dim, max_length, idf).X, validation.label_matrix(),
                       validation.ids)
    return tr, va


def soft_loss(z_s, z_t, T):
    """T^2 KL(softmax(z_t/T) || softmax(z_s/T)) of one pair of logit vectors."""
    return float(losses.soft_loss_and_grad(z_s, z_t, T)[0][0])


def hard_loss(z_s, y):
    """Cross entropy of student logits against the true bit."""
    return float(losses.hard_loss_and_grad(z_s, y)[0][0])


def kd_loss(z_s, z_t, y, cfg):
    """cfg.alpha * soft_loss + (1 - cfg.alpha) * hard_loss."""
    return float(losses.kd_loss_and_grad(z_s, z_t, y, cfg.temperature, cfg.alpha)[0][0])


def contrastive_loss(h_s, h_t, P):
    """1 - cos(P h_s, h_t), 1 if either vector is (numerically) zero."""
    return float(losses.contrastive_loss_and_grad(h_s, h_t, P)[0][0])


def _check_split(split, label):
    if len(split) == 0:
        raise DataError("empty training split")
    if not split.Y[:, label].any():
        warnings.warn("label %d has no positive document in the training split" % label)


def train_teacher(split, label, teacher, cfg, rng=None, history=None):
    """
    Fine-tune a teacher on one label with the hard loss.

    Parameters
    ----------
    split : TrainingSplit
        training documents
    label : int
        label index
    teacher : ModelState
        model to train, updated in place
    cfg : DistillConfig
        learning rate, batch size and epochs
    rng : np.random.Generator, optional
        batch order generator
    history : list, optional
        if given the mean training loss of every epoch is appended

    Returns
    -------
    teacher : ModelState
    """
    _check_split(split, label)
    opt = cfg.optimizer()
    rng = make_rng(0) if rng is None else rng
    y = split.Y[:, label].astype(np.int64)
    for _ in range(opt.epochs):
        total = 0.
        for idx in batches(len(split), opt.batch_size, rng):
            _, z, cache = mdl.forward_batch(teacher, split.X[idx], label)
            loss, g = losses.hard_loss_and_grad(z, y[idx])
            total += loss.sum()
            grads = mdl.backward(teacher, cache, label, g / idx.size)
            mdl.clip_gradients(grads, cfg.max_grad_norm)
            mdl.sgd_step(teacher, grads, opt.learning_rate)
        if history is not None:
            history.append(total / len(split))
    return teacher


def train_student(split, label, student, teacher, cfg, rng=None, contrastive_weight=None,
                  history=None):
    """
    Train a student on one label against a frozen teacher.

    Parameters
    ----------
    split : TrainingSplit
        training documents
    label : int
        label index
    student : ModelState
        model to train, updated in place; needs a projection for contrastive training
    teacher : ModelState or None
        frozen teacher, None trains on the hard loss only
    cfg : DistillConfig
        temperature, alpha and optimizer settings
    rng : np.random.Generator, optional
        batch order generator
    contrastive_weight : float, optional
        weight beta of the hidden state alignment loss, total loss is
        (1 - beta) kd + beta contrastive
    history : list, optional
        mean training loss per epoch is appended

    Returns
    -------
    student : ModelState
    """
    _check_split(split, label)
    if contrastive_weight is not None and (teacher is None or student.projection is None):
        raise ValueError("contrastive training needs a teacher and a student projection")
    opt = cfg.optimizer()
    rng = make_rng(0) if rng is None else rng
    y = split.Y[:, label].astype(np.int64)
    for _ in range(opt.epochs):
        total = 0.
        for idx in batches(len(split), opt.batch_size, rng):
            Xb = split.X[idx]
            h_s, z_s, cache = mdl.forward_batch(student, Xb, label)
            if teacher is None:
                loss, g = losses.hard_loss_and_grad(z_s, y[idx])
            else:
                h_t, z_t, _ = mdl.forward_batch(teacher, Xb, label)
                loss, g = losses.kd_loss_and_grad(z_s, z_t, y[idx], cfg.temperature, cfg.alpha)
            d_hidden = dP = None
            if contrastive_weight is not None:
                beta = contrastive_weight
                lc, dP, dh = losses.contrastive_loss_and_grad(h_s, h_t, student.projection)
                loss = (1. - beta) * loss + beta * lc
                g = (1. - beta) * g
                d_hidden = beta * dh / idx.size
                dP = beta * dP / idx.size
            total += loss.sum()
            grads = mdl.backward(student, cache, label, g / idx.size, d_hidden)
            grads.projection = dP
            mdl.clip_gradients(grads, cfg.max_grad_norm)
            mdl.sgd_step(student, grads, opt.learning_rate)
        if history is not None:
            history.append(total / len(split))
    return student


def _fold_job(job):
    variant, beta, corpus, folds, fold, t_spec, s_spec, cfg, seed, order = job
    train, val = corpus.split(folds, fold)
    tr, va = make_splits(train, val, s_spec.input_dim, cfg.max_length)
    L = len(corpus.vocab)
    sequential = not variant.startswith("binary_relevance")
    use_teacher = variant != "student_only"
    use_student = variant != "teacher_only"
    teacher = student = None
    out = []
    for j in order:
        init_key = 0 if sequential else j
        if j == order[0] or not sequential:
            if use_teacher:
                teacher = mdl.init_model(t_spec, L, derive_seed(seed, fold, init_key, _TEACHER))
            if use_student:
                student = mdl.init_model(s_spec, L, derive_seed(seed, fold, init_key, _STUDENT))
                if beta is not None:
                    mdl.init_projection(student, t_spec.H, derive_seed(seed, fold, init_key, _PROJECTION))
        logger.info("fold %d, label '%s'", fold, corpus.vocab[j])
        if use_teacher:
            train_teacher(tr, j, teacher, cfg, make_rng(seed, fold, j, _TEACHER, _BATCH))
        if use_student:
            train_student(tr, j, student, teacher, cfg, make_rng(seed, fold, j, _STUDENT, _BATCH),
                          contrastive_weight=beta)
        final = student if use_student else teacher
        out.append((j, va.doc_ids, mdl.predict_proba_batch(final, va.X, j), va.Y[:, j]))
    return out


def _check_order(order, L):
    order = list(range(L)) if order is None else [int(j) for j in order]
    if sorted(order) != list(range(L)):
        raise ValueError("label order has to be a permutation of range(%d)" % L)
    return order


def _collect(corpus, folds, results):
    ps = PredictionSet(corpus.vocab.labels, corpus.ids)
    for fold, res in enumerate(results):
        for j, ids, probs, truths in res:
            ps.add_many(ids, j, probs, truths, fold)
    if not ps.is_complete():
        raise InvariantError("folds do not cover every document")
    return ps


def _run_folds(variant, beta, corpus, folds, teacher_spec, student_spec, cfg, seed, label_order,
               workers):
    if teacher_spec.input_dim != student_spec.input_dim:
        raise ValueError("teacher and student have to share the feature dimension")
    if len(corpus.vocab) < 1:
        raise DataError("corpus has no labels")
    order = _check_order(label_order, len(corpus.vocab))
    jobs = [(variant, beta, corpus, folds, f, teacher_spec, student_spec, cfg, seed, order)
            for f in range(folds.k)]
    return _collect(corpus, folds, map_workers(_fold_job, jobs, workers))


def distill_sequential(corpus, folds, teacher_spec, student_spec, cfg, seed, label_order=None,
                       workers=1, contrastive_weight=None):
    """
    Sequential knowledge distillation over stratified folds.

    For every fold one teacher and one student are initialised. For every label the
    teacher is fine-tuned on the training part with the hard loss, then frozen while the
    student is trained with the combined loss. Both encoders are carried over to the next
    label, every label has its own head. The student's validation probabilities are
    recorded.

    Parameters
    ----------
    corpus : Corpus
        the documents
    folds : FoldAssignment
        fold of every document
    teacher_spec, student_spec : EncoderSpec
        architectures, with equal input_dim (the feature dimension)
    cfg : DistillConfig
        hyperparameters
    seed : int
        random seed
    label_order : list of int, optional
        order in which labels are trained
    workers : int, optional
        folds trained in parallel
    contrastive_weight : float, optional
        add the hidden state alignment loss with this weight

    Returns
    -------
    predictions : PredictionSet
    """
    variant = "sequential_kd" if contrastive_weight is None else "sequential_kd_contrastive"
    return _run_folds(variant, contrastive_weight, corpus, folds, teacher_spec, student_spec, cfg,
                      seed, label_order, workers)


def distill_binary_relevance(corpus, folds, teacher_spec, student_spec, cfg, seed,
                             label_order=None, workers=1, contrastive_weight=None):
    """
    As distill_sequential, but a fresh teacher and student are initialised for every
    (fold, label) pair so that labels are learned independently.
    """
    variant = "binary_relevance_kd" if contrastive_weight is None else "binary_relevance_kd_contrastive"
    return _run_folds(variant, contrastive_weight, corpus, folds, teacher_spec, student_spec, cfg,
                      seed, label_order, workers)


def teacher_only(corpus, folds, teacher_spec, cfg, seed, label_order=None, workers=1):
    """Sequentially fine-tuned teacher, scored on its own predictions."""
    return _run_folds("teacher_only", None, corpus, folds, teacher_spec, teacher_spec, cfg, seed,
                      label_order, workers)


def student_only(corpus, folds, student_spec, cfg, seed, label_order=None, workers=1):
    """Sequentially trained student with the hard loss only, no teacher."""
    return _run_folds("student_only", None, corpus, folds, student_spec, student_spec, cfg, seed,
                      label_order, workers)


def _chain_job(job):
    corpus, folds, fold, cfg, seed, order, dim = job
    train, val = corpus.split(folds, fold)
    tr, va = make_splits(train, val, dim, cfg.max_length)
    opt = cfg.optimizer()
    prev = []
    val_bits = []
    out = []
    for j in order:
        # train on the true bits of earlier labels, predict with the chain's own bits
        if prev:
            Xtr = sp.hstack([tr.X, sp.csr_matrix(tr.Y[:, prev].astype(np.float64))], format="csr")
            Xva = sp.hstack([va.X, sp.csr_matrix(np.column_stack(val_bits))], format="csr")
        else:
            Xtr, Xva = tr.X, va.X
        w, b = logistic_fit(Xtr, tr.Y[:, j], opt.learning_rate, opt.batch_size, opt.epochs,
                            make_rng(seed, fold, j, _CHAIN, _BATCH))
        p = logistic_proba(Xva, w, b)
        out.append((j, va.doc_ids, p, va.Y[:, j]))
        prev.append(j)
        val_bits.append((p >= 0.5).astype(np.float64))
    return out


def baseline_classifier_chains(corpus, folds, cfg, seed=0, feature_dim=DEFAULT_DIM,
                               label_order=None, workers=1):
    """
    Classifier chains of linear logistic models over TF-IDF features.

    Link j is trained on the features plus the true bits of the labels before it in the
    chain; at validation time it consumes the links' own predicted bits.

    Returns
    -------
    predictions : PredictionSet
    """
    order = _check_order(label_order, len(corpus.vocab))
    jobs = [(corpus, folds, f, cfg, seed, order, feature_dim) for f in range(folds.k)]
    return _collect(corpus, folds, map_workers(_chain_job, jobs, workers))


def run_training(corpus, folds, mode, teacher_spec, student_spec, cfg, seed, label_order=None,
                 workers=1):
    """
    Run the procedure selected by mode.

    Parameters
    ----------
    mode : TrainingMode or str
        the procedure

    Returns
    -------
    predictions : PredictionSet
    """
    if isinstance(mode, str):
        mode = TrainingMode(mode)
    v = mode.variant
    logger.info("training '%s' over %d folds", v, folds.k)
    if v == "classifier_chains_baseline":
        return baseline_classifier_chains(corpus, folds, cfg, seed, student_spec.input_dim,
                                          label_order, workers)
    if v == "teacher_only":
        return teacher_only(corpus, folds, teacher_spec, cfg, seed, label_order, workers)
    if v == "student_only":
        return student_only(corpus, folds, student_spec, cfg, seed, label_order, workers)
    if mode.sequential:
        return distill_sequential(corpus, folds, teacher_spec, student_spec, cfg, seed,
                                  label_order, workers, mode.contrastive_weight)
    return distill_binary_relevance(corpus, folds, teacher_spec, student_spec, cfg, seed,
                                    label_order, workers, mode.contrastive_weight)
