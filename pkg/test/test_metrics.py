import math
import configparser

import pytest
import numpy as np
import numpy.testing as npt

from kdmltc import metrics
from kdmltc.core import scores
from kdmltc.distill import PredictionSet


def _pset(P, Y, labels=None, order=None):
    P = np.asarray(P, dtype=float)
    Y = np.asarray(Y, dtype=int)
    labels = labels or ["l%d" % j for j in range(P.shape[1])]
    order = range(P.shape[0]) if order is None else order
    ps = PredictionSet(labels)
    for i in order:
        for j, l in enumerate(labels):
            ps.add("d%d" % i, l, P[i, j], Y[i, j], i % 2)
    return ps


def _oracle(Y, Yh):
    """Per-document and per-label loops."""
    n, L = Y.shape
    ex = []
    for i in range(n):
        a = set(np.flatnonzero(Y[i]))
        b = set(np.flatnonzero(Yh[i]))
        ex.append(1. if not a and not b else 2. * len(a & b) / (len(a) + len(b)))
    per = []
    TP = FP = FN = 0
    for j in range(L):
        tp = int(np.sum(Y[:, j] & Yh[:, j]))
        fp = int(np.sum(~Y[:, j] & Yh[:, j]))
        fn = int(np.sum(Y[:, j] & ~Yh[:, j]))
        TP, FP, FN = TP + tp, FP + fp, FN + fn
        p = tp / (tp + fp) if tp + fp else 0.
        r = tp / (tp + fn) if tp + fn else 0.
        per.append(2 * p * r / (p + r) if p + r else 0.)
    p = TP / (TP + FP) if TP + FP else 0.
    r = TP / (TP + FN) if TP + FN else 0.
    micro = 2 * p * r / (p + r) if p + r else 0.
    sup = Y.sum(axis=0)
    weighted = math.fsum(s * f for s, f in zip(sup, per)) / sup.sum() if sup.sum() else 0.
    return math.fsum(ex) / n, micro, math.fsum(per) / L, weighted


class TestScores(object):
    def test_worked_example(self):
        Y = np.array([[1, 0], [0, 0], [1, 1]], dtype=bool)
        Yh = np.array([[1, 1], [0, 0], [0, 1]], dtype=bool)
        npt.assert_allclose(scores.example_f1(Y, Yh), (2 / 3. + 1 + 2 / 3.) / 3)
        npt.assert_allclose(scores.micro_f1(Y, Yh), 2 / 3.)
        npt.assert_allclose(scores.macro_f1(Y, Yh), 2 / 3.)

    def test_empty_document(self):
        assert scores.example_f1(np.zeros((2, 3), bool), np.zeros((2, 3), bool)) == 1.

    def test_zero_denominators(self):
        assert scores.prf1(0, 0, 0) == (0., 0., 0.)
        assert scores.micro_f1(np.zeros((2, 2), bool), np.zeros((2, 2), bool)) == 0.

    def test_weighted_literal(self):
        Y = np.array([[1, 1], [1, 0], [0, 0], [1, 0]], dtype=bool)
        Yh = np.array([[1, 0], [1, 0], [0, 1], [0, 0]], dtype=bool)
        f = scores.label_f1(Y, Yh)
        npt.assert_allclose(scores.weighted_f1(Y, Yh), (3 * f[0] + f[1]) / 4.)
        npt.assert_allclose(scores.weighted_f1(Y, Yh, literal=True), (3 * f[0] + f[1]) / 4.)
        Y2 = Y.copy()
        Y2[2, 1] = True
        f2 = scores.label_f1(Y2, Yh)
        npt.assert_allclose(scores.weighted_f1(Y2, Yh, literal=True), (3 * f2[0] + 2 * f2[1]) / 4.)
        npt.assert_allclose(scores.weighted_f1(Y2, Yh), (3 * f2[0] + 2 * f2[1]) / 5.)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle(self, seed):
        rng = np.random.default_rng(seed)
        Y = rng.random((40, 5)) < 0.3
        Yh = rng.random((40, 5)) < 0.3
        ex, mi, ma, we = _oracle(Y, Yh)
        npt.assert_allclose(scores.example_f1(Y, Yh), ex)
        npt.assert_allclose(scores.micro_f1(Y, Yh), mi)
        npt.assert_allclose(scores.macro_f1(Y, Yh), ma)
        npt.assert_allclose(scores.weighted_f1(Y, Yh), we)


class TestAuc(object):
    def test_value(self):
        npt.assert_allclose(scores.auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]), 0.75)

    def test_ties(self):
        assert scores.auc([0.5, 0.5], [0, 1]) == 0.5
        npt.assert_allclose(scores.auc([0.2, 0.5, 0.5, 0.9], [0, 0, 1, 1]), 0.875)

    def test_undefined(self):
        assert scores.auc([0.1, 0.2], [1, 1]) is None
        assert scores.auc([0.1, 0.2], [0, 0]) is None

    def test_pairs(self):
        npt.assert_allclose(metrics.auc([(0.9, 1), (0.1, 0), (0.6, 0)]), 1.)

    @pytest.mark.parametrize("seed", range(3))
    def test_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        s = np.round(rng.random(30), 1)
        t = rng.random(30) < 0.4
        pos, neg = s[t], s[~t]
        ref = np.mean([1. if a > b else 0.5 if a == b else 0. for a in pos for b in neg])
        npt.assert_allclose(scores.auc(s, t), ref)

    def test_mean_auc(self):
        assert metrics.mean_auc([None, None]) is None
        npt.assert_allclose(metrics.mean_auc([0.5, None, 1.]), 0.75)


class TestReport(object):
    def setup_method(self):
        rng = np.random.default_rng(7)
        self.P = rng.random((12, 3))
        self.Y = rng.random((12, 3)) < 0.5
        self.Y[0] = [1, 1, 1]
        self.Y[1] = [0, 0, 0]

    def test_matches_scores(self):
        p = _pset(self.P, self.Y)
        rep = metrics.full_report(p)
        Yh = self.P >= 0.5
        assert rep.example_f1 == scores.example_f1(self.Y, Yh)
        assert rep.micro_f1 == metrics.micro_f1(p)
        assert rep.macro_f1 == metrics.macro_f1(p)
        assert rep.weighted_f1 == metrics.weighted_f1(p)
        assert list(rep.per_label) == ["l0", "l1", "l2"]

    def test_threshold(self):
        p = _pset(self.P, self.Y)
        assert metrics.example_f1(p, 0.) == scores.example_f1(self.Y, np.ones_like(self.Y))

    def test_permutation_invariant(self):
        order = np.random.default_rng(1).permutation(12)
        r1 = metrics.full_report(_pset(self.P, self.Y))
        r2 = metrics.full_report(_pset(self.P, self.Y, order=order))
        assert r1 == r2

    def test_undefined_auc_warns(self):
        Y = self.Y.copy()
        Y[:, 1] = True
        with pytest.warns(UserWarning):
            rep = metrics.full_report(_pset(self.P, Y))
        assert rep.per_label["l1"][3] is None
        assert rep.mean_auc is not None

    def test_counts(self):
        c = metrics.confusion_counts(_pset(self.P, self.Y))
        assert all(sum(ci) == 12 for ci in c)
        npt.assert_allclose(metrics.prf1(metrics.ConfusionCounts(2, 2, 0, 5)), (0.5, 1., 2 / 3.))

    def test_ini(self):
        rep = metrics.full_report(_pset(self.P, self.Y))
        cp = configparser.ConfigParser(interpolation=None)
        cp.read_string(rep.to_ini(header="run 1"))
        assert cp["metrics"]["example_f1"] == "%.6f" % rep.example_f1
        assert cp.has_section("label:l2")
        assert int(cp["label:l0"]["tp"]) == rep.counts["l0"].tp


class TestOracleGrid(object):
    def test_small_matrices(self):
        rng = np.random.default_rng(2024)
        for _ in range(10000):
            n, L = rng.integers(1, 7), rng.integers(1, 4)
            Y = rng.random((n, L)) < 0.5
            Yh = rng.random((n, L)) < 0.5
            ex, mi, ma, we = _oracle(Y, Yh)
            assert scores.example_f1(Y, Yh) == ex
            assert scores.micro_f1(Y, Yh) == mi
            assert scores.macro_f1(Y, Yh) == ma
            npt.assert_allclose(scores.weighted_f1(Y, Yh), we, rtol=1e-12)

    def test_auc_with_ties(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            s = rng.integers(0, 5, 12) / 4.
            t = rng.random(12) < 0.5
            if t.all() or not t.any():
                continue
            ref = np.mean([1. if a > b else 0.5 if a == b else 0. for a in s[t] for b in s[~t]])
            assert scores.auc(s, t) == ref
