import warnings

import pytest
import numpy as np
import numpy.testing as npt

from kdmltc import distill, metrics
from kdmltc import model as mdl
from kdmltc.corpus import stratified_kfold, DEFAULT_DIM
from kdmltc.synthetic import generate_synthetic
from kdmltc.core.utils import make_rng, derive_seed
from kdmltc.exceptions import InvariantError, DataError

DIM = 256


@pytest.fixture(scope="module")
def data():
    c = generate_synthetic(90, 3, seed=1, filler_vocab=40, doc_length=6)
    return c, stratified_kfold(c, 3, seed=0)


def _specs(dim=DIM):
    return (mdl.EncoderSpec(dim, [12, 6], "tanh", "teacher"), mdl.EncoderSpec(dim, [5], "tanh", "student"))


CFG = distill.DistillConfig(temperature=2., alpha=0.5, learning_rate=2e-5, batch_size=16, epochs=2,
                            max_length=32)


class TestConfig(object):
    def test_effective_lr(self):
        npt.assert_allclose(CFG.effective_lr, 0.1)
        assert CFG.max_grad_norm == 1.

    @pytest.mark.parametrize("kw", [dict(temperature=0.), dict(alpha=1.1), dict(batch_size=0),
                                    dict(max_grad_norm=-1.),
                                    dict(learning_rate=-1.)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            CFG.replace(**kw)

    def test_replace(self):
        c = CFG.replace(alpha=0.1)
        assert c.alpha == 0.1 and c.temperature == CFG.temperature and c.lr_scale == CFG.lr_scale

    def test_mode(self):
        assert distill.TrainingMode("sequential_kd_contrastive").contrastive_weight == 0.5
        assert not distill.TrainingMode("binary_relevance_kd").sequential
        with pytest.raises(ValueError):
            distill.TrainingMode("sequential_kd", 0.3)
        with pytest.raises(ValueError):
            distill.TrainingMode("mystery")


class TestPredictionSet(object):
    def test_add_and_matrices(self):
        p = distill.PredictionSet(["a", "b"], ["d1", "d2"])
        p.add("d1", "a", 0.9, 1, 0)
        p.add("d1", 1, 0.2, 0, 0)
        assert not p.is_complete()
        with pytest.raises(InvariantError):
            p.proba_matrix()
        p.add_many(["d2"], 0, [0.4], [1], 1)
        p.add("d2", "b", 0.6, 1, 1)
        npt.assert_array_equal(p.binary(), [[True, False], [False, True]])
        assert p.records()[0] == ("d1", "a", 0.9, 1, 0)

    @pytest.mark.parametrize("args", [("d1", "a", 0.5, 1, 0), ("d3", "a", 0.5, 1, 0),
                                      ("d1", "b", 0.5, 1, 1), ("d2", "a", 1.5, 1, 0)])
    def test_violations(self, args):
        p = distill.PredictionSet(["a", "b"], ["d1", "d2"])
        p.add("d1", "a", 0.9, 1, 0)
        with pytest.raises(InvariantError):
            p.add(*args)

    def test_empty(self):
        with pytest.raises(DataError):
            distill.PredictionSet(["a"]).proba_matrix()


class TestTrainers(object):
    def test_teacher_loss_decreases(self, data):
        c, folds = data
        train, val = c.split(folds, 0)
        tr, _ = distill.make_splits(train, val, DIM, 32)
        t, _ = _specs()
        teacher = mdl.init_model(t, 3, 0)
        hist = []
        distill.train_teacher(tr, 0, teacher, CFG.replace(epochs=8), make_rng(0), history=hist)
        assert len(hist) == 8
        assert hist[-1] < hist[0]

    def test_student_needs_projection(self, data):
        c, folds = data
        train, val = c.split(folds, 0)
        tr, _ = distill.make_splits(train, val, DIM, 32)
        t, s = _specs()
        with pytest.raises(ValueError):
            distill.train_student(tr, 0, mdl.init_model(s, 3, 0), mdl.init_model(t, 3, 0), CFG,
                                  contrastive_weight=0.5)

    def test_frozen_teacher(self, data):
        c, folds = data
        train, val = c.split(folds, 0)
        tr, _ = distill.make_splits(train, val, DIM, 32)
        t, s = _specs()
        teacher = mdl.init_model(t, 3, 0)
        before = teacher.copy()
        student = mdl.init_projection(mdl.init_model(s, 3, 1), t.H, 2)
        distill.train_student(tr, 1, student, teacher, CFG, make_rng(1), contrastive_weight=0.5)
        assert teacher == before
        assert student.is_finite()


class TestProcedures(object):
    def test_complete(self, data):
        c, folds = data
        t, s = _specs()
        p = distill.distill_sequential(c, folds, t, s, CFG, seed=0)
        assert p.is_complete()
        assert p.doc_ids == c.ids
        P = p.proba_matrix()
        assert np.all((P >= 0) & (P <= 1))
        for d in c.ids:
            assert p.fold_of[d] == folds.fold_of[d]

    def test_deterministic(self, data):
        c, folds = data
        t, s = _specs()
        p1 = distill.distill_binary_relevance(c, folds, t, s, CFG, seed=3)
        p2 = distill.distill_binary_relevance(c, folds, t, s, CFG, seed=3)
        assert p1 == p2

    def test_alpha_zero_is_student_only(self, data):
        c, folds = data
        t, s = _specs()
        cfg = CFG.replace(alpha=0.)
        p1 = distill.distill_sequential(c, folds, t, s, cfg, seed=5)
        p2 = distill.student_only(c, folds, s, cfg, seed=5)
        assert p1 == p2

    def test_single_label_sequential_is_binary_relevance(self):
        c = generate_synthetic(45, 1, seed=2, filler_vocab=30, doc_length=5)
        folds = stratified_kfold(c, 3, seed=1)
        t, s = _specs()
        p1 = distill.distill_sequential(c, folds, t, s, CFG, seed=2)
        p2 = distill.distill_binary_relevance(c, folds, t, s, CFG, seed=2)
        assert p1 == p2

    def test_binary_relevance_order_free(self, data):
        c, folds = data
        t, s = _specs()
        p1 = distill.distill_binary_relevance(c, folds, t, s, CFG, seed=1)
        p2 = distill.distill_binary_relevance(c, folds, t, s, CFG, seed=1, label_order=[2, 0, 1])
        npt.assert_array_equal(p1.proba_matrix(), p2.proba_matrix())

    def test_zero_contrastive_weight(self, data):
        c, folds = data
        t, s = _specs()
        p1 = distill.distill_sequential(c, folds, t, s, CFG, seed=4)
        p2 = distill.distill_sequential(c, folds, t, s, CFG, seed=4, contrastive_weight=0.)
        npt.assert_array_equal(p1.proba_matrix(), p2.proba_matrix())

    def test_workers(self, data):
        c, folds = data
        t, s = _specs()
        p1 = distill.distill_sequential(c, folds, t, s, CFG, seed=0, workers=1)
        p2 = distill.distill_sequential(c, folds, t, s, CFG, seed=0, workers=3)
        assert p1 == p2

    def test_bad_order(self, data):
        c, folds = data
        t, s = _specs()
        with pytest.raises(ValueError):
            distill.distill_sequential(c, folds, t, s, CFG, seed=0, label_order=[0, 0, 1])

    @pytest.mark.parametrize("variant", distill.VARIANTS)
    def test_run_training(self, data, variant):
        c, folds = data
        t, s = _specs()
        p = distill.run_training(c, folds, variant, t, s, CFG, seed=0)
        assert p.is_complete()
        assert np.all(np.isfinite(p.proba_matrix()))

    def test_chains_learn_keywords(self):
        c = generate_synthetic(150, 2, seed=3, filler_vocab=60, doc_length=6)
        folds = stratified_kfold(c, 3, seed=0)
        p = distill.baseline_classifier_chains(c, folds, CFG.replace(epochs=20, learning_rate=2e-4),
                                               feature_dim=DIM)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = metrics.full_report(p)
        assert rep.mean_auc > 0.8


class TestLearning(object):
    @pytest.mark.parametrize("variant", ["teacher_only", "sequential_kd"])
    def test_keywords_are_learned(self, variant):
        c = generate_synthetic(150, 2, seed=4, filler_vocab=60, doc_length=6)
        folds = stratified_kfold(c, 3, seed=0)
        t, s = _specs()
        p = distill.run_training(c, folds, variant, t, s, CFG.replace(epochs=10, learning_rate=1e-4), seed=0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = metrics.full_report(p)
        assert rep.mean_auc > 0.7


class TestCarryOver(object):
    def test_student_only_keeps_encoder(self, data):
        c, folds = data
        _, s = _specs()
        p = distill.student_only(c, folds, s, CFG, seed=6)
        P = p.proba_matrix()
        train, val = c.split(folds, 0)
        tr, va = distill.make_splits(train, val, DIM, CFG.max_length)
        rows = [p.doc_ids.index(d) for d in va.doc_ids]
        student = mdl.init_model(s, 3, derive_seed(6, 0, 0, distill._STUDENT))
        for j in range(3):
            distill.train_student(tr, j, student, None, CFG, make_rng(6, 0, j, distill._STUDENT, distill._BATCH))
            npt.assert_array_equal(P[rows, j], mdl.predict_proba_batch(student, va.X, j))

    def test_student_only_differs_from_fresh_students(self, data):
        c, folds = data
        _, s = _specs()
        P = distill.student_only(c, folds, s, CFG, seed=6).proba_matrix()
        train, val = c.split(folds, 0)
        tr, va = distill.make_splits(train, val, DIM, CFG.max_length)
        fresh = mdl.init_model(s, 3, derive_seed(6, 0, 0, distill._STUDENT))
        distill.train_student(tr, 2, fresh, None, CFG, make_rng(6, 0, 2, distill._STUDENT, distill._BATCH))
        rows = [c.ids.index(d) for d in va.doc_ids]
        assert not np.array_equal(P[rows, 2], mdl.predict_proba_batch(fresh, va.X, 2))


@pytest.fixture(scope="module")
def desk():
    c = generate_synthetic(1000, 10, seed=0)
    folds = stratified_kfold(c, 5, seed=0)
    specs = (mdl.EncoderSpec.teacher_default(DEFAULT_DIM), mdl.EncoderSpec.student_default(DEFAULT_DIM))
    cache = {}

    def run(variant):
        if variant not in cache:
            p = distill.run_training(c, folds, variant, specs[0], specs[1], distill.DistillConfig(), seed=0)
            cache[variant] = metrics.example_f1(p)
        return cache[variant]
    return run


class TestDeskRun(object):
    def test_teacher(self, desk):
        assert desk("teacher_only") >= 0.95

    def test_distilled_student(self, desk):
        assert desk("sequential_kd") >= 0.90

    def test_distillation_not_worse_than_hard_loss(self, desk):
        assert desk("sequential_kd") >= desk("student_only") - 0.02


class TestAblationShape(object):
    def test_sequential_not_worse_on_correlated_labels(self):
        c = generate_synthetic(1000, 4, seed=1, correlation=0.8)
        folds = stratified_kfold(c, 5, seed=0)
        t, s = mdl.EncoderSpec.teacher_default(2**13), mdl.EncoderSpec.student_default(2**13)
        cfg = distill.DistillConfig()
        seq = metrics.example_f1(distill.distill_sequential(c, folds, t, s, cfg, seed=0))
        br = metrics.example_f1(distill.distill_binary_relevance(c, folds, t, s, cfg, seed=0))
        assert seq >= br - 0.02
