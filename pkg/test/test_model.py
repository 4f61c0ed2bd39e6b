import os
import tempfile

import pytest
import numpy as np
import numpy.testing as npt
import scipy.sparse as sp

from kdmltc import model as mdl
from kdmltc.core import losses, network
from kdmltc.exceptions import NonFiniteGradientError, NonFiniteUpdateError, CheckpointError


def _small(activation="tanh", labels=2, seed=0):
    spec = mdl.EncoderSpec(6, [5, 4], activation, "teacher")
    return mdl.init_model(spec, labels, seed)


def _data(seed=1, n=7):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, 6)), rng.integers(0, 2, n)


def _numeric(model, X, y, label, param, eps=1e-6):
    g = np.zeros_like(param)
    for i in np.ndindex(param.shape):
        old = param[i]
        param[i] = old + eps
        lp = losses.hard_loss_and_grad(mdl.forward_batch(model, X, label)[1], y)[0].sum()
        param[i] = old - eps
        lm = losses.hard_loss_and_grad(mdl.forward_batch(model, X, label)[1], y)[0].sum()
        param[i] = old
        g[i] = (lp - lm) / (2 * eps)
    return g


def _close(a, n):
    assert np.all(np.abs(a - n) <= 1e-4 * max(np.max(np.abs(n)), 1.) + 1e-7)


class TestSpec(object):
    def test_defaults(self):
        t = mdl.EncoderSpec.teacher_default(100)
        s = mdl.EncoderSpec.student_default(100)
        assert t.hidden_sizes == [128, 64] and t.H == 64
        assert s.hidden_sizes == [32] and s.role == "student"

    @pytest.mark.parametrize("args", [(10, []), (10, [0]), (10, [4], "sigmoid"), (0, [4]),
                                      (10, [4], "tanh", "assistant")])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            mdl.EncoderSpec(*args)

    def test_optimizer(self):
        with pytest.raises(ValueError):
            mdl.OptimizerConfig(-1., 8, 1)
        with pytest.raises(ValueError):
            mdl.OptimizerConfig(0.1, 0, 1)


class TestInit(object):
    def test_shapes(self):
        m = _small(labels=3)
        assert [W.shape for W, _ in m.encoder] == [(6, 5), (5, 4)]
        assert m.head_W.shape == (3, 4, 2)
        assert m.head_b.shape == (3, 2)
        assert m.num_labels == 3

    def test_glorot_bounds(self):
        m = _small()
        a = np.sqrt(6. / (6 + 5))
        assert np.all(np.abs(m.encoder[0][0]) <= a)
        npt.assert_array_equal(m.encoder[0][1], 0.)

    def test_deterministic(self):
        assert _small(seed=4) == _small(seed=4)
        assert not _small(seed=4) == _small(seed=5)

    def test_projection(self):
        m = mdl.init_projection(_small(), 7, 3)
        assert m.projection.shape == (7, 4)


class TestForward(object):
    def test_single(self):
        m = _small()
        X, _ = _data()
        r = mdl.forward(m, X[0], 1)
        assert r.hidden.shape == (4,)
        assert r.logits.shape == (2,)
        npt.assert_allclose(r.logits, mdl.forward_batch(m, X, 1)[1][0])

    def test_proba(self):
        m = _small()
        X, _ = _data()
        p = mdl.predict_proba_batch(m, X, 0)
        assert np.all((p >= 0) & (p <= 1))
        npt.assert_allclose(mdl.predict_proba(m, X[2], 0), p[2])

    def test_bad_input(self):
        m = _small()
        with pytest.raises(ValueError):
            mdl.forward(m, np.zeros(5), 0)
        with pytest.raises(ValueError):
            mdl.forward(m, np.zeros(6), 2)

    def test_sparse_equals_dense(self):
        m = _small()
        X, _ = _data()
        X[X < 0.3] = 0.
        npt.assert_allclose(mdl.forward_batch(m, sp.csr_matrix(X), 1)[1], mdl.forward_batch(m, X, 1)[1])


class TestBackward(object):
    @pytest.mark.parametrize("activation", ["tanh", "relu"])
    def test_gradient_check(self, activation):
        m = _small(activation)
        X, y = _data()
        label = 1
        _, z, cache = mdl.forward_batch(m, X, label)
        _, g = losses.hard_loss_and_grad(z, y)
        grads = mdl.backward(m, cache, label, g)
        for l, (W, b) in enumerate(m.encoder):
            _close(grads.encoder[l][0], _numeric(m, X, y, label, W))
            _close(grads.encoder[l][1], _numeric(m, X, y, label, b))
        _close(grads.head[0], _numeric(m, X, y, label, m.head_W[label]))
        _close(grads.head[1], _numeric(m, X, y, label, m.head_b[label]))

    def test_hidden_gradient(self):
        m = _small()
        X, y = _data()
        _, z, cache = mdl.forward_batch(m, X, 0)
        dh = np.random.default_rng(2).normal(size=(X.shape[0], 4))
        g0 = mdl.backward(m, cache, 0, np.zeros_like(z), dh)
        # loss = sum(h * dh) has gradient dh with respect to h
        W = m.encoder[0][0]
        eps = 1e-6
        old = W[2, 1]
        W[2, 1] = old + eps
        lp = np.sum(mdl.forward_batch(m, X, 0)[0] * dh)
        W[2, 1] = old - eps
        lm = np.sum(mdl.forward_batch(m, X, 0)[0] * dh)
        W[2, 1] = old
        npt.assert_allclose(g0.encoder[0][0][2, 1], (lp - lm) / (2 * eps), rtol=1e-5, atol=1e-8)

    def test_sparse_first_layer(self):
        m = _small()
        X, y = _data()
        X[:, [1, 4]] = 0.
        Xs = sp.csr_matrix(X)
        _, z, cache = mdl.forward_batch(m, Xs, 0)
        grads = mdl.backward(m, cache, 0, losses.hard_loss_and_grad(z, y)[1])
        dW = grads.encoder[0][0]
        assert isinstance(dW, network.SparseRows)
        assert 1 not in dW.rows and 4 not in dW.rows
        _, zd, cached = mdl.forward_batch(m, X, 0)
        dense = mdl.backward(m, cached, 0, losses.hard_loss_and_grad(zd, y)[1]).encoder[0][0]
        npt.assert_allclose(dW.to_dense(), dense, atol=1e-14)


class TestSgd(object):
    def test_step(self):
        m = _small()
        X, y = _data()
        _, z, cache = mdl.forward_batch(m, X, 0)
        grads = mdl.backward(m, cache, 0, losses.hard_loss_and_grad(z, y)[1])
        before = m.copy()
        mdl.sgd_step(m, grads, 0.1)
        npt.assert_allclose(m.head_W[0], before.head_W[0] - 0.1 * grads.head[0])
        npt.assert_array_equal(m.head_W[1], before.head_W[1])

    def test_nonfinite(self):
        m = _small()
        X, y = _data()
        _, z, cache = mdl.forward_batch(m, X, 0)
        grads = mdl.backward(m, cache, 0, losses.hard_loss_and_grad(z, y)[1])
        grads.encoder[1] = (grads.encoder[1][0], grads.encoder[1][1] * np.nan)
        before = m.copy()
        with pytest.raises(NonFiniteGradientError) as err:
            mdl.sgd_step(m, grads, 0.1)
        assert err.value.layer == "encoder.1.b"
        assert m == before


class TestCheckpoint(object):
    def test_round_trip(self):
        fn = os.path.join(tempfile.mkdtemp(), "model.h5")
        m = mdl.init_projection(_small(labels=3), 8, 1)
        mdl.save_model(m, fn)
        m2 = mdl.load_model(fn)
        assert m2 == m
        assert m2.spec == m.spec

    def test_without_projection(self):
        fn = os.path.join(tempfile.mkdtemp(), "model.h5")
        m = _small()
        mdl.save_model(m, fn)
        assert mdl.load_model(fn).projection is None

    def test_not_a_checkpoint(self):
        fn = os.path.join(tempfile.mkdtemp(), "model.h5")
        with open(fn, "w") as fp:
            fp.write("garbage")
        with pytest.raises(CheckpointError):
            mdl.load_model(fn)


class TestDistillGradient(object):
    @pytest.mark.parametrize("seed", range(100))
    def test_combined_and_contrastive(self, seed):
        rng = np.random.default_rng(seed)
        T, alpha, beta = rng.uniform(2., 4.), rng.uniform(0.1, 0.9), rng.uniform(0., 1.)
        label = int(rng.integers(0, 2))
        student = mdl.init_projection(mdl.init_model(mdl.EncoderSpec(6, [4], "tanh"), 2, seed), 5, seed + 1000)
        teacher = mdl.init_model(mdl.EncoderSpec(6, [8, 5], "tanh", "teacher"), 2, seed + 2000)
        X, y = _data(seed)
        ht, zt, _ = mdl.forward_batch(teacher, X, label)

        def total():
            h, z, _ = mdl.forward_batch(student, X, label)
            lk = losses.kd_loss_and_grad(z, zt, y, T, alpha)[0]
            lc = losses.contrastive_loss_and_grad(h, ht, student.projection)[0]
            return np.sum((1 - beta) * lk + beta * lc)

        h, z, cache = mdl.forward_batch(student, X, label)
        _, gk = losses.kd_loss_and_grad(z, zt, y, T, alpha)
        _, dP, dh = losses.contrastive_loss_and_grad(h, ht, student.projection)
        grads = mdl.backward(student, cache, label, (1 - beta) * gk, beta * dh)
        grads.projection = beta * dP
        params = [student.encoder[0][0], student.encoder[0][1], student.head_W[label], student.head_b[label],
                  student.projection]
        analytic = [grads.encoder[0][0], grads.encoder[0][1], grads.head[0], grads.head[1], grads.projection]
        for param, g in zip(params, analytic):
            n = np.zeros_like(param)
            for i in np.ndindex(param.shape):
                old = param[i]
                param[i] = old + 1e-5
                lp = total()
                param[i] = old - 1e-5
                lm = total()
                param[i] = old
                n[i] = (lp - lm) / 2e-5
            _close(g, n)
        # a tiny step lowers the loss by lr |g|^2 to first order
        before = total()
        sq = sum(np.sum(g**2) for g in analytic)
        mdl.sgd_step(student, grads, 1e-6)
        npt.assert_allclose(before - total(), 1e-6 * sq, rtol=1e-3, atol=1e-13)


class TestClipping(object):
    def _grads(self):
        m = _small()
        X, y = _data()
        _, z, cache = mdl.forward_batch(m, X, 0)
        return m, mdl.backward(m, cache, 0, losses.hard_loss_and_grad(z, y)[1] * 100.)

    def _norm(self, grads):
        return np.sqrt(sum(network.squared_norm(g) for _, g in grads.named()))

    def test_clipped_to_max(self):
        _, grads = self._grads()
        norm = mdl.clip_gradients(grads, 0.5)
        assert norm > 0.5
        npt.assert_allclose(self._norm(grads), 0.5)

    def test_direction_kept(self):
        _, grads = self._grads()
        ref = grads.head[0].copy()
        norm = mdl.clip_gradients(grads, 0.5)
        npt.assert_allclose(grads.head[0], ref * 0.5 / norm)

    @pytest.mark.parametrize("max_norm", [0., 1e9])
    def test_unchanged(self, max_norm):
        _, grads = self._grads()
        ref = grads.encoder[0][0].copy()
        mdl.clip_gradients(grads, max_norm)
        npt.assert_array_equal(grads.encoder[0][0], ref)

    def test_sparse_rows(self):
        m = _small()
        X, y = _data()
        X[:, 2] = 0.
        _, z, cache = mdl.forward_batch(m, sp.csr_matrix(X), 1)
        grads = mdl.backward(m, cache, 1, losses.hard_loss_and_grad(z, y)[1] * 100.)
        norm = mdl.clip_gradients(grads, 0.1)
        assert isinstance(grads.encoder[0][0], network.SparseRows)
        assert norm > 0.1
        npt.assert_allclose(self._norm(grads), 0.1)


class TestOverflow(object):
    def test_step_leaving_finite_range(self):
        m = _small()
        X, y = _data()
        _, z, cache = mdl.forward_batch(m, X, 0)
        grads = mdl.backward(m, cache, 0, losses.hard_loss_and_grad(z, y)[1])
        m.head_W[0][:] = 1.7e308
        grads.head = (np.full_like(grads.head[0], -1e308), grads.head[1])
        before = m.copy()
        with pytest.raises(NonFiniteUpdateError) as err:
            mdl.sgd_step(m, grads, 1.)
        assert err.value.layer == "heads.0.W"
        assert isinstance(err.value, NonFiniteGradientError)
        assert m == before
