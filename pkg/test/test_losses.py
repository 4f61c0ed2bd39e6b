import pytest
import numpy as np
import numpy.testing as npt

from kdmltc.core import losses
from kdmltc.core.special_fcts import softmax_t, log_softmax_t
from kdmltc import distill


def _numeric_grad(f, x, eps=1e-6):
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[i] += eps
        xm[i] -= eps
        g[i] = (f(xp) - f(xm)) / (2 * eps)
    return g


def _close(a, n):
    a = np.asarray(a)
    n = np.asarray(n)
    assert np.all(np.abs(a - n) <= 1e-4 * max(np.max(np.abs(n)), 1.) + 1e-7)


class TestSoftmax(object):
    @pytest.mark.parametrize("T", [0.5, 1., 3.])
    def test_sums_to_one(self, T):
        z = np.random.default_rng(0).normal(size=(5, 2)) * 10
        npt.assert_allclose(softmax_t(z, T).sum(axis=1), 1.)

    def test_extreme_logits(self):
        p = softmax_t([1000., -1000.], 1.)
        assert np.all(np.isfinite(p))
        npt.assert_allclose(p, [1., 0.])
        assert np.all(np.isfinite(log_softmax_t([1e308, -1e308], 2.)))

    @pytest.mark.parametrize("T", [0., -1.])
    def test_bad_temperature(self, T):
        with pytest.raises(ValueError):
            softmax_t([1., 2.], T)

    def test_temperature_flattens(self):
        p1 = softmax_t([2., 0.], 1.)
        p4 = softmax_t([2., 0.], 4.)
        assert p4[0] < p1[0]


class TestSoftLoss(object):
    def test_zero_for_equal(self):
        loss, grad = losses.soft_loss_and_grad([[1.5, -0.3]], [[1.5, -0.3]], 2.)
        npt.assert_allclose(loss, 0., atol=1e-15)
        npt.assert_allclose(grad, 0., atol=1e-15)

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        loss, _ = losses.soft_loss_and_grad(rng.normal(size=(20, 2)), rng.normal(size=(20, 2)), 3.)
        assert np.all(loss >= 0)

    @pytest.mark.parametrize("T", [1., 2.79, 4.])
    def test_gradient(self, T):
        zs = np.array([[0.3, -1.2]])
        zt = np.array([[2., 0.5]])
        _, g = losses.soft_loss_and_grad(zs, zt, T)
        n = _numeric_grad(lambda z: losses.soft_loss_and_grad(z, zt, T)[0].sum(), zs)
        _close(g, n)

    def test_scalar_wrapper(self):
        v = distill.soft_loss([0.3, -1.2], [2., 0.5], 2.)
        assert isinstance(v, float)
        npt.assert_allclose(v, losses.soft_loss_and_grad([0.3, -1.2], [2., 0.5], 2.)[0][0])


class TestHardLoss(object):
    def test_value(self):
        loss, _ = losses.hard_loss_and_grad([[0., 0.]], [1])
        npt.assert_allclose(loss, np.log(2.))

    @pytest.mark.parametrize("y", [0, 1])
    def test_gradient(self, y):
        zs = np.array([[0.7, -0.4]])
        _, g = losses.hard_loss_and_grad(zs, [y])
        n = _numeric_grad(lambda z: losses.hard_loss_and_grad(z, [y])[0].sum(), zs)
        _close(g, n)


class TestKdLoss(object):
    @pytest.mark.parametrize("alpha", [0., 0.3, 1.])
    def test_combination(self, alpha):
        zs, zt = [[0.2, 0.1]], [[1., -1.]]
        l, _ = losses.kd_loss_and_grad(zs, zt, [0], 2., alpha)
        ls, _ = losses.soft_loss_and_grad(zs, zt, 2.)
        lh, _ = losses.hard_loss_and_grad(zs, [0])
        npt.assert_allclose(l, alpha * ls + (1 - alpha) * lh)

    def test_alpha_zero_is_hard(self):
        zs, zt = [[0.2, 0.1]], [[1., -1.]]
        _, g = losses.kd_loss_and_grad(zs, zt, [1], 2., 0.)
        _, gh = losses.hard_loss_and_grad(zs, [1])
        npt.assert_array_equal(g, gh)

    def test_gradient(self):
        zs = np.array([[0.2, 0.1], [-2., 1.]])
        zt = np.array([[1., -1.], [0., 0.5]])
        y = [0, 1]
        _, g = losses.kd_loss_and_grad(zs, zt, y, 2.5, 0.4)
        n = _numeric_grad(lambda z: losses.kd_loss_and_grad(z, zt, y, 2.5, 0.4)[0].sum(), zs)
        _close(g, n)

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            losses.kd_loss_and_grad([[0., 0.]], [[0., 0.]], [0], 1., 1.5)

    def test_config_wrapper(self):
        cfg = distill.DistillConfig(temperature=2., alpha=0.25)
        v = distill.kd_loss([0.2, 0.1], [1., -1.], 0, cfg)
        npt.assert_allclose(v, 0.25 * distill.soft_loss([0.2, 0.1], [1., -1.], 2.)
                            + 0.75 * distill.hard_loss([0.2, 0.1], 0))


class TestContrastive(object):
    def setup_method(self):
        rng = np.random.default_rng(3)
        self.hs = rng.normal(size=(4, 3))
        self.ht = rng.normal(size=(4, 5))
        self.P = rng.normal(size=(5, 3))

    def test_range(self):
        loss, _, _ = losses.contrastive_loss_and_grad(self.hs, self.ht, self.P)
        assert np.all((loss >= 0) & (loss <= 2))

    def test_aligned(self):
        P = np.eye(3)
        loss, dP, dh = losses.contrastive_loss_and_grad(self.hs, 2 * self.hs, P)
        npt.assert_allclose(loss, 0., atol=1e-12)

    def test_gradient_projection(self):
        _, dP, _ = losses.contrastive_loss_and_grad(self.hs, self.ht, self.P)
        n = _numeric_grad(lambda P: losses.contrastive_loss_and_grad(self.hs, self.ht, P)[0].sum(), self.P)
        _close(dP, n)

    def test_gradient_student(self):
        _, _, dh = losses.contrastive_loss_and_grad(self.hs, self.ht, self.P)
        n = _numeric_grad(lambda h: losses.contrastive_loss_and_grad(h, self.ht, self.P)[0].sum(), self.hs)
        _close(dh, n)

    def test_zero_norm(self):
        hs = self.hs.copy()
        hs[1] = 0.
        ht = self.ht.copy()
        ht[2] = 0.
        loss, dP, dh = losses.contrastive_loss_and_grad(hs, ht, self.P)
        npt.assert_array_equal(loss[[1, 2]], 1.)
        npt.assert_array_equal(dh[[1, 2]], 0.)
        assert np.all(np.isfinite(dP))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            losses.contrastive_loss_and_grad(self.hs, self.ht, self.P.T)

    def test_scalar_wrapper(self):
        v = distill.contrastive_loss(np.zeros(3), self.ht[0], self.P)
        assert v == 1.


class TestLossAlgebra(object):
    def test_worked_kl(self):
        # teacher [0.5, 0.5], student [0.9, 0.1]
        v = distill.soft_loss([np.log(9.), 0.], [0., 0.], 1.)
        npt.assert_allclose(v, 0.5 * np.log(0.5 / 0.9) + 0.5 * np.log(0.5 / 0.1), rtol=1e-12)
        npt.assert_allclose(v, 0.51083, atol=1e-5)

    @pytest.mark.parametrize("T", [1., 2., 3.5])
    def test_soft_is_scaled_kl(self, T):
        zs, zt = np.array([1.3, -0.2]), np.array([-0.4, 0.9])
        ps = np.exp(zs / T) / np.exp(zs / T).sum()
        pt = np.exp(zt / T) / np.exp(zt / T).sum()
        kl = np.sum(pt * np.log(pt / ps))
        npt.assert_allclose(distill.soft_loss(zs, zt, T), T**2 * kl, rtol=1e-12, atol=1e-15)

    def test_affine_in_alpha(self):
        zs, zt = np.array([[0.4, -1.]]), np.array([[2., 1.]])
        l0 = losses.kd_loss_and_grad(zs, zt, [1], 2., 0.)[0][0]
        l1 = losses.kd_loss_and_grad(zs, zt, [1], 2., 1.)[0][0]
        for a in np.linspace(0, 1, 5):
            npt.assert_allclose(losses.kd_loss_and_grad(zs, zt, [1], 2., a)[0][0], (1 - a) * l0 + a * l1,
                                rtol=1e-12)
