"""Numerical core: activation/normalization primitives, layers, gradients.

Each analytic gradient is checked against central differences in float64.
Closed-form oracle values are computed by hand and frozen here.
"""

import numpy as np
import pytest

from vckit.errors import FormatError, RangeError
from vckit.nn import (
    Conv1d,
    ConvertorBlock,
    InstanceNorm,
    Linear,
    Module,
    MultiHeadSelfAttention,
    Param,
    ResBlock,
    adain,
    adain_backward,
    gelu,
    gelu_backward,
    grad_check,
    instance_norm,
    instance_norm_backward,
    softmax,
    softmax_backward,
)
from vckit.nn.layers import _wn_effective


def rand(shape, seed, scale=1.0):
    return scale * np.random.default_rng(seed).standard_normal(shape)


def numeric_grad(f, x, eps=1e-6):
    """Central-difference gradient of scalar f at x, elementwise."""
    g = np.zeros_like(x)
    flat, gf = x.reshape(-1), g.reshape(-1)
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + eps
        hi = f()
        flat[i] = saved - eps
        lo = f()
        flat[i] = saved
        gf[i] = (hi - lo) / (2 * eps)
    return g


class TestGelu:
    def test_known_values(self):
        # x * Phi(x): Phi(1) = 0.8413447460685429
        assert gelu(np.array([0.0]))[0] == 0.0
        assert gelu(np.array([1.0]))[0] == pytest.approx(0.8413447460685429, abs=1e-12)
        assert gelu(np.array([-1.0]))[0] == pytest.approx(-(1 - 0.8413447460685429), abs=1e-12)
        assert gelu(np.array([10.0]))[0] == pytest.approx(10.0, abs=1e-9)
        assert gelu(np.array([-10.0]))[0] == pytest.approx(0.0, abs=1e-9)

    def test_backward_matches_numeric(self):
        x = rand(40, 0)
        dout = rand(40, 1)
        analytic = gelu_backward(dout, x)
        for i in (0, 7, 23, 39):
            h = 1e-6
            num = (gelu(x[i] + h) - gelu(x[i] - h)) / (2 * h)
            assert analytic[i] == pytest.approx(dout[i] * num, rel=1e-6)


class TestInstanceNorm:
    def test_three_point_zscores(self):
        x = np.array([[1.0], [2.0], [3.0]])
        out, _ = instance_norm(x, eps=0.0)
        expected = np.array([-1.2247448713915890, 0.0, 1.2247448713915890])
        assert np.allclose(out[:, 0], expected, atol=1e-12)

    def test_moments(self):
        x = rand((500, 8), 2, scale=3.0) + 5.0
        out, _ = instance_norm(x)
        assert np.max(np.abs(out.mean(axis=0))) < 1e-10
        # population std, slightly below 1 because of eps
        assert np.max(np.abs(out.std(axis=0) - 1.0)) < 1e-4

    def test_affine_invariance_per_channel(self):
        # Channel-wise gain and offset vanish after standardization. With
        # eps = 0 the identity is exact; the default eps only perturbs it
        # in proportion to eps / variance.
        x = rand((64, 4), 3)
        gains = np.array([0.1, 2.0, 7.0, 0.5])
        offs = np.array([-3.0, 0.0, 11.0, 0.25])
        a, _ = instance_norm(x, eps=0.0)
        b, _ = instance_norm(x * gains + offs, eps=0.0)
        assert np.allclose(a, b, atol=1e-10)
        a_eps, _ = instance_norm(x)
        b_eps, _ = instance_norm(x * gains + offs)
        assert np.allclose(a_eps, b_eps, atol=1e-2)

    def test_rejects_bad_shape(self):
        with pytest.raises(FormatError):
            instance_norm(np.zeros(5))

    def test_backward_matches_numeric(self):
        x = rand((12, 3), 4)
        r = rand((12, 3), 5)
        out, cache = instance_norm(x)
        analytic = instance_norm_backward(r, cache)

        def loss():
            o, _ = instance_norm(x)
            return float((o * r).sum())

        assert np.allclose(analytic, numeric_grad(loss, x), atol=1e-7)


class TestAdain:
    def test_small_oracle(self):
        content = np.array([[1.0, -1.0], [0.5, 0.0]])
        spk = np.array([4.0, -9.0])
        out, _ = adain(content, spk)
        # alpha = sqrt(|e|) = [2, 3], beta = e
        assert np.allclose(out, [[2 * 1 + 4, 3 * -1 - 9], [2 * 0.5 + 4, -9.0]])

    def test_moment_contract(self):
        # On standardized content the output carries exactly the injected
        # statistics: mean == e, std == sqrt(|e|).
        rng = np.random.default_rng(6)
        content, _ = instance_norm(rng.standard_normal((1000, 16)))
        spk = rng.uniform(-2.0, 2.0, 16)
        out, _ = adain(content, spk)
        assert np.max(np.abs(out.mean(axis=0) - spk)) < 1e-3
        assert np.max(np.abs(out.std(axis=0) - np.sqrt(np.abs(spk)))) < 1e-2

    def test_shape_mismatch_rejected(self):
        with pytest.raises(FormatError):
            adain(np.zeros((4, 3)), np.zeros(5))

    def test_backward_matches_numeric(self):
        content = rand((9, 4), 7)
        spk = np.array([1.7, -0.4, 3.0, -2.2])
        r = rand((9, 4), 8)
        _, cache = adain(content, spk)
        dcontent, dspk = adain_backward(r, cache)

        def loss_c():
            o, _ = adain(content, spk)
            return float((o * r).sum())

        assert np.allclose(dcontent, numeric_grad(loss_c, content), atol=1e-7)
        assert np.allclose(dspk, numeric_grad(loss_c, spk), atol=1e-6)

    def test_backward_zero_speaker_entry_is_finite(self):
        content = rand((5, 2), 9)
        spk = np.array([0.0, 1.0])
        _, cache = adain(content, spk)
        dcontent, dspk = adain_backward(np.ones((5, 2)), cache)
        assert np.all(np.isfinite(dcontent))
        assert np.all(np.isfinite(dspk))
        # scale path contributes nothing at e = 0; only the shift term remains
        assert dspk[0] == pytest.approx(5.0)


class TestSoftmax:
    def test_rows_sum_to_one(self):
        p = softmax(rand((6, 10), 10, scale=4.0))
        assert np.allclose(p.sum(axis=-1), 1.0, atol=1e-12)
        assert np.all(p >= 0)

    def test_known_case(self):
        p = softmax(np.array([0.0, np.log(2.0)]))
        assert np.allclose(p, [1 / 3, 2 / 3], atol=1e-12)

    def test_shift_invariance(self):
        x = rand(8, 11)
        assert np.allclose(softmax(x), softmax(x + 123.456), atol=1e-12)

    def test_large_inputs_stable(self):
        p = softmax(np.array([1000.0, 1000.5]))
        assert np.all(np.isfinite(p))
        assert p.sum() == pytest.approx(1.0)

    def test_backward_matches_numeric(self):
        x = rand((3, 5), 12)
        r = rand((3, 5), 13)
        probs = softmax(x)
        analytic = softmax_backward(r, probs)

        def loss():
            return float((softmax(x) * r).sum())

        assert np.allclose(analytic, numeric_grad(loss, x), atol=1e-7)


class TestWeightNorm:
    def test_row_norm_equals_abs_gain(self):
        rng = np.random.default_rng(14)
        lin = Linear("l", 6, 4, rng, dtype=np.float64)
        lin.g.data[:] = np.array([2.0, -0.5, 1e-3, 7.0])
        w, _ = _wn_effective(lin.g.data, lin.v.data)
        assert np.allclose(np.linalg.norm(w, axis=1), np.abs(lin.g.data), atol=1e-6)

    def test_initial_row_norm_matches_gain(self):
        rng = np.random.default_rng(15)
        conv = Conv1d("c", 5, 3, 5, rng, dtype=np.float64)
        w, _ = _wn_effective(conv.g.data, conv.v.data.reshape(3, -1))
        assert np.allclose(np.linalg.norm(w, axis=1), np.abs(conv.g.data), atol=1e-6)

    def test_zero_direction_rejected(self):
        with pytest.raises(RangeError):
            _wn_effective(np.ones(2), np.zeros((2, 3)))


class TestLinear:
    def test_forward_oracle_without_weight_norm(self):
        rng = np.random.default_rng(16)
        lin = Linear("l", 3, 2, rng, weight_norm=False, dtype=np.float64)
        x = rand((5, 3), 17)
        out = lin.forward(x)
        assert np.allclose(out, x @ lin.w.data.T + lin.b.data, atol=1e-12)

    def test_grad_check(self):
        rng = np.random.default_rng(18)
        lin = Linear("l", 4, 3, rng, dtype=np.float64)
        x = rand((7, 4), 19)
        r = rand((7, 3), 20)

        def loss():
            out = lin.forward(x)
            lin.backward(out * 0 + r)
            return float((out * r).sum())

        assert grad_check(loss, lin.params()) < 1e-3


class TestConv1d:
    def test_same_padding_forward_oracle(self):
        rng = np.random.default_rng(21)
        conv = Conv1d("c", 2, 3, 5, rng, dtype=np.float64)
        x = rand((9, 2), 22)
        out = conv.forward(x)
        assert out.shape == (9, 3)

        w, _ = _wn_effective(conv.g.data, conv.v.data.reshape(3, -1))
        w = w.reshape(conv.v.data.shape)  # (out, in, k)
        xpad = np.vstack([np.zeros((2, 2)), x, np.zeros((2, 2))])
        want = np.zeros((9, 3))
        for t in range(9):
            for j in range(5):
                want[t] += xpad[t + j] @ w[:, :, j].T
        want += conv.b.data
        assert np.allclose(out, want, atol=1e-10)

    def test_grad_check(self):
        rng = np.random.default_rng(23)
        conv = Conv1d("c", 3, 4, 5, rng, dtype=np.float64)
        x = rand((8, 3), 24)
        r = rand((8, 4), 25)

        def loss():
            out = conv.forward(x)
            conv.backward(r)
            return float((out * r).sum())

        assert grad_check(loss, conv.params()) < 1e-3

    def test_input_gradient_matches_numeric(self):
        rng = np.random.default_rng(26)
        conv = Conv1d("c", 2, 2, 5, rng, dtype=np.float64)
        x = rand((6, 2), 27)
        r = rand((6, 2), 28)
        conv.forward(x)
        dx = conv.backward(r)

        def loss():
            return float((conv.forward(x) * r).sum())

        assert np.allclose(dx, numeric_grad(loss, x), atol=1e-7)


class TestAttention:
    def test_output_shape(self):
        rng = np.random.default_rng(29)
        att = MultiHeadSelfAttention("a", 16, 4, rng, dtype=np.float64)
        out = att.forward(rand((11, 16), 30))
        assert out.shape == (11, 16)

    def test_time_permutation_equivariance(self):
        # Self-attention without positional encoding commutes with frame
        # shuffling; BLAS reduction order changes, so not bitwise.
        rng = np.random.default_rng(31)
        att = MultiHeadSelfAttention("a", 8, 2, rng, dtype=np.float64)
        x = rand((13, 8), 32)
        perm = np.random.default_rng(33).permutation(13)
        a = att.forward(x)[perm]
        b = att.forward(x[perm])
        assert np.max(np.abs(a - b)) < 1e-10

    def test_grad_check(self):
        rng = np.random.default_rng(34)
        att = MultiHeadSelfAttention("a", 8, 2, rng, dtype=np.float64)
        x = rand((7, 8), 35)
        r = rand((7, 8), 36)

        def loss():
            out = att.forward(x)
            att.backward(r)
            return float((out * r).sum())

        assert grad_check(loss, att.params()) < 1e-3


class TestConvertorBlock:
    def test_permutation_equivariance(self):
        rng = np.random.default_rng(37)
        blk = ConvertorBlock("cb", 8, 2, rng, dtype=np.float64)
        x = rand((10, 8), 38)
        perm = np.random.default_rng(39).permutation(10)
        a = blk.forward(x)[perm]
        b = blk.forward(x[perm])
        assert np.max(np.abs(a - b)) < 1e-10

    def test_grad_check(self):
        rng = np.random.default_rng(40)
        blk = ConvertorBlock("cb", 8, 2, rng, dtype=np.float64)
        x = rand((6, 8), 41)
        r = rand((6, 8), 42)

        def loss():
            out = blk.forward(x)
            blk.backward(r)
            return float((out * r).sum())

        assert grad_check(loss, blk.params()) < 1e-3


class TestResBlock:
    def test_residual_structure(self):
        # Zeroing the second conv's gain and bias collapses the block to
        # the identity map.
        rng = np.random.default_rng(43)
        blk = ResBlock("rb", 4, 5, rng, dtype=np.float64)
        blk.conv2.g.data[:] = 1e-30
        blk.conv2.b.data[:] = 0.0
        x = rand((7, 4), 44)
        assert np.allclose(blk.forward(x), x, atol=1e-20)

    def test_grad_check(self):
        rng = np.random.default_rng(45)
        blk = ResBlock("rb", 4, 5, rng, dtype=np.float64)
        x = rand((6, 4), 46)
        r = rand((6, 4), 47)

        def loss():
            out = blk.forward(x)
            blk.backward(r)
            return float((out * r).sum())

        assert grad_check(loss, blk.params()) < 1e-3


class TestModule:
    def test_param_discovery_and_count(self):
        rng = np.random.default_rng(48)
        lin = Linear("l", 3, 2, rng, dtype=np.float64)
        names = [p.name for p in lin.params()]
        assert len(names) == len(set(names))
        assert lin.n_params() == sum(p.data.size for p in lin.params())

    def test_zero_grad(self):
        rng = np.random.default_rng(49)
        lin = Linear("l", 3, 2, rng, dtype=np.float64)
        x = rand((4, 3), 50)
        lin.forward(x)
        lin.backward(np.ones((4, 2)))
        assert any(np.any(p.grad != 0) for p in lin.params())
        lin.zero_grad()
        assert all(np.all(p.grad == 0) for p in lin.params())

    def test_param_dict_round_trip(self):
        rng = np.random.default_rng(51)
        blk = ResBlock("rb", 4, 5, rng)
        d = blk.param_dict()
        assert set(d) == {p.name for p in blk.params()}

    def test_astype_converts_all(self):
        rng = np.random.default_rng(52)
        blk = ConvertorBlock("cb", 8, 2, rng)
        blk64 = blk.astype(np.float64)
        assert all(p.data.dtype == np.float64 for p in blk64.params())
