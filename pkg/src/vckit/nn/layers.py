"""Differentiable layers: weight-normalized linear/conv, attention blocks.

Every layer caches what its backward needs during forward; backward returns
the input gradient and accumulates into param.grad. Instances are
single-threaded (one in-flight forward per instance).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import FormatError, RangeError
from .functional import (
    gelu,
    gelu_backward,
    instance_norm,
    instance_norm_backward,
    softmax,
    softmax_backward,
)
from .param import Module, Param


def _init_direction(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, dtype):
    v = rng.standard_normal(shape) * (1.0 / math.sqrt(fan_in))
    return v.astype(dtype)


def _wn_effective(g: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective weight g * v / ||v|| with norms taken per output row."""
    flat = v.reshape(v.shape[0], -1)
    norm = np.sqrt((flat * flat).sum(axis=1))
    if np.any(norm == 0.0):
        raise RangeError("weight norm direction has a zero-norm row")
    w = (g / norm).reshape((-1,) + (1,) * (v.ndim - 1)) * v
    return w, norm


def _wn_backward(dw: np.ndarray, g: np.ndarray, v: np.ndarray, norm: np.ndarray):
    """Split an effective-weight gradient into (dg, dv)."""
    flat_v = v.reshape(v.shape[0], -1)
    flat_dw = dw.reshape(dw.shape[0], -1)
    unit = flat_v / norm[:, None]
    dg = (flat_dw * unit).sum(axis=1)
    dv = (g / norm)[:, None] * (flat_dw - unit * dg[:, None])
    return dg, dv.reshape(v.shape)


class Linear(Module):
    """Dense layer with optional weight normalization, applied frame-wise."""

    def __init__(self, name, in_dim, out_dim, rng, bias=True, weight_norm=True,
                 dtype=np.float32):
        self.weight_norm = weight_norm
        v = _init_direction(rng, (out_dim, in_dim), in_dim, dtype)
        if weight_norm:
            self.v = Param(f"{name}.v", v)
            self.g = Param(f"{name}.g", np.linalg.norm(v, axis=1).astype(dtype))
        else:
            self.w = Param(f"{name}.w", v)
        self.b = Param(f"{name}.b", np.zeros(out_dim, dtype=dtype)) if bias else None
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if self.weight_norm:
            w, norm = _wn_effective(self.g.data, self.v.data)
        else:
            w, norm = self.w.data, None
        out = x @ w.T
        if self.b is not None:
            out = out + self.b.data
        self._cache = (x, w, norm)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        x, w, norm = self._cache
        dw = dout.T @ x
        if self.b is not None:
            self.b.grad += dout.sum(axis=0)
        if self.weight_norm:
            dg, dv = _wn_backward(dw, self.g.data, self.v.data, norm)
            self.g.grad += dg
            self.v.grad += dv
        else:
            self.w.grad += dw
        return dout @ w


class Conv1d(Module):
    """Same-padded 1-D convolution over time, weight-normalized.

    Kernel must be odd. The time loop is over kernel taps only; each tap is
    one dense matmul, so the work stays in BLAS.
    """

    def __init__(self, name, in_ch, out_ch, kernel, rng, bias=True, dtype=np.float32):
        if kernel % 2 != 1:
            raise FormatError(f"conv kernel must be odd, got {kernel}")
        self.kernel = kernel
        v = _init_direction(rng, (out_ch, in_ch, kernel), in_ch * kernel, dtype)
        self.v = Param(f"{name}.v", v)
        norms = np.linalg.norm(v.reshape(out_ch, -1), axis=1)
        self.g = Param(f"{name}.g", norms.astype(dtype))
        self.b = Param(f"{name}.b", np.zeros(out_ch, dtype=dtype)) if bias else None
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        t, _ = x.shape
        pad = self.kernel // 2
        w, norm = _wn_effective(self.g.data, self.v.data)
        # contiguous (in, out) matrix per tap keeps the matmuls on the BLAS path
        taps = [np.ascontiguousarray(w[:, :, j].T) for j in range(self.kernel)]
        xpad = np.zeros((t + 2 * pad, x.shape[1]), dtype=x.dtype)
        xpad[pad : pad + t] = x
        out = xpad[0:t] @ taps[0]
        for j in range(1, self.kernel):
            out += xpad[j : j + t] @ taps[j]
        if self.b is not None:
            out = out + self.b.data
        self._cache = (xpad, taps, norm)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        xpad, taps, norm = self._cache
        t = dout.shape[0]
        pad = self.kernel // 2
        dw = np.empty_like(self.v.data)
        dxpad = np.zeros_like(xpad)
        for j in range(self.kernel):
            dw[:, :, j] = dout.T @ xpad[j : j + t]
            dxpad[j : j + t] += dout @ taps[j].T
        if self.b is not None:
            self.b.grad += dout.sum(axis=0)
        dg, dv = _wn_backward(dw, self.g.data, self.v.data, norm)
        self.g.grad += dg
        self.v.grad += dv
        return dxpad[pad : pad + t]


class InstanceNorm(Module):
    """Per-channel standardization over time; no learned affine."""

    def __init__(self, eps: float = 1e-5):
        self.eps = eps
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, self._cache = instance_norm(x, self.eps)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return instance_norm_backward(dout, self._cache)


class MultiHeadSelfAttention(Module):
    """Scaled dot-product self-attention over the time axis, no positions."""

    def __init__(self, name, dim, n_heads, rng, dtype=np.float32):
        if dim % n_heads != 0:
            raise FormatError(f"model dim {dim} not divisible by {n_heads} heads")
        self.n_heads = n_heads
        self.head_dim = dim // n_heads
        self.scale = 1.0 / math.sqrt(self.head_dim)
        self.wq = Linear(f"{name}.q", dim, dim, rng, weight_norm=False, dtype=dtype)
        self.wk = Linear(f"{name}.k", dim, dim, rng, weight_norm=False, dtype=dtype)
        self.wv = Linear(f"{name}.v", dim, dim, rng, weight_norm=False, dtype=dtype)
        self.wo = Linear(f"{name}.o", dim, dim, rng, weight_norm=False, dtype=dtype)
        self._cache = None

    def _split(self, x: np.ndarray) -> np.ndarray:
        """(T, dim) -> contiguous (heads, T, head_dim)."""
        t = x.shape[0]
        return np.ascontiguousarray(
            x.reshape(t, self.n_heads, self.head_dim).transpose(1, 0, 2)
        )

    @staticmethod
    def _merge(x: np.ndarray) -> np.ndarray:
        """(heads, T, head_dim) -> (T, dim)."""
        h, t, hd = x.shape
        return x.transpose(1, 0, 2).reshape(t, h * hd)

    def forward(self, x: np.ndarray) -> np.ndarray:
        q = self._split(self.wq.forward(x))
        k = self._split(self.wk.forward(x))
        v = self._split(self.wv.forward(x))
        scores = (q @ k.transpose(0, 2, 1)) * self.scale
        attn = softmax(scores)
        ctx = attn @ v
        out = self.wo.forward(self._merge(ctx))
        self._cache = (q, k, v, attn)
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        q, k, v, attn = self._cache
        dctx = self._split(self.wo.backward(dout))
        dattn = dctx @ v.transpose(0, 2, 1)
        dv = attn.transpose(0, 2, 1) @ dctx
        dscores = softmax_backward(dattn, attn)
        dq = (dscores @ k) * self.scale
        dk = (dscores.transpose(0, 2, 1) @ q) * self.scale
        dx = self.wq.backward(self._merge(dq))
        dx += self.wk.backward(self._merge(dk))
        dx += self.wv.backward(self._merge(dv))
        return dx


class ConvertorBlock(Module):
    """Self-attention plus weight-normalized pointwise FFN, both residual."""

    def __init__(self, name, dim, n_heads, rng, dtype=np.float32):
        self.attn = MultiHeadSelfAttention(f"{name}.attn", dim, n_heads, rng, dtype=dtype)
        self.ff1 = Linear(f"{name}.ff1", dim, 2 * dim, rng, dtype=dtype)
        self.ff2 = Linear(f"{name}.ff2", 2 * dim, dim, rng, dtype=dtype)
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        y = x + self.attn.forward(x)
        hidden = self.ff1.forward(y)
        z = y + self.ff2.forward(gelu(hidden))
        self._cache = hidden
        return z

    def backward(self, dout: np.ndarray) -> np.ndarray:
        hidden = self._cache
        dh = gelu_backward(self.ff2.backward(dout), hidden)
        dy = dout + self.ff1.backward(dh)
        return dy + self.attn.backward(dy)


class ResBlock(Module):
    """x + Conv(GELU(Conv(x))): two weight-normalized convs, identity skip."""

    def __init__(self, name, channels, kernel, rng, dtype=np.float32):
        self.conv1 = Conv1d(f"{name}.conv1", channels, channels, kernel, rng, dtype=dtype)
        self.conv2 = Conv1d(f"{name}.conv2", channels, channels, kernel, rng, dtype=dtype)
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        pre = self.conv1.forward(x)
        out = x + self.conv2.forward(gelu(pre))
        self._cache = pre
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        pre = self._cache
        dpre = gelu_backward(self.conv2.backward(dout), pre)
        return dout + self.conv1.backward(dpre)
