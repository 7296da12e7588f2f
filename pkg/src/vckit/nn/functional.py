"""Stateless differentiable primitives: GELU, instance norm, AdaIN, softmax.

Forward functions return the auxiliary values their backward passes need.
All computations follow the dtype of their inputs; constants stay python
floats so float32 paths are not silently promoted.
"""

import math

import numpy as np
from scipy.special import erf

from ..errors import FormatError

IN_EPS = 1e-5

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact (erf-form) GELU."""
    return 0.5 * x * (1.0 + erf(x * _INV_SQRT2))


def gelu_backward(dout: np.ndarray, x: np.ndarray) -> np.ndarray:
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    pdf = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    return dout * (cdf + x * pdf)


def instance_norm(x: np.ndarray, eps: float = IN_EPS):
    """Standardize each channel over time (population variance, no affine).

    x is T x C; returns (out, cache) with cache consumed by the backward.
    """
    if x.ndim != 2 or x.shape[0] < 1:
        raise FormatError(f"instance_norm expects a T x C matrix with T >= 1, got {x.shape}")
    mu = x.mean(axis=0)
    var = x.var(axis=0)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv_std
    return xhat, (xhat, inv_std)


def instance_norm_backward(dout: np.ndarray, cache) -> np.ndarray:
    xhat, inv_std = cache
    t = xhat.shape[0]
    sum_d = dout.sum(axis=0)
    sum_dx = (dout * xhat).sum(axis=0)
    return (inv_std / t) * (t * dout - sum_d - xhat * sum_dx)


def adain(content: np.ndarray, spk: np.ndarray):
    """Re-inject speaker statistics: out = sqrt(|e|) * content + e.

    content is T x C and should already be instance-normalized; spk is a
    length-C vector. Returns (out, cache).
    """
    if content.ndim != 2 or spk.ndim != 1 or content.shape[1] != spk.shape[0]:
        raise FormatError(
            f"adain shape mismatch: content {content.shape} vs speaker {spk.shape}"
        )
    alpha = np.sqrt(np.abs(spk))
    out = alpha * content + spk
    return out, (content, spk, alpha)


def adain_backward(dout: np.ndarray, cache):
    """Returns (dcontent, dspk). d alpha/d e = sign(e) / (2 sqrt(|e|)), 0 at e = 0."""
    content, spk, alpha = cache
    dcontent = dout * alpha
    dalpha = (dout * content).sum(axis=0)
    dbeta = dout.sum(axis=0)
    safe = np.where(alpha > 0.0, alpha, 1.0)
    dalpha_de = np.where(alpha > 0.0, np.sign(spk) / (2.0 * safe), 0.0)
    return dcontent, dalpha * dalpha_de + dbeta


def softmax(x: np.ndarray) -> np.ndarray:
    """Softmax over the last axis, shift-stabilized."""
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_backward(dout: np.ndarray, probs: np.ndarray) -> np.ndarray:
    inner = (dout * probs).sum(axis=-1, keepdims=True)
    return probs * (dout - inner)
