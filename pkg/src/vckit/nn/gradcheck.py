"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..errors import RangeError
from .param import Param


def grad_check(
    loss_fn: Callable[[], float],
    params: Sequence[Param],
    eps: float = 1e-4,
    max_coords: int = 6,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    loss_fn must run forward and backward, accumulate into param.grad, and
    return the scalar loss; it must be deterministic. Up to max_coords
    coordinates per parameter are probed. Run with float64 parameters for
    meaningful tolerances.
    """
    rng = np.random.default_rng(seed)
    for p in params:
        p.zero_grad()
    base = float(loss_fn())
    if not math.isfinite(base):
        raise RangeError(f"loss is not finite: {base}")
    analytic = [p.grad.copy() for p in params]

    worst = 0.0
    for p, grad in zip(params, analytic):
        n = p.data.size
        coords = rng.choice(n, size=min(max_coords, n), replace=False)
        flat = p.data.reshape(-1)
        for i in coords:
            saved = flat[i]
            flat[i] = saved + eps
            lo_hi = float(loss_fn())
            flat[i] = saved - eps
            lo_lo = float(loss_fn())
            flat[i] = saved
            if not (math.isfinite(lo_hi) and math.isfinite(lo_lo)):
                raise RangeError("loss became non-finite under perturbation")
            numeric = (lo_hi - lo_lo) / (2.0 * eps)
            a = float(grad.reshape(-1)[i])
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, rel)
    return worst
