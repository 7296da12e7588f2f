"""AdamW with decoupled weight decay and a staircase exponential LR."""

from __future__ import annotations

import numpy as np

from ..errors import RangeError
from ..nn.param import Param

ADAM_EPS = 1e-8


class AdamW:
    """Standard bias-corrected Adam moments; weight decay multiplies the
    parameter directly (never enters the moments). A step with any
    non-finite gradient is rejected before touching optimizer state."""

    def __init__(self, params: list[Param], beta1: float = 0.9, beta2: float = 0.999,
                 weight_decay: float = 0.01, eps: float = ADAM_EPS):
        self.params = list(params)
        self.beta1 = beta1
        self.beta2 = beta2
        self.weight_decay = weight_decay
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self, lr: float) -> None:
        for p in self.params:
            if not np.all(np.isfinite(p.grad)):
                raise RangeError(f"non-finite gradient in {p.name}; step rejected")
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            g = p.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            m_hat = m / bc1
            v_hat = v / bc2
            p.data = p.data * (1.0 - lr * self.weight_decay) - lr * m_hat / (
                np.sqrt(v_hat) + self.eps
            )

    def state(self) -> dict:
        return {"m": self.m, "v": self.v, "t": self.t}

    def load_state(self, state: dict) -> None:
        m, v = state["m"], state["v"]
        if len(m) != len(self.params) or len(v) != len(self.params):
            raise RangeError("optimizer state does not match parameter list")
        self.m = [np.array(a, dtype=p.data.dtype) for a, p in zip(m, self.params)]
        self.v = [np.array(a, dtype=p.data.dtype) for a, p in zip(v, self.params)]
        self.t = int(state.get("t", 0))


def exp_lr(step: int, base_lr: float, gamma: float, every: int = 100) -> float:
    """Staircase decay: base_lr * gamma^(step // every)."""
    if step < 0:
        raise RangeError(f"step must be non-negative, got {step}")
    return base_lr * gamma ** (step // every)
