"""Padded batches over variable-length mel sequences and the masked L1 loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FormatError


@dataclass
class Batch:
    mels: np.ndarray      # B x T_max x n_mels
    mask: np.ndarray      # B x T_max booleans, true = real frame
    lengths: np.ndarray   # B ints


def pad_batch(mels: list[np.ndarray]) -> Batch:
    """Zero-pad to the longest item; mask marks real frames."""
    if not mels:
        raise FormatError("cannot batch an empty list of mels")
    lengths = np.array([m.shape[0] for m in mels], dtype=np.int64)
    n_mels = mels[0].shape[1]
    t_max = int(lengths.max())
    out = np.zeros((len(mels), t_max, n_mels), dtype=np.float32)
    mask = np.zeros((len(mels), t_max), dtype=bool)
    for b, m in enumerate(mels):
        if m.ndim != 2 or m.shape[1] != n_mels:
            raise FormatError(f"inconsistent mel shapes in batch: {m.shape}")
        out[b, : m.shape[0]] = m
        mask[b, : m.shape[0]] = True
    return Batch(out, mask, lengths)


def masked_l1(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean absolute error over real frames only."""
    if pred.shape != target.shape or pred.shape[:-1] != mask.shape:
        raise FormatError(
            f"shape mismatch: pred {pred.shape}, target {target.shape}, mask {mask.shape}"
        )
    count = int(mask.sum())
    if count == 0:
        raise FormatError("masked_l1 needs at least one real frame")
    diff = np.abs(pred - target) * mask[..., None]
    return float(diff.sum() / (count * pred.shape[-1]))


def masked_l1_grad(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """d masked_l1 / d pred; zero on padded frames."""
    count = int(mask.sum())
    if count == 0:
        raise FormatError("masked_l1 needs at least one real frame")
    scale = 1.0 / (count * pred.shape[-1])
    return (np.sign(pred - target) * mask[..., None] * scale).astype(pred.dtype)
