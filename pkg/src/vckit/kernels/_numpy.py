"""Pure-numpy implementations of the hot inner loops.

These mirror the signatures of the compiled extension exactly; the
vectorized resampler trades memory (a chunked taps-by-output matrix) for
speed, the overlap-add is a short python loop over frames.
"""

import numpy as np

RESAMPLE_CHUNK = 4096


def overlap_add(frames: np.ndarray, hop: int, out_len: int) -> np.ndarray:
    """Sum frame rows into an output buffer at offsets of hop samples."""
    out = np.zeros(out_len, dtype=np.float64)
    n = frames.shape[1]
    for t in range(frames.shape[0]):
        start = t * hop
        out[start : start + n] += frames[t]
    return out


def resample_taps(
    xpad: np.ndarray,
    table: np.ndarray,
    n_out: int,
    ratio: float,
    half_width: float,
    phases: int,
    pad: int,
) -> np.ndarray:
    """Windowed-sinc interpolation of n_out samples at positions m*ratio.

    xpad is the input padded with `pad` zeros on both sides; `table` holds
    the right half of the symmetric kernel sampled every 1/phases input
    samples, with at least two trailing zeros for safe interpolation.
    """
    out = np.empty(n_out, dtype=np.float64)
    max_taps = int(2 * half_width) + 2
    k = np.arange(max_taps)
    last = table.size - 2
    for start in range(0, n_out, RESAMPLE_CHUNK):
        m = np.arange(start, min(start + RESAMPLE_CHUNK, n_out))
        center = m * ratio
        n0 = np.ceil(center - half_width).astype(np.int64)
        pos = n0[:, None] + k[None, :]
        dist = np.abs(center[:, None] - pos) * phases
        idx = dist.astype(np.int64)
        np.minimum(idx, last, out=idx)
        frac = dist - idx
        weights = table[idx] * (1.0 - frac) + table[idx + 1] * frac
        out[m] = np.einsum("ij,ij->i", xpad[pos + pad], weights)
    return out
