"""Short-time Fourier analysis/synthesis with left-aligned frames.

Frames are not centered: frame t covers samples [t*hop, t*hop + n_fft), so a
signal of N samples yields 1 + (N - n_fft)//hop frames. All arrays are
time-major (frames are rows).
"""

import numpy as np
from numpy.lib.stride_tricks import as_strided

from ..errors import RangeError
from ..kernels import overlap_add

WINDOW_EPS = 1e-10
COVERAGE_FLOOR = 0.1


def hann_window(n_fft: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft))


def n_frames(n_samples: int, n_fft: int, hop: int) -> int:
    if n_samples < n_fft:
        raise RangeError(f"need at least {n_fft} samples, got {n_samples}")
    return 1 + (n_samples - n_fft) // hop


def frame_signal(x: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """View x as overlapping frames of length n_fft, shape (T, n_fft)."""
    t = n_frames(x.size, n_fft, hop)
    s = x.strides[0]
    return as_strided(x, shape=(t, n_fft), strides=(hop * s, s))


def stft(x: np.ndarray, n_fft: int, hop: int, window: np.ndarray) -> np.ndarray:
    """Windowed rFFT of each frame; returns complex (T, n_fft//2 + 1)."""
    frames = frame_signal(np.ascontiguousarray(x, dtype=np.float64), n_fft, hop)
    return np.fft.rfft(frames * window, axis=1)


def istft(spec: np.ndarray, n_fft: int, hop: int, window: np.ndarray) -> np.ndarray:
    """Overlap-add inverse of stft with squared-window normalization.

    Returns the full overlap-add span of (T-1)*hop + n_fft samples; callers
    trim to taste. The outermost samples, where the squared-window coverage
    decays toward zero, divide by whatever tiny coverage remains; callers
    delivering audio should damp that region (see window_coverage).
    """
    frames = np.fft.irfft(spec, n=n_fft, axis=1) * window
    t = frames.shape[0]
    out_len = (t - 1) * hop + n_fft
    num = overlap_add(np.ascontiguousarray(frames), hop, out_len)
    den = window_coverage(window, hop, t)
    return num / np.maximum(den, WINDOW_EPS)


def window_coverage(window: np.ndarray, hop: int, t: int) -> np.ndarray:
    """Squared-window overlap-add coverage for t frames, length (t-1)*hop + n_fft."""
    n_fft = window.size
    wsq = np.broadcast_to(window * window, (t, n_fft))
    return overlap_add(np.ascontiguousarray(wsq), hop, (t - 1) * hop + n_fft)
