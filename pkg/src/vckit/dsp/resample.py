"""Arbitrary-ratio windowed-sinc polyphase resampler.

The kernel is a Kaiser-windowed sinc (beta 8.6, 64 zero crossings per
side), precomputed as a half-kernel table at PHASES samples per input step
and linearly interpolated at lookup time. For downsampling the cutoff and
support scale with the ratio to keep aliasing below the window sidelobes.

`resample(w, ratio)` emits round(N/ratio) samples at positions m*ratio on
the input grid: a tone at f lands at f*ratio when the result is
reinterpreted at the original rate.
"""

from functools import lru_cache

import numpy as np

from ..errors import RangeError
from ..kernels import resample_taps
from .waveform import Waveform

ZERO_CROSSINGS = 64
KAISER_BETA = 8.6
PHASES = 512
RATIO_MIN = 0.25
RATIO_MAX = 4.0


@lru_cache(maxsize=32)
def _kernel_table(scale: float) -> tuple[np.ndarray, float]:
    """Half-kernel table for a sinc scaled to cutoff `scale`; returns (table, half_width)."""
    half_width = ZERO_CROSSINGS / scale
    n_tab = int(np.ceil(half_width * PHASES)) + 3
    t = np.arange(n_tab) / PHASES
    u = t / half_width
    window = np.where(u <= 1.0, np.i0(KAISER_BETA * np.sqrt(np.maximum(0.0, 1.0 - u * u))), 0.0)
    window /= np.i0(KAISER_BETA)
    table = scale * np.sinc(scale * t) * window
    table[t > half_width] = 0.0
    table[-2:] = 0.0
    # unit DC gain at integer phase so constants pass through unchanged
    gain = table[0] + 2.0 * np.sum(table[PHASES::PHASES])
    table = table / gain
    table.setflags(write=False)
    return table, half_width


def resample(w: Waveform, ratio: float) -> Waveform:
    """Resample by a real step of `ratio` input samples per output sample."""
    if not (RATIO_MIN <= ratio <= RATIO_MAX):
        raise RangeError(f"resample ratio {ratio} outside [{RATIO_MIN}, {RATIO_MAX}]")
    x = w.samples
    n_out = int(round(x.size / ratio))
    if n_out == 0:
        return Waveform(np.zeros(0), w.sample_rate)
    scale = min(1.0, 1.0 / ratio)
    table, half_width = _kernel_table(scale)
    pad = int(half_width) + 4
    xpad = np.concatenate([np.zeros(pad), x, np.zeros(pad + int(np.ceil(ratio)) + 1)])
    y = resample_taps(xpad, table, n_out, float(ratio), half_width, PHASES, pad)
    return Waveform(np.clip(y, -1.0, 1.0), w.sample_rate)
