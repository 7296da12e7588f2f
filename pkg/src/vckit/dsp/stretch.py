"""Phase-vocoder time stretching.

Duration scales by `rate` while the spectral content stays put: output
frame j reads magnitudes interpolated at source frame j/rate and advances
phase by the locally measured instantaneous frequency.
"""

import numpy as np

from ..errors import RangeError
from .stft import hann_window, istft, stft
from .waveform import Waveform

N_FFT = 1024
HOP = 256
RATE_MIN = 0.5
RATE_MAX = 2.0


def time_stretch(w: Waveform, rate: float) -> Waveform:
    """Stretch duration by `rate` (2.0 doubles the length, pitch unchanged)."""
    if not (RATE_MIN <= rate <= RATE_MAX):
        raise RangeError(f"stretch rate {rate} outside [{RATE_MIN}, {RATE_MAX}]")
    x = w.samples
    n_target = int(round(x.size * rate))
    if x.size < N_FFT or n_target < N_FFT:
        raise RangeError(f"input too short to stretch: {x.size} samples at rate {rate}")

    window = hann_window(N_FFT)
    spec = stft(x, N_FFT, HOP, window)
    t_in = spec.shape[0]
    t_out = 1 + (n_target - N_FFT) // HOP

    # source frame position for each output frame, clamped into range
    src = np.minimum(np.arange(t_out) / rate, t_in - 1.0)
    i0 = np.minimum(src.astype(np.int64), max(t_in - 2, 0))
    frac = src - i0

    mag = np.abs(spec)
    phase = np.angle(spec)
    i1 = np.minimum(i0 + 1, t_in - 1)
    mag_out = (1.0 - frac[:, None]) * mag[i0] + frac[:, None] * mag[i1]

    bins = np.arange(spec.shape[1])
    expected = 2.0 * np.pi * HOP * bins / N_FFT
    delta = phase[i1] - phase[i0] - expected
    delta -= 2.0 * np.pi * np.round(delta / (2.0 * np.pi))
    advance = expected + delta

    acc = np.empty_like(advance)
    acc[0] = phase[0]
    np.cumsum(advance[:-1], axis=0, out=acc[1:])
    acc[1:] += phase[0]

    y = istft(mag_out * np.exp(1j * acc), N_FFT, HOP, window)
    return Waveform(np.clip(y, -1.0, 1.0), w.sample_rate)
