"""Griffin-Lim phase retrieval as the desk-scale vocoder.

Mel energies are denormalized and mapped back to a linear magnitude
spectrogram with a clipped pseudo-inverse of the filterbank, then phases
are refined by alternating STFT projections. A neural vocoder can replace
this stage externally; everything it needs is in the MELF file.
"""

from functools import lru_cache

import numpy as np

from ..errors import FormatError
from .melspec import MelConfig, MelSpectrogram, denormalize_mel, mel_filterbank
from .stft import COVERAGE_FLOOR, hann_window, istft, stft, window_coverage
from .waveform import Waveform

DEFAULT_ITERS = 60
PHASE_SEED = 81247


@lru_cache(maxsize=8)
def _mel_pinv(cfg: MelConfig) -> np.ndarray:
    return np.linalg.pinv(mel_filterbank(cfg))


def mel_to_linear(mel: MelSpectrogram, cfg: MelConfig) -> np.ndarray:
    """Approximate linear magnitudes (T, n_bins) via clipped pseudo-inverse."""
    if not mel.normalized:
        raise FormatError("vocoder expects a normalized mel spectrogram")
    energies = denormalize_mel(mel.frames, cfg)
    return np.maximum(energies @ _mel_pinv(cfg).T, 0.0)


def griffin_lim_vocode(mel: MelSpectrogram, cfg: MelConfig = MelConfig(), n_iters: int = DEFAULT_ITERS) -> Waveform:
    """Reconstruct a waveform of exactly T*hop samples from a normalized mel."""
    mag = mel_to_linear(mel, cfg)
    window = hann_window(cfg.n_fft)
    rng = np.random.default_rng(PHASE_SEED)
    phase = rng.uniform(-np.pi, np.pi, size=mag.shape)
    spec = mag * np.exp(1j * phase)
    x = istft(spec, cfg.n_fft, cfg.hop, window)
    for _ in range(n_iters):
        rebuilt = stft(x, cfg.n_fft, cfg.hop, window)
        spec = mag[: rebuilt.shape[0]] * np.exp(1j * np.angle(rebuilt))
        x = istft(spec, cfg.n_fft, cfg.hop, window)
    # The overlap-add normalization divides by near-zero window coverage at
    # the span edges, which can amplify the random-phase residue there by
    # orders of magnitude. Damp the low-coverage edge region on delivery.
    den = window_coverage(window, cfg.hop, spec.shape[0])
    x = x * np.minimum(den / (COVERAGE_FLOOR * float(den.max())), 1.0)
    n_out = mel.n_frames * cfg.hop
    y = x[:n_out]
    peak = np.max(np.abs(y)) if y.size else 0.0
    if peak > 1.0:
        y = y / peak
    return Waveform(y, cfg.sample_rate)
