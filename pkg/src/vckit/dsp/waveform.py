"""Mono waveform container and amplitude normalization."""

from dataclasses import dataclass

import numpy as np

from ..errors import FormatError

SAMPLE_RATE = 22050
PEAK_TARGET = 0.95


@dataclass(frozen=True)
class Waveform:
    """Mono audio: float samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise FormatError(f"waveform must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise FormatError("waveform contains non-finite samples")
        if samples.size and np.max(np.abs(samples)) > 1.0:
            raise FormatError("waveform samples exceed [-1, 1]")
        if self.sample_rate <= 0:
            raise FormatError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def peak_normalize(w: Waveform) -> Waveform:
    """Scale so the absolute peak is exactly PEAK_TARGET; all-zero input is a no-op.

    Dividing by the peak before multiplying makes the peak sample hit the
    target bit-exactly, so normalizing twice returns the same samples.
    """
    peak = np.max(np.abs(w.samples)) if len(w) else 0.0
    if peak == 0.0 or peak == PEAK_TARGET:
        return Waveform(w.samples.copy(), w.sample_rate)
    scaled = (w.samples / peak) * PEAK_TARGET
    return Waveform(scaled, w.sample_rate)
