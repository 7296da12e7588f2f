"""Mel analysis front end and the MELF on-disk format.

The model representation is an 80-bin magnitude mel spectrogram mapped
into [0, 1]: L = log10(max(m, log_floor)), then (L - log10(log_floor)) /
log_range clamped to [0, 1]. With the default floor 1e-5 and range 5
decades, digital silence maps to exactly 0 and a full-scale mel bin to 1.
"""

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import FormatError, RangeError
from .stft import hann_window, stft
from .waveform import SAMPLE_RATE, Waveform


@dataclass(frozen=True)
class MelConfig:
    """STFT and filterbank parameters shared by analysis and synthesis."""

    n_fft: int = 1024
    hop: int = 256
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0
    sample_rate: int = SAMPLE_RATE
    log_floor: float = 1e-5
    log_range: float = 5.0

    def __post_init__(self):
        if self.hop > self.n_fft:
            raise RangeError(f"hop {self.hop} exceeds n_fft {self.n_fft}")
        if self.fmax > self.sample_rate / 2:
            raise RangeError(f"fmax {self.fmax} above Nyquist {self.sample_rate / 2}")

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1


@dataclass(frozen=True)
class MelSpectrogram:
    """T x n_mels matrix of mel energies; normalized means entries lie in [0, 1]."""

    frames: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise FormatError(f"mel frames must be 2-D, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise FormatError("mel frames contain non-finite entries")
        if self.normalized and frames.size and (frames.min() < 0.0 or frames.max() > 1.0):
            raise FormatError("normalized mel entries must lie in [0, 1]")
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_mels(self) -> int:
        return self.frames.shape[1]


def _hz_to_mel(f):
    """Slaney mel scale: linear below 1 kHz, logarithmic above."""
    f = np.asarray(f, dtype=np.float64)
    f_sp = 200.0 / 3.0
    log_step = np.log(6.4) / 27.0
    mel = f / f_sp
    above = f >= 1000.0
    return np.where(above, 15.0 + np.log(np.maximum(f, 1e-12) / 1000.0) / log_step, mel)


def _mel_to_hz(m):
    m = np.asarray(m, dtype=np.float64)
    f_sp = 200.0 / 3.0
    log_step = np.log(6.4) / 27.0
    above = m >= 15.0
    return np.where(above, 1000.0 * np.exp(log_step * (m - 15.0)), m * f_sp)


def mel_center_freqs(cfg: MelConfig) -> np.ndarray:
    """Center frequency in Hz of each triangular filter."""
    mels = np.linspace(_hz_to_mel(cfg.fmin), _hz_to_mel(cfg.fmax), cfg.n_mels + 2)
    return _mel_to_hz(mels)[1:-1]


@lru_cache(maxsize=8)
def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """Area-normalized triangular filterbank, shape (n_mels, n_bins)."""
    fft_freqs = np.arange(cfg.n_bins) * cfg.sample_rate / cfg.n_fft
    mels = np.linspace(_hz_to_mel(cfg.fmin), _hz_to_mel(cfg.fmax), cfg.n_mels + 2)
    pts = _mel_to_hz(mels)
    lower = (fft_freqs[None, :] - pts[:-2, None]) / (pts[1:-1] - pts[:-2])[:, None]
    upper = (pts[2:, None] - fft_freqs[None, :]) / (pts[2:] - pts[1:-1])[:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))
    weights *= (2.0 / (pts[2:] - pts[:-2]))[:, None]
    return weights


def normalize_mel(m: np.ndarray, cfg: MelConfig) -> np.ndarray:
    """Map linear mel energies into [0, 1]; energies at or below the floor go to 0."""
    log_m = np.log10(np.maximum(m, cfg.log_floor))
    out = np.clip((log_m - np.log10(cfg.log_floor)) / cfg.log_range, 0.0, 1.0)
    out[m <= cfg.log_floor] = 0.0
    return out


def denormalize_mel(y: np.ndarray, cfg: MelConfig) -> np.ndarray:
    """Inverse of normalize_mel on [0, 1]."""
    return 10.0 ** (y * cfg.log_range + np.log10(cfg.log_floor))


def mel_spectrogram(w: Waveform, cfg: MelConfig = MelConfig()) -> MelSpectrogram:
    """Magnitude STFT through the filterbank, normalized to [0, 1]."""
    if w.sample_rate != cfg.sample_rate:
        raise FormatError(f"waveform rate {w.sample_rate} != config rate {cfg.sample_rate}")
    spec = stft(w.samples, cfg.n_fft, cfg.hop, hann_window(cfg.n_fft))
    energies = np.abs(spec) @ mel_filterbank(cfg).T
    return MelSpectrogram(normalize_mel(energies, cfg), normalized=True)


MELF_MAGIC = b"MELF"
MELF_VERSION = 1


def write_melf(path, mel: MelSpectrogram) -> None:
    """Write a normalized mel as MELF: magic, u32 version, u32 T, u32 n_mels, f32 rows."""
    header = MELF_MAGIC + struct.pack("<III", MELF_VERSION, mel.n_frames, mel.n_mels)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(mel.frames, dtype="<f4").tobytes())


def read_melf(path) -> MelSpectrogram:
    """Read a MELF file written by write_melf."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 16 or data[:4] != MELF_MAGIC:
        raise FormatError(f"{path}: not a MELF file")
    version, t, n_mels = struct.unpack("<III", data[4:16])
    if version != MELF_VERSION:
        raise FormatError(f"{path}: unsupported MELF version {version}")
    body = data[16:]
    if len(body) != 4 * t * n_mels:
        raise FormatError(f"{path}: truncated MELF payload")
    frames = np.frombuffer(body, dtype="<f4").reshape(t, n_mels).astype(np.float64)
    return MelSpectrogram(frames, normalized=True)
