"""16-bit PCM mono WAV reading and writing.

Reads convert int16 to float via /32767 (clamped at -1.0), writes quantize
via round(x*32767), so write -> read -> write reproduces the PCM data
byte for byte.
"""

import wave

import numpy as np

from ..errors import FormatError
from .waveform import SAMPLE_RATE, Waveform

INT16_FULL_SCALE = 32767.0


def read_wav(path, target_rate: int = SAMPLE_RATE) -> Waveform:
    """Read a 16-bit PCM mono WAV; files at other rates are resampled to target_rate."""
    try:
        with wave.open(str(path), "rb") as f:
            n_channels = f.getnchannels()
            sampwidth = f.getsampwidth()
            rate = f.getframerate()
            n_frames = f.getnframes()
            raw = f.readframes(n_frames)
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"malformed WAV file {path}: {exc}") from exc
    if n_channels != 1:
        raise FormatError(f"{path}: only mono WAV is supported, got {n_channels} channels")
    if sampwidth != 2:
        raise FormatError(f"{path}: only 16-bit PCM is supported, got {8 * sampwidth}-bit")
    pcm = np.frombuffer(raw, dtype="<i2")
    samples = np.maximum(pcm.astype(np.float64) / INT16_FULL_SCALE, -1.0)
    w = Waveform(samples, rate)
    if rate != target_rate:
        from .resample import resample

        w = resample(w, rate / target_rate)
        w = Waveform(w.samples, target_rate)
    return w


def write_wav(path, w: Waveform) -> None:
    """Write a waveform as 16-bit PCM mono little-endian WAV."""
    pcm = np.round(np.clip(w.samples, -1.0, 1.0) * INT16_FULL_SCALE).astype("<i2")
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(w.sample_rate)
        f.writeframes(pcm.tobytes())
