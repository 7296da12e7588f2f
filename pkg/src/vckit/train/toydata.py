"""Synthetic toy corpus: harmonic source through a per-speaker formant filter.

Speakers are separated by disjoint 40 Hz F0 bands inside 100-300 Hz and by
fixed formant positions, so both the pitch estimator and the mel-statistics
speaker embedding can tell them apart. Generation is bit-deterministic
under a seed, independent of call order.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.signal import lfilter

from ..dsp.waveform import SAMPLE_RATE, Waveform, peak_normalize
from ..dsp.wavio import write_wav
from ..errors import FormatError, RangeError

F0_BANDS = ((100, 140), (140, 180), (180, 220), (220, 260), (260, 300))
MAX_SPEAKERS = len(F0_BANDS)
BAND_MARGIN = 8.0
DUR_RANGE = (2.0, 4.0)
METADATA_NAME = "metadata.tsv"

_FORMANT_RANGES = ((350.0, 800.0), (950.0, 2000.0), (2200.0, 3000.0))
_FORMANT_BWS = (80.0, 120.0, 180.0)


def speaker_band(index: int) -> tuple[int, int]:
    if not (0 <= index < MAX_SPEAKERS):
        raise RangeError(f"speaker index {index} outside [0, {MAX_SPEAKERS - 1}]")
    return F0_BANDS[index]


def speaker_id(index: int) -> str:
    return f"spk{index}"


def _speaker_voice(seed: int, spk: int) -> list[tuple[float, float]]:
    """Fixed formant (frequency, bandwidth) triple for one speaker."""
    rng = np.random.default_rng([seed, spk, 10_000])
    return [
        (float(rng.uniform(lo, hi)), bw)
        for (lo, hi), bw in zip(_FORMANT_RANGES, _FORMANT_BWS)
    ]


def _resonate(x: np.ndarray, freq: float, bw: float, sr: int) -> np.ndarray:
    r = np.exp(-np.pi * bw / sr)
    a = np.array([1.0, -2.0 * r * np.cos(2.0 * np.pi * freq / sr), r * r])
    return lfilter([1.0 - r], a, x)


def synth_utterance(seed: int, spk: int, utt: int, sr: int = SAMPLE_RATE) -> Waveform:
    """One deterministic utterance for speaker spk in its F0 band."""
    band = speaker_band(spk)
    formants = _speaker_voice(seed, spk)
    rng = np.random.default_rng([seed, spk, utt])

    dur = float(rng.uniform(*DUR_RANGE))
    n = int(round(dur * sr))
    t = np.arange(n) / sr

    lo, hi = band[0] + BAND_MARGIN, band[1] - BAND_MARGIN
    base = float(rng.uniform(lo + 5.0, hi - 5.0))
    wobble = float(rng.uniform(1.5, min(4.0, base - lo, hi - base)))
    rate = float(rng.uniform(0.4, 1.2))
    phase0 = float(rng.uniform(0.0, 2.0 * np.pi))
    f0 = base + wobble * np.sin(2.0 * np.pi * rate * t + phase0)

    phase = 2.0 * np.pi * np.cumsum(f0) / sr
    n_harm = max(3, int(4000.0 / (base + wobble)))
    x = np.zeros(n)
    for h in range(1, n_harm + 1):
        x += (1.0 / h) * np.sin(h * phase)
    x += 0.01 * rng.standard_normal(n)

    for freq, bw in formants:
        x = _resonate(x, freq, bw, sr)

    edge = int(0.05 * sr)
    env = np.ones(n)
    ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(edge) / edge)
    env[:edge] = ramp
    env[-edge:] = ramp[::-1]
    x *= env

    return peak_normalize(Waveform(np.clip(x / np.max(np.abs(x)), -1.0, 1.0), sr))


def make_toy_corpus(out_dir: str, n_speakers: int, utt_per_speaker: int,
                    seed: int) -> list[tuple[str, str]]:
    """Write WAVs plus metadata.tsv; returns [(filename, speaker_id), ...]."""
    if not (2 <= n_speakers <= MAX_SPEAKERS):
        raise RangeError(
            f"n_speakers must be in [2, {MAX_SPEAKERS}], got {n_speakers}"
        )
    if utt_per_speaker < 1:
        raise RangeError("utt_per_speaker must be at least 1")
    os.makedirs(out_dir, exist_ok=True)
    entries: list[tuple[str, str]] = []
    for spk in range(n_speakers):
        for utt in range(utt_per_speaker):
            name = f"spk{spk}_utt{utt:03d}.wav"
            wave = synth_utterance(seed, spk, utt)
            write_wav(os.path.join(out_dir, name), wave)
            entries.append((name, speaker_id(spk)))
    with open(os.path.join(out_dir, METADATA_NAME), "w", encoding="utf-8") as f:
        for name, sid in entries:
            f.write(f"{name}\t{sid}\n")
    return entries


def read_metadata(corpus_dir: str) -> list[tuple[str, str]]:
    """[(filename, speaker_id)] from metadata.tsv; falls back to listing WAVs."""
    path = os.path.join(corpus_dir, METADATA_NAME)
    if not os.path.exists(path):
        names = sorted(
            n for n in os.listdir(corpus_dir) if n.lower().endswith(".wav")
        )
        return [(n, "unknown") for n in names]
    entries = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(
                    f"{path}:{lineno}: expected 'file<TAB>speaker', got {line!r}"
                )
            entries.append((parts[0], parts[1]))
    return entries
