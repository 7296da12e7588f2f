"""Objective evaluation: cosine SV accuracy, EER, and F0-band metrics.

The speaker-verification scores are cosines between mel-statistics
embeddings; accuracy uses fixed per-corpus thresholds. The F0 estimator is
a frame-wise normalized autocorrelation with parabolic peak refinement,
summarized per file by the median over voiced frames.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dsp.melspec import MelConfig, mel_spectrogram
from .dsp.waveform import Waveform, peak_normalize
from .dsp.wavio import read_wav
from .errors import FormatError, RangeError
from .models.speaker import MelStatsEncoder

THRESHOLDS = {"vctk": 0.462, "librispeech": 0.337, "vcc2020": 0.432}

F0_MIN = 70.0
F0_MAX = 400.0
_FRAME = 1024
_HOP = 256
_VOICING_CORR = 0.35
_VOICING_RMS = 0.05
_MIN_VOICED_FRACTION = 0.1


@dataclass(frozen=True)
class ScoredPair:
    id_a: str
    id_b: str
    score: float
    label: str = "same"

    def __post_init__(self):
        if not np.isfinite(self.score) or abs(self.score) > 1.0 + 1e-6:
            raise RangeError(f"cosine score out of range: {self.score}")
        if self.label not in ("same", "different"):
            raise FormatError(f"pair label must be same|different, got {self.label!r}")


def cosine(e1: np.ndarray, e2: np.ndarray) -> float:
    e1 = np.asarray(e1, dtype=np.float64)
    e2 = np.asarray(e2, dtype=np.float64)
    n1 = float(np.linalg.norm(e1))
    n2 = float(np.linalg.norm(e2))
    if n1 == 0.0 or n2 == 0.0:
        raise RangeError("cosine of a zero vector is undefined")
    return float(np.dot(e1, e2) / (n1 * n2))


def sv_accuracy(pairs: list, threshold: float) -> float:
    """Fraction of (positive) pairs whose score clears the threshold."""
    if not (-1.0 < threshold < 1.0):
        raise RangeError(f"threshold must lie in (-1, 1), got {threshold}")
    if not pairs:
        raise FormatError("sv_accuracy needs at least one pair")
    scores = np.array(
        [p.score if isinstance(p, ScoredPair) else float(p) for p in pairs]
    )
    return float(np.mean(scores >= threshold))


def compute_eer(pos_scores, neg_scores) -> tuple[float, float]:
    """Sweep observed scores as thresholds; return (EER, threshold).

    At each candidate t: FAR = fraction of negatives >= t, FRR = fraction of
    positives < t. The operating point minimizes |FAR - FRR|, ties going to
    the lower threshold, and EER is the average of the two rates there.
    """
    pos = np.asarray(list(pos_scores), dtype=np.float64)
    neg = np.asarray(list(neg_scores), dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise FormatError("compute_eer needs non-empty positive and negative scores")
    candidates = np.unique(np.concatenate([pos, neg]))
    best = None
    for thr in candidates:
        far = float(np.mean(neg >= thr))
        frr = float(np.mean(pos < thr))
        gap = abs(far - frr)
        if best is None or gap < best[0]:
            best = (gap, thr, (far + frr) / 2.0)
    return best[2], float(best[1])


def estimate_f0(
    wave: Waveform, fmin: float = F0_MIN, fmax: float = F0_MAX
) -> tuple[float, float]:
    """(median F0 over voiced frames, voiced fraction); (nan, 0) if unvoiced.

    Frames are analyzed by normalized autocorrelation; a frame is voiced
    when its best in-range lag correlates strongly and the frame carries
    energy relative to the file's loudest frame.
    """
    x = wave.samples
    sr = wave.sample_rate
    lag_min = max(2, int(np.floor(sr / fmax)))
    lag_max = int(np.ceil(sr / fmin))
    if lag_max + 2 >= _FRAME or len(x) < _FRAME:
        return float("nan"), 0.0
    n_frames = 1 + (len(x) - _FRAME) // _HOP
    starts = np.arange(n_frames) * _HOP
    frames = np.stack([x[s : s + _FRAME] for s in starts])
    frames = frames - frames.mean(axis=1, keepdims=True)
    rms = np.sqrt((frames * frames).mean(axis=1))
    rms_gate = _VOICING_RMS * (rms.max() if rms.size else 0.0)

    spec = np.fft.rfft(frames, n=2 * _FRAME, axis=1)
    ac = np.fft.irfft(spec * np.conj(spec), axis=1)[:, : lag_max + 2]

    f0s = []
    voiced = 0
    for i in range(n_frames):
        r = ac[i]
        if r[0] <= 0.0 or rms[i] <= rms_gate:
            continue
        seg = r[lag_min : lag_max + 1] / r[0]
        k = int(np.argmax(seg))
        if seg[k] < _VOICING_CORR:
            continue
        lag = lag_min + k
        y0, y1, y2 = r[lag - 1] / r[0], seg[k], r[lag + 1] / r[0]
        denom = y0 - 2.0 * y1 + y2
        delta = 0.5 * (y0 - y2) / denom if denom != 0.0 else 0.0
        delta = float(np.clip(delta, -0.5, 0.5))
        voiced += 1
        f0s.append(sr / (lag + delta))
    fraction = voiced / n_frames if n_frames else 0.0
    if not f0s:
        return float("nan"), fraction
    return float(np.median(f0s)), fraction


@dataclass(frozen=True)
class F0BandResult:
    accuracy: float
    n_inside: int
    n_considered: int
    n_unvoiced: int


def f0_band_accuracy(waves: list[Waveform], band: tuple[float, float]) -> F0BandResult:
    """Fraction of voiced files whose median F0 falls inside the band."""
    lo, hi = band
    if not waves:
        raise FormatError("f0_band_accuracy needs at least one waveform")
    inside = 0
    considered = 0
    unvoiced = 0
    for w in waves:
        f0, fraction = estimate_f0(w)
        if not np.isfinite(f0) or fraction < _MIN_VOICED_FRACTION:
            unvoiced += 1
            continue
        considered += 1
        if lo <= f0 <= hi:
            inside += 1
    accuracy = inside / considered if considered else 0.0
    return F0BandResult(accuracy, inside, considered, unvoiced)


def embed_wav(path: str, mel_cfg: MelConfig | None = None) -> np.ndarray:
    """Mel-statistics speaker embedding of one WAV file."""
    mel_cfg = mel_cfg or MelConfig()
    mel = mel_spectrogram(peak_normalize(read_wav(path)), mel_cfg).frames
    return MelStatsEncoder().embed_mel(mel)


def read_pairs(path: str) -> list[tuple[str, str, str]]:
    """Rows of 'path_a,path_b[,label]'; label defaults to 'same'."""
    rows: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) == 2:
                rows.append((row[0].strip(), row[1].strip(), "same"))
            elif len(row) == 3:
                rows.append((row[0].strip(), row[1].strip(), row[2].strip()))
            else:
                raise FormatError(
                    f"{path}:{lineno}: expected 'path_a,path_b[,label]', got {row!r}"
                )
    if not rows:
        raise FormatError(f"no pairs listed in {path}")
    return rows


def score_pairs(rows: list[tuple[str, str, str]],
                mel_cfg: MelConfig | None = None) -> list[ScoredPair]:
    cache: dict[str, np.ndarray] = {}

    def emb(p: str) -> np.ndarray:
        if p not in cache:
            cache[p] = embed_wav(p, mel_cfg)
        return cache[p]

    return [
        ScoredPair(a, b, cosine(emb(a), emb(b)), label) for a, b, label in rows
    ]


def write_report(path: str | None, metrics: dict) -> str:
    """metric,value rows; returns the rendered text (written if path given)."""
    lines = [f"{name},{value}" for name, value in metrics.items()]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text
