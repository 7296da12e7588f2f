"""Shared fixtures: a small deterministic toy corpus reused across test modules."""

import numpy as np
import pytest

from vckit.dsp import SAMPLE_RATE, Waveform
from vckit.train import make_toy_corpus


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """Two-speaker toy corpus, three utterances each, fixed seed."""
    root = tmp_path_factory.mktemp("corpus")
    make_toy_corpus(str(root), n_speakers=2, utt_per_speaker=3, seed=77)
    return root


def make_sine(freq: float, dur: float = 1.0, rate: int = SAMPLE_RATE,
              amp: float = 0.5) -> Waveform:
    t = np.arange(int(round(dur * rate))) / rate
    return Waveform(amp * np.sin(2.0 * np.pi * freq * t), rate)


def dominant_freq(w: Waveform) -> float:
    """Frequency of the largest rFFT magnitude bin."""
    spec = np.abs(np.fft.rfft(w.samples))
    return float(np.argmax(spec) * w.sample_rate / len(w))
