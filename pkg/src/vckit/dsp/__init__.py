"""Waveform I/O, mel front end, vocoder substitute, and the PSDR shifter."""

from .griffinlim import griffin_lim_vocode
from .melspec import (
    MelConfig,
    MelSpectrogram,
    mel_center_freqs,
    mel_filterbank,
    mel_spectrogram,
    read_melf,
    write_melf,
)
from .psdr import SHIFT_MAX, SHIFT_MIN, psdr_shift, shift_factor, valid_shifts
from .resample import resample
from .stretch import time_stretch
from .waveform import PEAK_TARGET, SAMPLE_RATE, Waveform, peak_normalize
from .wavio import read_wav, write_wav

__all__ = [
    "MelConfig",
    "MelSpectrogram",
    "PEAK_TARGET",
    "SAMPLE_RATE",
    "SHIFT_MAX",
    "SHIFT_MIN",
    "Waveform",
    "griffin_lim_vocode",
    "mel_center_freqs",
    "mel_filterbank",
    "mel_spectrogram",
    "peak_normalize",
    "psdr_shift",
    "read_melf",
    "read_wav",
    "resample",
    "shift_factor",
    "time_stretch",
    "valid_shifts",
    "write_melf",
    "write_wav",
]
