"""Pitch-shifted, duration-remained augmentation.

Shifting by s semitones multiplies every spectral component by 2**(s/12)
while keeping the duration: the waveform is first time-stretched by that
factor, then resampled by the same factor back to the original length.
Shifts outside [-6, 4] degrade content too much for training and are
rejected unless forced.
"""

import numpy as np

from ..errors import RangeError
from .resample import resample
from .stretch import time_stretch
from .waveform import Waveform

SHIFT_MIN = -6
SHIFT_MAX = 4


def shift_factor(semitones: int) -> float:
    """Frequency ratio for a shift of s semitones."""
    return float(2.0 ** (semitones / 12.0))


def psdr_shift(w: Waveform, semitones: int, force: bool = False) -> Waveform:
    """Shift pitch by a whole number of semitones, preserving duration.

    s = 0 is a bit-exact bypass. Without `force`, s must lie in the
    augmentation range [-6, 4].
    """
    s = int(semitones)
    if s == 0:
        return Waveform(w.samples.copy(), w.sample_rate)
    if not force and not (SHIFT_MIN <= s <= SHIFT_MAX):
        raise RangeError(f"semitones outside [{SHIFT_MIN}, {SHIFT_MAX}]: {s}")
    r = shift_factor(s)
    stretched = time_stretch(w, r)
    shifted = resample(stretched, r)
    return shifted


def valid_shifts(low: int = SHIFT_MIN, high: int = SHIFT_MAX, include_zero: bool = False) -> np.ndarray:
    """Integer shifts available to the training sampler."""
    if not (SHIFT_MIN <= low <= high <= SHIFT_MAX):
        raise RangeError(f"shift range [{low}, {high}] outside [{SHIFT_MIN}, {SHIFT_MAX}]")
    shifts = np.arange(low, high + 1)
    if not include_zero:
        shifts = shifts[shifts != 0]
    return shifts
