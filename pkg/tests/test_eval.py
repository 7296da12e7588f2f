"""Verification metrics: cosine scoring, accuracy, EER, F0 banding.

compute_eer is checked for exact agreement with an independently written
two-loop reference across many random score sets.
"""

import numpy as np
import pytest

from vckit.dsp import SAMPLE_RATE, Waveform, write_wav
from vckit.errors import FormatError, RangeError
from vckit.evalmetrics import (
    F0BandResult,
    ScoredPair,
    THRESHOLDS,
    compute_eer,
    cosine,
    embed_wav,
    estimate_f0,
    f0_band_accuracy,
    read_pairs,
    score_pairs,
    sv_accuracy,
    write_report,
)

from conftest import make_sine


def reference_eer(pos, neg):
    """Deliberately naive re-derivation used as the oracle."""
    pos = list(pos)
    neg = list(neg)
    best_gap, best_thr, best_eer = None, None, None
    for thr in sorted(set(pos) | set(neg)):
        far = sum(1 for s in neg if s >= thr) / len(neg)
        frr = sum(1 for s in pos if s < thr) / len(pos)
        gap = abs(far - frr)
        if best_gap is None or gap < best_gap:
            best_gap, best_thr, best_eer = gap, thr, (far + frr) / 2
    return best_eer, best_thr


class TestCosine:
    def test_hand_cases(self):
        assert cosine([1, 0], [1, 0]) == pytest.approx(1.0)
        assert cosine([1, 0], [0, 1]) == pytest.approx(0.0)
        assert cosine([1, 0], [-1, 0]) == pytest.approx(-1.0)
        assert cosine([3, 0], [1, 1]) == pytest.approx(1 / np.sqrt(2))

    def test_scale_invariance(self):
        a = np.array([0.3, -1.2, 0.7])
        b = np.array([1.1, 0.4, -0.2])
        assert cosine(a, b) == pytest.approx(cosine(10 * a, 0.01 * b), abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(RangeError):
            cosine([0, 0], [1, 0])


class TestScoredPair:
    def test_score_range_enforced(self):
        ScoredPair("a", "b", 0.5)
        with pytest.raises(RangeError):
            ScoredPair("a", "b", 1.5)
        with pytest.raises(RangeError):
            ScoredPair("a", "b", float("nan"))

    def test_label_enforced(self):
        with pytest.raises(FormatError):
            ScoredPair("a", "b", 0.5, label="mystery")


class TestSvAccuracy:
    def test_hand_case(self):
        assert sv_accuracy([0.8, 0.5, 0.2], 0.462) == pytest.approx(2 / 3)

    def test_accepts_scored_pairs(self):
        pairs = [ScoredPair("a", "b", 0.9), ScoredPair("c", "d", 0.1)]
        assert sv_accuracy(pairs, 0.462) == pytest.approx(0.5)

    def test_threshold_monotonicity(self):
        scores = list(np.linspace(-0.9, 0.9, 50))
        accs = [sv_accuracy(scores, t) for t in (-0.5, 0.0, 0.5)]
        assert accs[0] >= accs[1] >= accs[2]

    def test_bounds(self):
        with pytest.raises(RangeError):
            sv_accuracy([0.5], 1.0)
        with pytest.raises(FormatError):
            sv_accuracy([], 0.5)

    def test_corpus_thresholds_table(self):
        assert THRESHOLDS["vctk"] == pytest.approx(0.462)
        assert THRESHOLDS["librispeech"] == pytest.approx(0.337)
        assert THRESHOLDS["vcc2020"] == pytest.approx(0.432)


class TestEer:
    def test_hand_case(self):
        eer, thr = compute_eer([0.8, 0.6, 0.4], [0.5, 0.3, 0.1])
        assert eer == pytest.approx(1 / 3)
        assert thr == pytest.approx(0.5)

    def test_perfect_separation(self):
        eer, thr = compute_eer([0.9, 0.8], [0.2, 0.1])
        assert eer == 0.0
        assert 0.2 < thr <= 0.9

    def test_complete_overlap(self):
        eer, _ = compute_eer([0.5, 0.5], [0.5, 0.5])
        assert eer == pytest.approx(0.5)

    def test_empty_rejected(self):
        with pytest.raises(FormatError):
            compute_eer([], [0.5])
        with pytest.raises(FormatError):
            compute_eer([0.5], [])

    def test_matches_reference_on_random_sets(self):
        # Exact agreement with the naive reference on 50 random score sets.
        rng = np.random.default_rng(99)
        for trial in range(50):
            n_pos = int(rng.integers(1, 40))
            n_neg = int(rng.integers(1, 40))
            pos = np.round(rng.uniform(-1, 1, n_pos), 3).tolist()
            neg = np.round(rng.uniform(-1, 1, n_neg), 3).tolist()
            got = compute_eer(pos, neg)
            want = reference_eer(pos, neg)
            assert got == want, f"trial {trial}: {got} != {want}"


class TestF0:
    def test_pure_tone(self):
        f0, fraction = estimate_f0(make_sine(150.0, dur=1.0))
        assert f0 == pytest.approx(150.0, abs=1.0)
        assert fraction > 0.9

    def test_tone_outside_search_range(self):
        f0, fraction = estimate_f0(make_sine(150.0, dur=1.0), fmin=200.0, fmax=400.0)
        # Harmonic at 300 Hz does not exist for a pure 150 Hz sine; the
        # best in-range lag still matches a sub-multiple alias at 300 Hz.
        assert not (140.0 <= f0 <= 160.0) or not np.isfinite(f0)

    def test_noise_is_unvoiced(self):
        rng = np.random.default_rng(1)
        w = Waveform(0.5 * rng.uniform(-1, 1, SAMPLE_RATE))
        f0, fraction = estimate_f0(w)
        assert fraction < 0.5

    def test_too_short_input(self):
        f0, fraction = estimate_f0(Waveform(np.zeros(100)))
        assert np.isnan(f0)
        assert fraction == 0.0

    def test_band_accuracy_counts(self):
        waves = [make_sine(120.0, dur=0.6), make_sine(125.0, dur=0.6),
                 make_sine(300.0, dur=0.6)]
        res = f0_band_accuracy(waves, (100.0, 140.0))
        assert isinstance(res, F0BandResult)
        assert res.n_considered == 3
        assert res.n_inside == 2
        assert res.accuracy == pytest.approx(2 / 3)

    def test_band_accuracy_skips_unvoiced(self):
        rng = np.random.default_rng(2)
        noise = Waveform(0.3 * rng.uniform(-1, 1, SAMPLE_RATE // 2))
        res = f0_band_accuracy([make_sine(120.0, dur=0.6), noise], (100.0, 140.0))
        assert res.n_unvoiced == 1
        assert res.n_considered == 1
        assert res.accuracy == 1.0

    def test_empty_rejected(self):
        with pytest.raises(FormatError):
            f0_band_accuracy([], (100.0, 140.0))


class TestPairsIO:
    def test_read_two_and_three_column_rows(self, tmp_path):
        p = tmp_path / "pairs.csv"
        p.write_text("a.wav,b.wav\nc.wav,d.wav,different\n\n")
        rows = read_pairs(str(p))
        assert rows == [("a.wav", "b.wav", "same"),
                        ("c.wav", "d.wav", "different")]

    def test_bad_row_rejected(self, tmp_path):
        p = tmp_path / "pairs.csv"
        p.write_text("a.wav,b.wav,same,extra\n")
        with pytest.raises(FormatError):
            read_pairs(str(p))

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "pairs.csv"
        p.write_text("\n")
        with pytest.raises(FormatError):
            read_pairs(str(p))

    def test_score_pairs_end_to_end(self, tmp_path):
        wa, wb = tmp_path / "a.wav", tmp_path / "b.wav"
        write_wav(wa, make_sine(150.0, dur=0.5))
        write_wav(wb, make_sine(380.0, dur=0.5))
        rows = [(str(wa), str(wa), "same"), (str(wa), str(wb), "different")]
        scored = score_pairs(rows)
        assert scored[0].score == pytest.approx(1.0, abs=1e-9)
        assert scored[1].score < scored[0].score
        assert scored[1].label == "different"

    def test_embed_wav_unit_norm(self, tmp_path):
        p = tmp_path / "x.wav"
        write_wav(p, make_sine(200.0, dur=0.5))
        e = embed_wav(str(p))
        assert e.shape == (256,)
        assert np.linalg.norm(e) == pytest.approx(1.0, abs=1e-9)


class TestReport:
    def test_render_and_write(self, tmp_path):
        p = tmp_path / "report.csv"
        text = write_report(str(p), {"accuracy": 0.875, "n": 24})
        assert text == "accuracy,0.875\nn,24\n"
        assert p.read_text() == text

    def test_render_only(self):
        assert write_report(None, {"eer": 0.0}) == "eer,0.0\n"
