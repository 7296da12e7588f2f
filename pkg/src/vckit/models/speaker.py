"""Speaker embedding producers: mel-statistics encoder and a file adapter.

Both yield unit-norm 256-dim vectors. The mel-statistics variant is
training-free and deterministic: per-bin time mean and std (160 values)
pushed through a fixed random orthogonal map. The file variant serves
embeddings computed by an external system, keyed by utterance id through a
TSV manifest.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from ..errors import ConfigError, FormatError, RangeError

SPK_DIM = 256
STATS_DIM = 160
MIN_FRAMES = 10
_PROJ_SEED = 60317


@lru_cache(maxsize=1)
def _orthogonal_map() -> np.ndarray:
    """Fixed 160 -> 256 map with orthonormal columns (seeded, sign-canonical)."""
    rng = np.random.default_rng(_PROJ_SEED)
    a = rng.standard_normal((SPK_DIM, STATS_DIM))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    q.setflags(write=False)
    return q


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise RangeError("speaker embedding has zero norm")
    return vec / norm


class MelStatsEncoder:
    """Deterministic embedding from per-bin mel statistics."""

    variant = "mel_stats"

    def embed_mel(self, mel: np.ndarray, utt_id: str | None = None) -> np.ndarray:
        mel = np.asarray(mel, dtype=np.float64)
        if mel.ndim != 2:
            raise FormatError(f"expected T x n_mels matrix, got shape {mel.shape}")
        if mel.shape[0] < MIN_FRAMES:
            raise RangeError(
                f"speaker reference too short: {mel.shape[0]} frames < {MIN_FRAMES}"
            )
        stats = np.concatenate([mel.mean(axis=0), mel.std(axis=0)])
        if stats.size != STATS_DIM:
            raise FormatError(f"expected {STATS_DIM // 2} mel bins, got {mel.shape[1]}")
        return _unit(_orthogonal_map() @ stats)


class FileEncoder:
    """Embeddings precomputed elsewhere: TSV manifest of id -> .f32 vector file."""

    variant = "external_file"

    def __init__(self, manifest_path: str):
        if not os.path.exists(manifest_path):
            raise ConfigError(f"speaker embedding manifest not found: {manifest_path}")
        self._root = os.path.dirname(os.path.abspath(manifest_path))
        self._table: dict[str, str] = {}
        with open(manifest_path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise FormatError(
                        f"{manifest_path}:{lineno}: expected 'id<TAB>path', got {line!r}"
                    )
                self._table[parts[0]] = parts[1]

    def embed_mel(self, mel: np.ndarray, utt_id: str | None = None) -> np.ndarray:
        if utt_id is None:
            raise ConfigError("external speaker encoder needs an utterance id")
        if utt_id not in self._table:
            raise ConfigError(f"no speaker embedding listed for utterance {utt_id!r}")
        path = self._table[utt_id]
        if not os.path.isabs(path):
            path = os.path.join(self._root, path)
        with open(path, "rb") as f:
            raw = f.read()
        if len(raw) != 4 * SPK_DIM:
            raise FormatError(
                f"embedding file {path} holds {len(raw)} bytes, expected {4 * SPK_DIM}"
            )
        vec = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"embedding file {path} contains non-finite values")
        return _unit(vec)


def speaker_embed(mel: np.ndarray, encoder, utt_id: str | None = None) -> np.ndarray:
    """Unit-norm 256-dim speaker embedding for one utterance."""
    return encoder.embed_mel(mel, utt_id)
