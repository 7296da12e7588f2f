"""Training tooling: batching, optimizer, configs, toy corpus, loops."""

from .batching import Batch, masked_l1, masked_l1_grad, pad_batch
from .config import (
    TrainConfig,
    load_medium_config,
    load_single_config,
    parse_kv,
    render_config,
)
from .loop import (
    build_medium_from_ckpt,
    build_single_from_ckpt,
    load_corpus_waves,
    train_medium,
    train_single,
)
from .optim import AdamW, exp_lr
from .toydata import (
    F0_BANDS,
    make_toy_corpus,
    read_metadata,
    speaker_band,
    speaker_id,
    synth_utterance,
)

__all__ = [
    "Batch",
    "masked_l1",
    "masked_l1_grad",
    "pad_batch",
    "TrainConfig",
    "load_medium_config",
    "load_single_config",
    "parse_kv",
    "render_config",
    "build_medium_from_ckpt",
    "build_single_from_ckpt",
    "load_corpus_waves",
    "train_medium",
    "train_single",
    "AdamW",
    "exp_lr",
    "F0_BANDS",
    "make_toy_corpus",
    "read_metadata",
    "speaker_band",
    "speaker_id",
    "synth_utterance",
]
