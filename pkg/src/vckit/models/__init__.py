"""Voice-conversion models and persistence."""

from .checkpoint import (
    config_hash,
    load_optim_state,
    load_params,
    read_config_text,
    read_manifest,
    read_train_state,
    save_checkpoint,
)
from .mediumvc import (
    MediumVC,
    MediumVCConfig,
    make_ssif,
    mvc_convert,
    mvc_training_step,
)
from .singlevc import (
    SingleVC,
    SingleVCConfig,
    config_to_text,
    sv_convert,
    sv_training_step,
    training_pair,
)
from .speaker import FileEncoder, MelStatsEncoder, speaker_embed

__all__ = [
    "config_hash",
    "load_optim_state",
    "load_params",
    "read_config_text",
    "read_manifest",
    "read_train_state",
    "save_checkpoint",
    "MediumVC",
    "MediumVCConfig",
    "make_ssif",
    "mvc_convert",
    "mvc_training_step",
    "SingleVC",
    "SingleVCConfig",
    "config_to_text",
    "sv_convert",
    "sv_training_step",
    "training_pair",
    "FileEncoder",
    "MelStatsEncoder",
    "speaker_embed",
]
