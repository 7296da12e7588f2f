"""Flat key=value run configs with typed schemas and canonical rendering.

One file carries both the model architecture and the optimization settings;
unknown keys are hard errors so typos never pass silently. The canonical
rendering (sorted keys, exact value round trip) is what gets hashed into
checkpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError
from ..models.mediumvc import MediumVCConfig
from ..models.singlevc import SingleVCConfig


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    weight_decay: float = 0.01
    lr_gamma: float = 0.999
    lr_decay_every: int = 100
    batch_size: int = 4
    max_steps: int = 1000
    seed: int = 1
    ckpt_every: int = 500

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if not (0.0 < self.lr_gamma <= 1.0):
            raise ConfigError(f"lr_gamma must be in (0, 1], got {self.lr_gamma}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("betas must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be non-negative")
        for name in ("lr_decay_every", "batch_size", "max_steps", "ckpt_every"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}") from None


def _parse_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}") from None


_TRAIN_SCHEMA = {
    "lr": _parse_float,
    "beta1": _parse_float,
    "beta2": _parse_float,
    "weight_decay": _parse_float,
    "lr_gamma": _parse_float,
    "lr_decay_every": _parse_int,
    "batch_size": _parse_int,
    "max_steps": _parse_int,
    "seed": _parse_int,
    "ckpt_every": _parse_int,
}

_SINGLE_SCHEMA = {
    "enc_channels": _parse_int,
    "bottleneck": _parse_int,
    "dec_channels": _parse_int,
    "n_enc_layers": _parse_int,
    "n_convertors": _parse_int,
    "n_resblocks": _parse_int,
    "kernel": _parse_int,
    "shift_low": _parse_int,
    "shift_high": _parse_int,
    "include_zero_shift": _parse_bool,
}

_MEDIUM_SCHEMA = {
    "enc_channels": _parse_int,
    "content_bottleneck": _parse_int,
    "content_dim": _parse_int,
    "spk_dim": _parse_int,
    "n_enc_layers": _parse_int,
    "n_convertors": _parse_int,
    "n_resblocks": _parse_int,
    "kernel": _parse_int,
    "mode": str,
}


def parse_kv(text: str) -> dict[str, str]:
    """key=value lines; '#' comments and blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _apply_schema(raw: dict[str, str], schema: dict) -> dict:
    typed = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            typed[key] = schema[key](value)
        except ConfigError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from None
    return typed


def render_config(values: dict) -> str:
    """Canonical text: sorted keys, one per line, exact round trip."""
    lines = []
    for key in sorted(values):
        value = values[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def _split(raw: dict[str, str], model_schema: dict, overrides: dict | None):
    schema = {**_TRAIN_SCHEMA, **model_schema}
    typed = _apply_schema(raw, schema)
    if overrides:
        typed.update(overrides)
    model_kv = {k: typed[k] for k in typed if k in model_schema}
    train_kv = {k: typed[k] for k in typed if k in _TRAIN_SCHEMA}
    return model_kv, train_kv


def load_single_config(text: str, overrides: dict | None = None):
    """-> (SingleVCConfig, TrainConfig, canonical_text)."""
    model_kv, train_kv = _split(parse_kv(text), _SINGLE_SCHEMA, overrides)
    tcfg = TrainConfig(**train_kv)
    try:
        mcfg = SingleVCConfig(seed=tcfg.seed, **model_kv)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return mcfg, tcfg, _canonical(mcfg, tcfg, _SINGLE_SCHEMA)


def load_medium_config(text: str, overrides: dict | None = None):
    """-> (MediumVCConfig, TrainConfig, canonical_text)."""
    model_kv, train_kv = _split(parse_kv(text), _MEDIUM_SCHEMA, overrides)
    tcfg = TrainConfig(**train_kv)
    try:
        mcfg = MediumVCConfig(seed=tcfg.seed, **model_kv)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return mcfg, tcfg, _canonical(mcfg, tcfg, _MEDIUM_SCHEMA)


def _canonical(mcfg, tcfg: TrainConfig, model_schema: dict) -> str:
    values = {}
    for key in model_schema:
        values[key] = getattr(mcfg, key)
    for key in _TRAIN_SCHEMA:
        values[key] = getattr(tcfg, key)
    return render_config(values)
