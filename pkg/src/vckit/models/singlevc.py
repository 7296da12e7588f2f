"""The any-to-one model: encoder to a 36-dim bottleneck, decoder to mel.

Training is self-supervised: the input is a pitch-shifted copy of the
utterance, the target is the original mel, so the encoder must discard the
shift while the decoder rebuilds the one target voice.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..dsp.melspec import MelConfig, mel_spectrogram
from ..dsp.psdr import SHIFT_MAX, SHIFT_MIN, psdr_shift, valid_shifts
from ..dsp.waveform import Waveform
from ..errors import ConfigError
from ..nn.functional import gelu, gelu_backward
from ..nn.layers import Conv1d, ConvertorBlock, InstanceNorm, Linear, ResBlock
from ..nn.param import Module

BOTTLENECK = 36
N_MELS = 80
N_HEADS = 4


@dataclass(frozen=True)
class SingleVCConfig:
    enc_channels: int = 256
    bottleneck: int = 36
    dec_channels: int = 256
    n_enc_layers: int = 3
    n_convertors: int = 2
    n_resblocks: int = 4
    kernel: int = 5
    shift_low: int = -6
    shift_high: int = 4
    include_zero_shift: bool = False
    seed: int = 1

    def __post_init__(self):
        if self.bottleneck != BOTTLENECK:
            raise ConfigError(f"bottleneck must be {BOTTLENECK}, got {self.bottleneck}")
        if not (SHIFT_MIN <= self.shift_low <= self.shift_high <= SHIFT_MAX):
            raise ConfigError(
                f"shift range [{self.shift_low}, {self.shift_high}] "
                f"not within [{SHIFT_MIN}, {SHIFT_MAX}]"
            )
        for name in ("enc_channels", "dec_channels", "n_enc_layers", "n_convertors",
                     "n_resblocks"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.dec_channels % N_HEADS != 0:
            raise ConfigError(f"dec_channels must be divisible by {N_HEADS} heads")
        if self.kernel % 2 != 1:
            raise ConfigError("kernel must be odd")

    def shifts(self) -> list[int]:
        return [int(s) for s in valid_shifts(self.shift_low, self.shift_high,
                                             include_zero=self.include_zero_shift)]


class SvEncoder(Module):
    """IN on the input, conv stack with per-layer IN, projection to 36."""

    def __init__(self, name: str, cfg: SingleVCConfig, rng, dtype=np.float32):
        c, k = cfg.enc_channels, cfg.kernel
        self.norm_in = InstanceNorm()
        self.conv_in = Conv1d(f"{name}.conv_in", N_MELS, c, k, rng, dtype=dtype)
        self.convs = [
            Conv1d(f"{name}.layer{i}.conv", c, c, k, rng, dtype=dtype)
            for i in range(cfg.n_enc_layers)
        ]
        self.norms = [InstanceNorm() for _ in range(cfg.n_enc_layers)]
        self.proj = Linear(f"{name}.proj", c, cfg.bottleneck, rng, dtype=dtype)
        self._pre_acts: list[np.ndarray] = []
        self.last_norm: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = self.norm_in.forward(x)
        h = self.conv_in.forward(h)
        self._pre_acts = []
        for conv, norm in zip(self.convs, self.norms):
            self._pre_acts.append(h)
            h = norm.forward(h + conv.forward(gelu(h)))
        self.last_norm = h
        return self.proj.forward(h)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        dh = self.proj.backward(dout)
        for conv, norm, pre in zip(reversed(self.convs), reversed(self.norms),
                                   reversed(self._pre_acts)):
            dh = norm.backward(dh)
            dh = dh + gelu_backward(conv.backward(dh), pre)
        dh = self.conv_in.backward(dh)
        return self.norm_in.backward(dh)


class SvDecoder(Module):
    """Linear in, convertor blocks, residual conv blocks, linear out."""

    def __init__(self, name: str, cfg: SingleVCConfig, rng, dtype=np.float32):
        c, k = cfg.dec_channels, cfg.kernel
        self.lin_in = Linear(f"{name}.lin_in", cfg.bottleneck, c, rng, dtype=dtype)
        self.convertors = [
            ConvertorBlock(f"{name}.convertor{i}", c, N_HEADS, rng, dtype=dtype)
            for i in range(cfg.n_convertors)
        ]
        self.resblocks = [
            ResBlock(f"{name}.resblock{i}", c, k, rng, dtype=dtype)
            for i in range(cfg.n_resblocks)
        ]
        self.lin_out = Linear(f"{name}.lin_out", c, N_MELS, rng, dtype=dtype)

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = self.lin_in.forward(x)
        for block in self.convertors:
            h = block.forward(h)
        for block in self.resblocks:
            h = block.forward(h)
        return self.lin_out.forward(h)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        dh = self.lin_out.backward(dout)
        for block in reversed(self.resblocks):
            dh = block.backward(dh)
        for block in reversed(self.convertors):
            dh = block.backward(dh)
        return self.lin_in.backward(dh)


class SingleVC(Module):
    def __init__(self, cfg: SingleVCConfig):
        rng = np.random.default_rng([cfg.seed, 1])
        self.cfg = cfg
        self.encoder = SvEncoder("enc", cfg, rng)
        self.decoder = SvDecoder("dec", cfg, rng)

    @property
    def dtype(self):
        return self.encoder.conv_in.v.data.dtype

    def encode(self, mel: np.ndarray) -> np.ndarray:
        return self.encoder.forward(np.asarray(mel, dtype=self.dtype))

    def decode(self, bottleneck: np.ndarray) -> np.ndarray:
        return self.decoder.forward(np.asarray(bottleneck, dtype=self.dtype))

    def forward(self, mel: np.ndarray) -> np.ndarray:
        return self.decode(self.encode(mel))

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return self.encoder.backward(self.decoder.backward(dout))

    def infer(self, mel: np.ndarray) -> np.ndarray:
        """Mel-to-mel conversion with the inference-time [0, 1] clamp."""
        return np.clip(self.forward(mel), 0.0, 1.0)


def config_to_text(cfg) -> str:
    """Canonical flat key=value rendering of a model config dataclass."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


def training_pair(
    wave: Waveform, s: int, mel_cfg: MelConfig, force: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """(input mel of the shifted signal, target mel of the original), equal length."""
    shifted = psdr_shift(wave, s, force=force)
    m_in = mel_spectrogram(shifted, mel_cfg).frames
    m_tgt = mel_spectrogram(wave, mel_cfg).frames
    t = min(m_in.shape[0], m_tgt.shape[0])
    return m_in[:t], m_tgt[:t]


def sv_training_step(model: SingleVC, wave: Waveform, s: int,
                     mel_cfg: MelConfig) -> float:
    """One loss/gradient evaluation on a single utterance (no optimizer update)."""
    m_in, m_tgt = training_pair(wave, s, mel_cfg)
    model.zero_grad()
    pred = model.forward(m_in)
    target = m_tgt.astype(pred.dtype)
    diff = pred - target
    loss = float(np.abs(diff).mean())
    model.backward(np.sign(diff) / diff.size)
    return loss


def sv_convert(wave: Waveform, model: SingleVC, mel_cfg: MelConfig) -> Waveform:
    """Full waveform-to-waveform conversion through the mel front end."""
    from ..dsp.griffinlim import griffin_lim_vocode
    from ..dsp.melspec import MelSpectrogram
    from ..dsp.waveform import peak_normalize

    mel = mel_spectrogram(peak_normalize(wave), mel_cfg)
    out = model.infer(mel.frames)
    return griffin_lim_vocode(MelSpectrogram(out.astype(np.float64)), mel_cfg)
