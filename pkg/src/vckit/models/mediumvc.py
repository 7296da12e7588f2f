"""The any-to-any model: content encoder over SSIF mels, AdaIN decoder.

Training reconstructs each utterance from (a) its single-voice rendition
Y-hat as the content carrier and (b) its own speaker embedding. At
inference the embedding comes from a target reference utterance instead, so
the decoder re-voices the content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dsp.melspec import MelConfig, MelSpectrogram, mel_spectrogram
from ..dsp.waveform import Waveform, peak_normalize
from ..errors import ConfigError
from ..nn.functional import adain, adain_backward, gelu, gelu_backward
from ..nn.layers import Conv1d, ConvertorBlock, InstanceNorm, Linear, ResBlock
from ..nn.param import Module
from .singlevc import N_HEADS, N_MELS, SingleVC
from .speaker import SPK_DIM, MelStatsEncoder, speaker_embed

CONTENT_BOTTLENECK = 36
CONTENT_DIM = 256
MODES = ("full", "mwus", "mwos")


@dataclass(frozen=True)
class MediumVCConfig:
    enc_channels: int = 256
    content_bottleneck: int = 36
    content_dim: int = 256
    spk_dim: int = 256
    n_enc_layers: int = 4
    n_convertors: int = 3
    n_resblocks: int = 6
    kernel: int = 5
    mode: str = "full"
    seed: int = 1

    def __post_init__(self):
        if self.content_bottleneck != CONTENT_BOTTLENECK:
            raise ConfigError(
                f"content_bottleneck must be {CONTENT_BOTTLENECK}, "
                f"got {self.content_bottleneck}"
            )
        if self.content_dim != CONTENT_DIM:
            raise ConfigError(f"content_dim must be {CONTENT_DIM}")
        if self.spk_dim != SPK_DIM:
            raise ConfigError(f"spk_dim must be {SPK_DIM}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {'|'.join(MODES)}, got {self.mode!r}")
        if self.content_dim % N_HEADS != 0:
            raise ConfigError(f"content_dim must be divisible by {N_HEADS} heads")
        for name in ("enc_channels", "n_enc_layers", "n_convertors", "n_resblocks"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.kernel % 2 != 1:
            raise ConfigError("kernel must be odd")


class McContentEncoder(Module):
    """Conv stack with INs to a 36-dim bottleneck, expanded to 256, final IN."""

    def __init__(self, name: str, cfg: MediumVCConfig, rng, dtype=np.float32):
        c, k = cfg.enc_channels, cfg.kernel
        self.norm_in = InstanceNorm()
        self.conv_in = Conv1d(f"{name}.conv_in", N_MELS, c, k, rng, dtype=dtype)
        self.convs = [
            Conv1d(f"{name}.layer{i}.conv", c, c, k, rng, dtype=dtype)
            for i in range(cfg.n_enc_layers)
        ]
        self.norms = [InstanceNorm() for _ in range(cfg.n_enc_layers)]
        self.proj = Linear(f"{name}.proj", c, cfg.content_bottleneck, rng, dtype=dtype)
        self.expand = Linear(f"{name}.expand", cfg.content_bottleneck, cfg.content_dim,
                             rng, dtype=dtype)
        self.norm_out = InstanceNorm()
        self._pre_acts: list[np.ndarray] = []

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = self.norm_in.forward(x)
        h = self.conv_in.forward(h)
        self._pre_acts = []
        for conv, norm in zip(self.convs, self.norms):
            self._pre_acts.append(h)
            h = norm.forward(h + conv.forward(gelu(h)))
        b = self.proj.forward(h)
        return self.norm_out.forward(self.expand.forward(b))

    def backward(self, dout: np.ndarray) -> np.ndarray:
        db = self.expand.backward(self.norm_out.backward(dout))
        dh = self.proj.backward(db)
        for conv, norm, pre in zip(reversed(self.convs), reversed(self.norms),
                                   reversed(self._pre_acts)):
            dh = norm.backward(dh)
            dh = dh + gelu_backward(conv.backward(dh), pre)
        dh = self.conv_in.backward(dh)
        return self.norm_in.backward(dh)


class McDecoder(Module):
    """AdaIN speaker re-injection, convertors, resblocks, projection to mel."""

    def __init__(self, name: str, cfg: MediumVCConfig, rng, dtype=np.float32):
        c, k = cfg.content_dim, cfg.kernel
        self.convertors = [
            ConvertorBlock(f"{name}.convertor{i}", c, N_HEADS, rng, dtype=dtype)
            for i in range(cfg.n_convertors)
        ]
        self.resblocks = [
            ResBlock(f"{name}.resblock{i}", c, k, rng, dtype=dtype)
            for i in range(cfg.n_resblocks)
        ]
        self.lin_out = Linear(f"{name}.lin_out", c, N_MELS, rng, dtype=dtype)
        self._adain_cache = None

    def forward(self, content: np.ndarray, spk: np.ndarray) -> np.ndarray:
        h, self._adain_cache = adain(content, spk)
        for block in self.convertors:
            h = block.forward(h)
        for block in self.resblocks:
            h = block.forward(h)
        return self.lin_out.forward(h)

    def backward(self, dout: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dh = self.lin_out.backward(dout)
        for block in reversed(self.resblocks):
            dh = block.backward(dh)
        for block in reversed(self.convertors):
            dh = block.backward(dh)
        return adain_backward(dh, self._adain_cache)


class MediumVC(Module):
    def __init__(self, cfg: MediumVCConfig):
        rng = np.random.default_rng([cfg.seed, 2])
        self.cfg = cfg
        self.content_enc = McContentEncoder("cenc", cfg, rng)
        self.decoder = McDecoder("cdec", cfg, rng)

    @property
    def dtype(self):
        return self.content_enc.conv_in.v.data.dtype

    def forward(self, yhat_mel: np.ndarray, spk: np.ndarray) -> np.ndarray:
        content = self.content_enc.forward(np.asarray(yhat_mel, dtype=self.dtype))
        return self.decoder.forward(content, np.asarray(spk, dtype=self.dtype))

    def backward(self, dout: np.ndarray) -> np.ndarray:
        dcontent, _ = self.decoder.backward(dout)
        return self.content_enc.backward(dcontent)

    def infer(self, yhat_mel: np.ndarray, spk: np.ndarray) -> np.ndarray:
        return np.clip(self.forward(yhat_mel, spk), 0.0, 1.0)


def make_ssif(single: SingleVC | None, x_mel: np.ndarray, mode: str) -> np.ndarray:
    """The content carrier Y-hat for one utterance, per ablation mode."""
    if mode == "mwos":
        return np.asarray(x_mel)
    if single is None:
        raise ConfigError(f"mode {mode!r} needs a SingleVC model")
    return single.infer(x_mel)


def mvc_training_step(model: MediumVC, yhat_mel: np.ndarray, x_mel: np.ndarray,
                      spk: np.ndarray) -> float:
    """One loss/gradient evaluation; gradients stay out of the SSIF producer."""
    t = min(yhat_mel.shape[0], x_mel.shape[0])
    model.zero_grad()
    pred = model.forward(yhat_mel[:t], spk)
    diff = pred - np.asarray(x_mel[:t], dtype=pred.dtype)
    loss = float(np.abs(diff).mean())
    model.backward(np.sign(diff) / diff.size)
    return loss


def mvc_convert(
    src: Waveform,
    ref: Waveform,
    medium: MediumVC,
    single: SingleVC | None,
    mel_cfg: MelConfig,
    roundtrip_audio: bool = False,
    spk_encoder=None,
    ref_utt_id: str | None = None,
) -> Waveform:
    """Convert src's speech into ref's voice; output frames equal src frames."""
    from ..dsp.griffinlim import griffin_lim_vocode

    if spk_encoder is None:
        spk_encoder = MelStatsEncoder()
    src_mel = mel_spectrogram(peak_normalize(src), mel_cfg).frames
    ref_mel = mel_spectrogram(peak_normalize(ref), mel_cfg).frames
    spk = speaker_embed(ref_mel, spk_encoder, ref_utt_id)
    yhat = make_ssif(single, src_mel, medium.cfg.mode)
    if roundtrip_audio and medium.cfg.mode != "mwos":
        wave_y = griffin_lim_vocode(
            MelSpectrogram(np.asarray(yhat, dtype=np.float64)), mel_cfg
        )
        padded = Waveform(
            np.concatenate([wave_y.samples, np.zeros(mel_cfg.n_fft - mel_cfg.hop)]),
            wave_y.sample_rate,
        )
        yhat = mel_spectrogram(padded, mel_cfg).frames
    out = medium.infer(yhat, spk)
    return griffin_lim_vocode(MelSpectrogram(out.astype(np.float64)), mel_cfg)
