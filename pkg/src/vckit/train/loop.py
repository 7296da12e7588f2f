"""Training drivers: corpus loading, step loops, logging, checkpoint cadence.

Both trainers share the same skeleton: precompute per-utterance features,
sample a batch each step, stream per-item forward/backward passes into one
accumulated gradient, then one AdamW update. Resume restores parameters,
optimizer moments, and the data sampler's RNG state, so a resumed run
continues the loss curve exactly.
"""

from __future__ import annotations

import os

import numpy as np

from ..dsp.melspec import MelConfig, mel_spectrogram
from ..dsp.waveform import Waveform, peak_normalize
from ..dsp.wavio import read_wav
from ..errors import ConfigError, FormatError
from ..models.checkpoint import (
    config_hash,
    load_optim_state,
    load_params,
    read_config_text,
    read_train_state,
    save_checkpoint,
)
from ..models.mediumvc import MediumVC, make_ssif
from ..models.singlevc import SingleVC, training_pair
from ..models.speaker import MelStatsEncoder
from .batching import masked_l1, pad_batch
from .config import TrainConfig, load_medium_config, load_single_config
from .optim import AdamW, exp_lr
from .toydata import read_metadata

LOG_NAME = "train_log.csv"


def load_corpus_waves(corpus_dir: str) -> tuple[list[Waveform], list[str]]:
    """All corpus utterances, peak-normalized, with their utterance ids."""
    entries = read_metadata(corpus_dir)
    if not entries:
        raise FormatError(f"no WAV files found in {corpus_dir}")
    waves, ids = [], []
    for name, _ in entries:
        waves.append(peak_normalize(read_wav(os.path.join(corpus_dir, name))))
        ids.append(os.path.splitext(name)[0])
    return waves, ids


def _append_log(out_dir: str, rows: list[tuple[int, float, float]]) -> None:
    path = os.path.join(out_dir, LOG_NAME)
    new = not os.path.exists(path)
    with open(path, "a", encoding="utf-8") as f:
        if new:
            f.write("step,loss,lr\n")
        for step, loss, lr in rows:
            f.write(f"{step},{loss:.8f},{lr:.10g}\n")
        f.flush()
        os.fsync(f.fileno())


def _trajectory_text(canonical: str) -> str:
    """Config lines that define the run's trajectory. Stopping and snapshot
    cadence (max_steps, ckpt_every) may change between resumes; everything
    else must not."""
    keep = [line for line in canonical.splitlines()
            if not line.startswith(("max_steps=", "ckpt_every="))]
    return "\n".join(keep) + "\n"


def _resume_state(out_dir: str, canonical: str, model, opt: AdamW, rng) -> int:
    stored = read_config_text(out_dir)
    if config_hash(_trajectory_text(stored)) != config_hash(_trajectory_text(canonical)):
        raise ConfigError("resume config does not match the checkpoint's config")
    load_params(out_dir, model)
    state = read_train_state(out_dir)
    if state is None:
        raise ConfigError(f"checkpoint in {out_dir} has no train state to resume from")
    optim = load_optim_state(out_dir, model)
    if optim is not None:
        optim["t"] = state["adam_t"]
        opt.load_state(optim)
    rng.bit_generator.state = state["rng"]
    return int(state["step"])


def _save(out_dir, model, canonical, step, opt, rng) -> None:
    save_checkpoint(
        out_dir,
        model,
        canonical,
        step,
        optim_state=opt.state(),
        train_state={"step": step, "adam_t": opt.t, "rng": rng.bit_generator.state},
    )


def _run_steps(model, items_for, n_items, tcfg: TrainConfig, shifts, out_dir,
               canonical, opt, data_rng, start: int) -> list[float]:
    """The shared step loop. items_for(idx, shift) -> (input_mel, target_mel)."""
    losses = []
    pending = []
    for step in range(start, tcfg.max_steps):
        idx = data_rng.choice(n_items, size=tcfg.batch_size, replace=True)
        if shifts is not None:
            ss = data_rng.choice(shifts, size=tcfg.batch_size, replace=True)
        else:
            ss = [None] * tcfg.batch_size
        pairs = [items_for(int(i), s if s is None else int(s)) for i, s in zip(idx, ss)]
        inputs = pad_batch([p[0] for p in pairs])
        targets = pad_batch([p[1] for p in pairs])
        total = int(inputs.mask.sum()) * inputs.mels.shape[-1]
        model.zero_grad()
        preds = np.zeros_like(targets.mels)
        for b, (m_in, m_tgt) in enumerate(pairs):
            pred = model.forward(m_in)
            preds[b, : pred.shape[0]] = pred
            dpred = np.sign(pred - m_tgt.astype(pred.dtype)) / total
            model.backward(dpred.astype(pred.dtype))
        loss = masked_l1(preds, targets.mels, inputs.mask)
        lr = exp_lr_of(tcfg, step)
        opt.step(lr)
        losses.append(loss)
        pending.append((step, loss, lr))
        done = step + 1
        if done % tcfg.ckpt_every == 0 or done == tcfg.max_steps:
            _append_log(out_dir, pending)
            pending = []
            _save(out_dir, model, canonical, done, opt, data_rng)
    if pending:
        _append_log(out_dir, pending)
    return losses


def exp_lr_of(tcfg: TrainConfig, step: int) -> float:
    return exp_lr(step, tcfg.lr, tcfg.lr_gamma, tcfg.lr_decay_every)


def train_single(corpus_dir: str, config_text: str, out_dir: str,
                 resume: bool = False, mel_cfg: MelConfig | None = None):
    """Train the any-to-one model on every WAV in corpus_dir."""
    mel_cfg = mel_cfg or MelConfig()
    mcfg, tcfg, canonical = load_single_config(config_text)
    model = SingleVC(mcfg)
    opt = AdamW(model.params(), tcfg.beta1, tcfg.beta2, tcfg.weight_decay)
    data_rng = np.random.default_rng([tcfg.seed, 3])
    os.makedirs(out_dir, exist_ok=True)
    start = _resume_state(out_dir, canonical, model, opt, data_rng) if resume else 0

    waves, _ = load_corpus_waves(corpus_dir)
    shifts = mcfg.shifts()
    cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def items_for(i: int, s: int):
        key = (i, s)
        if key not in cache:
            m_in, m_tgt = training_pair(waves[i], s, mel_cfg)
            cache[key] = (m_in.astype(np.float32), m_tgt.astype(np.float32))
        return cache[key]

    losses = _run_steps(model, items_for, len(waves), tcfg, shifts, out_dir,
                        canonical, opt, data_rng, start)
    return model, losses


def build_single_from_ckpt(ckpt_dir: str, load_weights: bool = True):
    """Reconstruct a SingleVC from a checkpoint directory."""
    text = read_config_text(ckpt_dir)
    mcfg, _, _ = load_single_config(text)
    model = SingleVC(mcfg)
    manifest = None
    if load_weights:
        manifest = load_params(ckpt_dir, model)
    return model, manifest


def build_medium_from_ckpt(ckpt_dir: str):
    text = read_config_text(ckpt_dir)
    mcfg, _, _ = load_medium_config(text)
    model = MediumVC(mcfg)
    manifest = load_params(ckpt_dir, model)
    return model, manifest


def train_medium(corpus_dir: str, config_text: str, out_dir: str,
                 single_ckpt: str | None = None, mode: str | None = None,
                 resume: bool = False, mel_cfg: MelConfig | None = None):
    """Train the any-to-any model; the SSIF producer stays frozen throughout."""
    mel_cfg = mel_cfg or MelConfig()
    overrides = {"mode": mode} if mode is not None else None
    mcfg, tcfg, canonical = load_medium_config(config_text, overrides)

    single = None
    if mcfg.mode in ("full", "mwus"):
        if single_ckpt is None:
            raise ConfigError(f"mode {mcfg.mode!r} requires a SingleVC checkpoint")
        single, _ = build_single_from_ckpt(single_ckpt, load_weights=(mcfg.mode == "full"))

    model = MediumVC(mcfg)
    opt = AdamW(model.params(), tcfg.beta1, tcfg.beta2, tcfg.weight_decay)
    data_rng = np.random.default_rng([tcfg.seed, 3])
    os.makedirs(out_dir, exist_ok=True)
    start = _resume_state(out_dir, canonical, model, opt, data_rng) if resume else 0

    waves, _ = load_corpus_waves(corpus_dir)
    encoder = MelStatsEncoder()
    x_mels, yhat_mels, spks = [], [], []
    for w in waves:
        x_mel = mel_spectrogram(w, mel_cfg).frames.astype(np.float32)
        x_mels.append(x_mel)
        yhat_mels.append(make_ssif(single, x_mel, mcfg.mode).astype(np.float32))
        spks.append(encoder.embed_mel(x_mel).astype(np.float32))

    losses = []
    pending = []
    for step in range(start, tcfg.max_steps):
        idx = data_rng.choice(len(waves), size=tcfg.batch_size, replace=True)
        pairs = [(yhat_mels[int(i)], x_mels[int(i)]) for i in idx]
        inputs = pad_batch([p[0] for p in pairs])
        targets = pad_batch([p[1] for p in pairs])
        total = int(inputs.mask.sum()) * inputs.mels.shape[-1]
        model.zero_grad()
        preds = np.zeros_like(targets.mels)
        for b, (i, (m_in, m_tgt)) in enumerate(zip(idx, pairs)):
            pred = model.forward(m_in, spks[int(i)])
            preds[b, : pred.shape[0]] = pred
            dpred = np.sign(pred - m_tgt.astype(pred.dtype)) / total
            model.backward(dpred.astype(pred.dtype))
        loss = masked_l1(preds, targets.mels, inputs.mask)
        lr = exp_lr_of(tcfg, step)
        opt.step(lr)
        losses.append(loss)
        pending.append((step, loss, lr))
        done = step + 1
        if done % tcfg.ckpt_every == 0 or done == tcfg.max_steps:
            _append_log(out_dir, pending)
            pending = []
            _save(out_dir, model, canonical, done, opt, data_rng)
    if pending:
        _append_log(out_dir, pending)
    return model, losses, single
