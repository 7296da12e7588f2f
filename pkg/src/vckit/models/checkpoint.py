"""Checkpoint directories: manifest + packed float32 params + sidecars.

Layout:
  manifest.json  param names, shapes, dtype, byte offsets, config hash, step
  params.bin     all parameters as float32 little-endian, manifest order
  config.txt     canonical config text the model was built from
  optim.bin      optimizer first/second moments (same order), optional
  train_state.json  step counter, optimizer t, RNG state, optional

Round trips are bit-exact: params are trained in float32, so save/load/save
reproduces identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from ..errors import ConfigError, FormatError
from ..nn.param import Module

MANIFEST_NAME = "manifest.json"
PARAMS_NAME = "params.bin"
CONFIG_NAME = "config.txt"
OPTIM_NAME = "optim.bin"
STATE_NAME = "train_state.json"

FORMAT_TAG = "vckit-checkpoint"
FORMAT_VERSION = 1


def config_hash(config_text: str) -> str:
    return hashlib.sha256(config_text.encode("utf-8")).hexdigest()


def save_checkpoint(
    ckpt_dir: str,
    model: Module,
    config_text: str,
    step: int,
    optim_state: dict | None = None,
    train_state: dict | None = None,
) -> None:
    os.makedirs(ckpt_dir, exist_ok=True)
    params = model.params()
    entries = []
    offset = 0
    blobs = []
    for p in params:
        data = np.ascontiguousarray(p.data, dtype="<f4")
        blobs.append(data.tobytes())
        entries.append(
            {
                "name": p.name,
                "shape": list(p.data.shape),
                "offset": offset,
                "size": int(data.size),
            }
        )
        offset += len(blobs[-1])
    manifest = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "dtype": "f32",
        "step": int(step),
        "config_hash": config_hash(config_text),
        "params": entries,
    }
    with open(os.path.join(ckpt_dir, PARAMS_NAME), "wb") as f:
        f.write(b"".join(blobs))
    with open(os.path.join(ckpt_dir, MANIFEST_NAME), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")
    with open(os.path.join(ckpt_dir, CONFIG_NAME), "w", encoding="utf-8") as f:
        f.write(config_text)
    if optim_state is not None:
        blob = b"".join(
            np.ascontiguousarray(a, dtype="<f4").tobytes()
            for key in ("m", "v")
            for a in optim_state[key]
        )
        with open(os.path.join(ckpt_dir, OPTIM_NAME), "wb") as f:
            f.write(blob)
    if train_state is not None:
        with open(os.path.join(ckpt_dir, STATE_NAME), "w", encoding="utf-8") as f:
            json.dump(train_state, f, sort_keys=True)
            f.write("\n")


def read_manifest(ckpt_dir: str) -> dict:
    path = os.path.join(ckpt_dir, MANIFEST_NAME)
    if not os.path.exists(path):
        raise ConfigError(f"no checkpoint manifest at {path}")
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    if manifest.get("format") != FORMAT_TAG:
        raise FormatError(f"not a checkpoint manifest: {path}")
    if manifest.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {manifest.get('version')}")
    if manifest.get("dtype") != "f32":
        raise FormatError(f"unsupported checkpoint dtype {manifest.get('dtype')}")
    return manifest


def read_config_text(ckpt_dir: str) -> str:
    path = os.path.join(ckpt_dir, CONFIG_NAME)
    if not os.path.exists(path):
        raise ConfigError(f"no config.txt in checkpoint {ckpt_dir}")
    with open(path, encoding="utf-8") as f:
        return f.read()


def load_params(ckpt_dir: str, model: Module) -> dict:
    """Load packed parameters into an already-constructed model, in place."""
    manifest = read_manifest(ckpt_dir)
    table = model.param_dict()
    entries = manifest["params"]
    if [e["name"] for e in entries] != [p.name for p in model.params()]:
        raise ConfigError("checkpoint parameter list does not match model architecture")
    with open(os.path.join(ckpt_dir, PARAMS_NAME), "rb") as f:
        raw = f.read()
    for e in entries:
        p = table[e["name"]]
        shape = tuple(e["shape"])
        if p.data.shape != shape:
            raise ConfigError(
                f"shape mismatch for {e['name']}: checkpoint {shape} vs model {p.data.shape}"
            )
        count = int(np.prod(shape)) if shape else 1
        if e["size"] != count:
            raise FormatError(f"manifest size mismatch for {e['name']}")
        start = e["offset"]
        end = start + 4 * count
        if end > len(raw):
            raise FormatError("params.bin truncated")
        data = np.frombuffer(raw[start:end], dtype="<f4").reshape(shape)
        p.data = data.astype(np.float32)
        p.zero_grad()
    return manifest


def load_optim_state(ckpt_dir: str, model: Module) -> dict | None:
    path = os.path.join(ckpt_dir, OPTIM_NAME)
    if not os.path.exists(path):
        return None
    with open(path, "rb") as f:
        raw = f.read()
    params = model.params()
    total = sum(p.data.size for p in params)
    if len(raw) != 2 * 4 * total:
        raise FormatError("optim.bin size does not match model")
    flat = np.frombuffer(raw, dtype="<f4")
    m, v, pos = [], [], 0
    for group in (m, v):
        for p in params:
            n = p.data.size
            group.append(flat[pos : pos + n].reshape(p.data.shape).astype(np.float32))
            pos += n
    return {"m": m, "v": v}


def read_train_state(ckpt_dir: str) -> dict | None:
    path = os.path.join(ckpt_dir, STATE_NAME)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as f:
        return json.load(f)
