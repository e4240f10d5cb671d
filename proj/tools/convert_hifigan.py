#!/usr/bin/env python3
# Copyright 2026 The Sketchvoice Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Converts a HiFi-GAN generator checkpoint into a sketchvoice archive.

Weight normalisation is folded into plain weights (w = g * v / |v|, norm
over every axis but the first), so the C++ generator only sees convolutions.

    convert_hifigan.py --checkpoint g_02500000 --config config.json --out hifigan.skva
"""

import argparse
import json
import struct
import sys

import numpy as np

MAGIC = b"SKVA"
FORMAT_VERSION = 1

CONFIG_KEYS = (
    "sample_rate", "n_fft", "win_size", "hop_size", "num_mels", "fmin", "fmax",
    "upsample_rates", "upsample_kernel_sizes", "upsample_initial_channel",
    "resblock_kernel_sizes", "resblock_dilation_sizes", "resblock",
)


def fold_weight_norm(g, v):
    axes = tuple(range(1, v.ndim))
    norm = np.sqrt(np.sum(v.astype(np.float64) ** 2, axis=axes, keepdims=True))
    return (g * v / norm).astype(np.float32)


PAIRS = (("weight_g", "weight_v"),
         ("parametrizations.weight.original0", "parametrizations.weight.original1"))


def split_name(name, suffix):
    """Prefix of `name` ending in `suffix` (with its dot), or None."""
    if name == suffix:
        return ""
    if name.endswith("." + suffix):
        return name[: -len(suffix)]
    return None


def fold_state_dict(state):
    """Returns {name: float32 array} with weight-norm pairs merged."""
    out = {}
    for name, value in state.items():
        a = np.asarray(value, dtype=np.float32)
        for g_suffix, v_suffix in PAIRS:
            base = split_name(name, g_suffix)
            if base is not None:
                out[base + "weight"] = fold_weight_norm(a, np.asarray(state[base + v_suffix]))
                break
            if split_name(name, v_suffix) is not None:
                break
        else:
            out[name] = a
    return out


def write_archive(path, meta, tensors):
    names = sorted(tensors)
    header = {
        "meta": meta,
        "tensors": [{"name": n, "shape": list(tensors[n].shape)} for n in names],
    }
    text = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        f.write(struct.pack("<Q", len(text)))
        f.write(text)
        for n in names:
            f.write(np.ascontiguousarray(tensors[n], dtype="<f4").tobytes())


def read_archive(path):
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError(f"{path}: not an archive")
        (version,) = struct.unpack("<I", f.read(4))
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        (size,) = struct.unpack("<Q", f.read(8))
        header = json.loads(f.read(size))
        tensors = {}
        for entry in header["tensors"]:
            shape = entry["shape"]
            count = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(f.read(4 * count), dtype="<f4")
            tensors[entry["name"]] = data.reshape(shape)
    return header["meta"], tensors


def load_generator_state(path):
    import torch  # only needed for the original checkpoint format

    blob = torch.load(path, map_location="cpu", weights_only=True)
    state = blob.get("generator", blob) if isinstance(blob, dict) else blob
    return {k: v.numpy() for k, v in state.items()}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--checkpoint", required=True, help="generator checkpoint (torch)")
    p.add_argument("--config", required=True, help="HiFi-GAN config.json")
    p.add_argument("--out", required=True, help="archive to write")
    args = p.parse_args(argv)

    with open(args.config) as f:
        config = json.load(f)
    missing = [k for k in CONFIG_KEYS if k not in config and k != "resblock"]
    if missing:
        print(f"error: config lacks {', '.join(missing)}", file=sys.stderr)
        return 1
    if str(config.get("resblock", "1")) != "1":
        print("error: only residual block type 1 is supported", file=sys.stderr)
        return 1
    meta = {"hifigan": {k: config[k] for k in CONFIG_KEYS if k in config}}
    meta["hifigan"]["resblock"] = "1"

    tensors = fold_state_dict(load_generator_state(args.checkpoint))
    write_archive(args.out, meta, tensors)
    print(f"wrote {args.out} ({len(tensors)} tensors)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
