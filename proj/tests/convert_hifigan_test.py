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


"""Converter checks against torch: weight-norm folding, archive layout, and a
tiny generator whose C++ rendering must match the torch forward pass."""

import json
import os
import subprocess
import sys
import tempfile
import unittest
import wave

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F
from torch.nn.utils import weight_norm

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tools"))
import convert_hifigan  # noqa: E402

CLI = os.environ.get("SKETCHVOICE_CLI", "")

TINY = {
    "resblock": "1",
    "upsample_rates": [16, 16],
    "upsample_kernel_sizes": [32, 32],
    "upsample_initial_channel": 8,
    "resblock_kernel_sizes": [3, 5],
    "resblock_dilation_sizes": [[1, 3], [1, 2]],
    "num_mels": 80,
    "n_fft": 1024,
    "hop_size": 256,
    "win_size": 1024,
    "sample_rate": 22050,
    "fmin": 0,
    "fmax": 8000,
}


def pad_for(kernel, dilation):
    return (kernel * dilation - dilation) // 2


class ResBlock(nn.Module):
    def __init__(self, ch, kernel, dilations):
        super().__init__()
        self.convs1 = nn.ModuleList(
            weight_norm(nn.Conv1d(ch, ch, kernel, dilation=d, padding=pad_for(kernel, d)))
            for d in dilations)
        self.convs2 = nn.ModuleList(
            weight_norm(nn.Conv1d(ch, ch, kernel, padding=pad_for(kernel, 1)))
            for _ in dilations)

    def forward(self, x):
        for c1, c2 in zip(self.convs1, self.convs2):
            t = c2(F.leaky_relu(c1(F.leaky_relu(x, 0.1)), 0.1))
            x = x + t
        return x


class Generator(nn.Module):
    def __init__(self, h):
        super().__init__()
        ch = h["upsample_initial_channel"]
        self.nk = len(h["resblock_kernel_sizes"])
        self.conv_pre = weight_norm(nn.Conv1d(h["num_mels"], ch, 7, padding=3))
        self.ups = nn.ModuleList()
        self.resblocks = nn.ModuleList()
        for i, (u, k) in enumerate(zip(h["upsample_rates"], h["upsample_kernel_sizes"])):
            cin, cout = ch // (2 ** i), ch // (2 ** (i + 1))
            self.ups.append(weight_norm(nn.ConvTranspose1d(cin, cout, k, u, padding=(k - u) // 2)))
            for k2, d in zip(h["resblock_kernel_sizes"], h["resblock_dilation_sizes"]):
                self.resblocks.append(ResBlock(cout, k2, d))
        self.conv_post = weight_norm(nn.Conv1d(cout, 1, 7, padding=3))

    def forward(self, x):
        x = self.conv_pre(x)
        for i, up in enumerate(self.ups):
            x = up(F.leaky_relu(x, 0.1))
            xs = sum(self.resblocks[i * self.nk + j](x) for j in range(self.nk))
            x = xs / self.nk
        return torch.tanh(self.conv_post(F.leaky_relu(x)))


def read_wav(path):
    with wave.open(path, "rb") as w:
        frames = w.readframes(w.getnframes())
    return np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0


class FoldTest(unittest.TestCase):
    def test_matches_torch_for_conv_and_transposed_conv(self):
        torch.manual_seed(0)
        for layer in (nn.Conv1d(4, 6, 5), nn.ConvTranspose1d(6, 3, 8, 4)):
            m = weight_norm(layer)
            with torch.no_grad():
                m.weight_g.mul_(torch.rand_like(m.weight_g) + 0.5)
            m(torch.zeros(1, m.weight_v.shape[0] if isinstance(layer, nn.ConvTranspose1d)
                          else 4, 16))
            expected = m.weight.detach().numpy()
            folded = convert_hifigan.fold_state_dict(
                {k: v.detach().numpy() for k, v in m.state_dict().items()})
            self.assertEqual(set(folded), {"weight", "bias"})
            np.testing.assert_allclose(folded["weight"], expected, rtol=1e-6, atol=1e-7)

    def test_parametrization_names_fold_too(self):
        g = np.array([[[2.0]], [[3.0]]])
        v = np.array([[[3.0, 4.0]], [[0.0, 1.0]]])
        out = convert_hifigan.fold_state_dict({
            "c.parametrizations.weight.original0": g,
            "c.parametrizations.weight.original1": v,
            "c.bias": np.zeros(2)})
        np.testing.assert_allclose(out["c.weight"], [[[1.2, 1.6]], [[0.0, 3.0]]], rtol=1e-6)

    def test_archive_round_trip(self):
        t = {"a": np.arange(6, dtype=np.float32).reshape(2, 3), "b": np.ones(4, np.float32)}
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "x.skva")
            convert_hifigan.write_archive(path, {"k": 1}, t)
            meta, back = convert_hifigan.read_archive(path)
        self.assertEqual(meta, {"k": 1})
        for k in t:
            np.testing.assert_array_equal(back[k], t[k])


@unittest.skipUnless(CLI, "SKETCHVOICE_CLI not set")
class EndToEndTest(unittest.TestCase):
    def test_cpp_generator_matches_torch(self):
        torch.manual_seed(1)
        gen = Generator(TINY).eval()
        mel = torch.randn(1, 80, 12) * 0.5 - 4.0
        with torch.no_grad():
            expected = gen(mel).numpy().reshape(-1)
        with tempfile.TemporaryDirectory() as d:
            ckpt = os.path.join(d, "g_00000001")
            cfg = os.path.join(d, "config.json")
            out = os.path.join(d, "tiny.skva")
            torch.save({"generator": gen.state_dict()}, ckpt)
            with open(cfg, "w") as f:
                json.dump(TINY, f)
            self.assertEqual(convert_hifigan.main(
                ["--checkpoint", ckpt, "--config", cfg, "--out", out]), 0)
            meta, tensors = convert_hifigan.read_archive(out)
            self.assertEqual(meta["hifigan"]["upsample_rates"], [16, 16])
            self.assertIn("resblocks.3.convs1.1.weight", tensors)
            self.assertFalse(any(k.endswith("_g") or k.endswith("_v") for k in tensors))

            mel_path = os.path.join(d, "mel.json")
            with open(mel_path, "w") as f:
                json.dump({"mel": mel[0].T.tolist()}, f)
            wav = os.path.join(d, "out.wav")
            subprocess.run([CLI, "vocode", "--mel", mel_path, "--out", wav, "--vocoder",
                            "hifigan", "--vocoder-weights", out], check=True,
                           stdout=subprocess.DEVNULL)
            got = read_wav(wav)
        self.assertEqual(got.shape, expected.shape)
        self.assertEqual(got.size, 12 * 256)
        # 16-bit output: half a quantisation step plus float slack.
        np.testing.assert_allclose(got, expected, atol=1.0 / 32768 + 1e-4)
        self.assertGreater(np.abs(expected).max(), 1e-3)


if __name__ == "__main__":
    unittest.main()
