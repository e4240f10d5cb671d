// Copyright 2026 The Sketchvoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SKETCHVOICE_VOCODER_H_
#define SKETCHVOICE_VOCODER_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/archive.h"
#include "sketchvoice/audio.h"

namespace sketchvoice {

enum class VocoderKind { kNeural, kPhaseReconstruction };

std::string to_string(VocoderKind kind);
// Accepts "hifigan"/"neural" and "griffin-lim"/"phase".
VocoderKind vocoder_kind_from_string(const std::string& name);

// Mel-to-waveform backend. Implementations are immutable after
// construction and safe to call from several threads.
class Vocoder {
 public:
  virtual ~Vocoder() = default;
  virtual VocoderKind kind() const = 0;
  virtual const FrameConfig& frame_config() const = 0;

  // mel is T x mel_bins log-mel. Returns T * hop samples in [-1, 1].
  // Throws ConfigError when `expected` differs from the backend's frames.
  std::vector<float> synthesize(const Matrix& mel, const FrameConfig& expected) const;

 protected:
  virtual std::vector<float> run(const Matrix& mel) const = 0;
};

class GriffinLimVocoder : public Vocoder {
 public:
  explicit GriffinLimVocoder(const FrameConfig& config, int iterations = 32,
                             std::uint64_t seed = 0x5eed);

  VocoderKind kind() const override { return VocoderKind::kPhaseReconstruction; }
  const FrameConfig& frame_config() const override { return stft_.config(); }

  // Linear magnitude from log-mel via the filterbank pseudo-inverse.
  Matrix mel_to_magnitude(const Matrix& mel) const;

 protected:
  std::vector<float> run(const Matrix& mel) const override;

 private:
  Stft stft_;
  Matrix inverse_basis_;  // bins x mel_bins
  int iterations_;
  std::uint64_t seed_;
};

struct HifiGanConfig {
  FrameConfig frames;
  std::vector<int> upsample_rates = {8, 8, 2, 2};
  std::vector<int> upsample_kernel_sizes = {16, 16, 4, 4};
  int upsample_initial_channel = 512;
  std::vector<int> resblock_kernel_sizes = {3, 7, 11};
  std::vector<std::vector<int>> resblock_dilation_sizes = {{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};

  nlohmann::json to_json() const;
  static HifiGanConfig from_json(const nlohmann::json& j);
  // Throws ConfigError unless the upsampling product equals the hop size.
  void validate() const;
};

// Generator of the HiFi-GAN family (residual block type 1) with weight
// normalisation folded in. Weights come from an archive written by
// tools/convert_hifigan.py, tensor names following the original generator.
class HifiGanVocoder : public Vocoder {
 public:
  HifiGanVocoder(const HifiGanConfig& config, Archive weights);
  static std::unique_ptr<HifiGanVocoder> load(const std::filesystem::path& path);

  VocoderKind kind() const override { return VocoderKind::kNeural; }
  const FrameConfig& frame_config() const override { return config_.frames; }

 protected:
  std::vector<float> run(const Matrix& mel) const override;

 private:
  HifiGanConfig config_;
  Archive weights_;
};

// Neural weights come from `weights` or $SKETCHVOICE_HIFIGAN. A missing file
// raises IoError telling the caller to use the griffin-lim backend.
std::unique_ptr<Vocoder> make_vocoder(VocoderKind kind, const FrameConfig& frames,
                                      const std::filesystem::path& weights = {});

}  // namespace sketchvoice

#endif  // SKETCHVOICE_VOCODER_H_
