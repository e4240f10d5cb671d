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

#ifndef SKETCHVOICE_MODEL_H_
#define SKETCHVOICE_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sketchvoice/acoustic.h"
#include "sketchvoice/archive.h"
#include "sketchvoice/model_config.h"
#include "sketchvoice/prosody.h"
#include "sketchvoice/sketch2contour.h"
#include "sketchvoice/text_frontend.h"

namespace sketchvoice {

// All trainable parts plus the statistics needed at inference. A checkpoint
// is one archive holding this whole bundle.
class Model {
 public:
  static constexpr int kCheckpointVersion = 1;

  explicit Model(const ModelConfig& config, std::uint64_t seed = 0);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }

  // Everything trained in the second stage: all modules but the VAE.
  std::vector<nn::Tensor> ldm_parameters() const;

  Archive to_archive() const;
  // Throws IoError on a version or shape mismatch.
  static std::unique_ptr<Model> from_archive(const Archive& archive);
  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<Model> load(const std::filesystem::path& path);

  // "vae" after the first stage, "ldm" once the full model is trained.
  std::string stage = "init";
  MelStats mel_stats;
  StatsPair contour_stats;
  // Latents are multiplied by this before diffusion.
  double latent_scale = 1.0;
  std::string vae_hash;

 private:
  ModelConfig config_;
  nn::Rng init_rng_;

 public:
  Vae vae;
  TextEncoder text;
  DurationPredictor duration;
  SketchToContour predictor;
  ProsodyEmbedder embedder;
  Denoiser denoiser;
  DiffusionSchedule schedule;
};

}  // namespace sketchvoice

#endif  // SKETCHVOICE_MODEL_H_
