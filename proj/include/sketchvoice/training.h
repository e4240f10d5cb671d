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

#ifndef SKETCHVOICE_TRAINING_H_
#define SKETCHVOICE_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/dataset.h"
#include "sketchvoice/model.h"

namespace sketchvoice {

enum class TrainStage { kVae, kLdm };

struct TrainConfig {
  static constexpr int kVersion = 1;

  TrainStage stage = TrainStage::kVae;
  int steps = 2000;
  int batch_size = 4;
  double learning_rate = 1e-4;
  int warmup_steps = 1000;
  double min_learning_rate = 1e-6;
  std::string optimizer = "adam";  // adam | adamw
  double weight_decay = 0.0;
  double sketch_dropout_p = 0.2;
  std::uint64_t seed = 0;
  int checkpoint_every = 500;
  int log_every = 100;
  double grad_clip = 1.0;
  // VAE stage.
  double kl_weight = 1e-4;
  int crop_frames = 64;
  // LDM stage auxiliary weights.
  double duration_weight = 1.0;
  double contour_weight = 1.0;

  static TrainConfig for_stage(TrainStage stage);
  // Reduced schedule for the micro corpus on one CPU core.
  static TrainConfig desk(TrainStage stage);

  // Throws ConfigError naming the bad key.
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  // Override one key from a command-line string.
  void set(const std::string& key, const std::string& value);
};

std::string to_string(TrainStage stage);
TrainStage train_stage_from_string(const std::string& name);

struct StepLosses {
  double total = 0.0;
  // VAE stage.
  double reconstruction = 0.0;
  double kl = 0.0;
  // LDM stage.
  double diffusion = 0.0;
  double duration = 0.0;
  double contour = 0.0;
};

struct TrainResult {
  int first_step = 0;  // > 0 when resumed
  std::vector<StepLosses> losses;  // one per step run
  int samples = 0;
  int samples_with_both_sketches = 0;
  int samples_with_pitch_dropped = 0;
  int samples_with_energy_dropped = 0;
  std::string vae_hash_before;
  std::string vae_hash_after;
};

using ProgressFn = std::function<void(int step, const StepLosses&)>;

struct TrainOptions {
  std::filesystem::path checkpoint;   // written every checkpoint_every and at the end
  std::filesystem::path resume_from;  // optional
  // Stage 2 only: the trained VAE checkpoint.
  std::filesystem::path vae_checkpoint;
  ModelConfig model_config = ModelConfig::desk();
  ProgressFn progress;
};

// Stage 1. Fits the VAE on random crops of the train split.
TrainResult train_vae(const FeatureCache& cache, const TrainConfig& config,
                      const TrainOptions& options);

// Stage 2. Loads the VAE from options.vae_checkpoint (or resume_from), keeps
// it frozen and trains every other module.
TrainResult train_ldm(const FeatureCache& cache, const TrainConfig& config,
                      const TrainOptions& options);

// Per-step random source derived from (seed, step) only.
nn::Rng step_rng(std::uint64_t seed, std::int64_t step);

// Mean and standard deviation of every log-mel value in the train split.
MelStats compute_mel_stats(const std::vector<const CacheRecord*>& records);

struct VaeMetrics {
  double l1 = 0.0;           // mean absolute error in log-mel units
  double correlation = 0.0;  // mean per-clip Pearson correlation
};

// Encodes with the posterior mean and decodes full clips.
VaeMetrics evaluate_vae(const Model& model, const std::vector<const CacheRecord*>& records);

// Mean-path latent of a full mel, unscaled: [C, T_pad / r, F / r].
nn::Tensor encode_mel(const Model& model, const Matrix& mel);
Matrix decode_latent(const Model& model, const nn::Tensor& latent, int frames);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_TRAINING_H_
