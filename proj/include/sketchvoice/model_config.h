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

#ifndef SKETCHVOICE_MODEL_CONFIG_H_
#define SKETCHVOICE_MODEL_CONFIG_H_

#include <string>

#include "json.hpp"
#include "sketchvoice/audio.h"

namespace sketchvoice {

// Every architectural size of the acoustic stack. `paper()` is the
// full-size configuration; `desk()` shrinks widths so the micro corpus
// trains on one CPU core.
struct ModelConfig {
  FrameConfig frames;

  int text_dim = 256;        // phoneme embedding width D
  int text_layers = 6;
  int text_heads = 2;
  int text_filter = 1024;
  int text_kernel = 9;

  int duration_filter = 256;
  int duration_kernel = 3;

  int predictor_layers = 2;
  int predictor_heads = 2;
  int predictor_filter = 256;
  int predictor_kernel = 3;

  int latent_channels = 8;   // C
  int compression = 4;       // r, also the VAE down-sampling factor
  int vae_channels = 64;

  int unet_channels = 64;
  int unet_time_dim = 128;
  int unet_groups = 8;

  int diffusion_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  int sampling_steps = 50;
  // What the denoiser outputs: "epsilon" or "v" (velocity). The sampler
  // always works on the implied noise estimate.
  std::string prediction = "v";

  static ModelConfig paper();
  static ModelConfig desk();

  int mel_bins() const { return frames.mel_bins; }
  // Channels of the denoiser input: latent plus three condition maps.
  int denoiser_in_channels() const { return latent_channels + 3; }

  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

}  // namespace sketchvoice

#endif  // SKETCHVOICE_MODEL_CONFIG_H_
