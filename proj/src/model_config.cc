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

#include "sketchvoice/model_config.h"

#include "sketchvoice/errors.h"

namespace sketchvoice {

ModelConfig ModelConfig::paper() { return ModelConfig{}; }

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.text_dim = 64;
  c.text_filter = 128;
  c.text_kernel = 3;
  c.duration_filter = 64;
  c.predictor_filter = 128;
  c.vae_channels = 16;
  c.unet_channels = 32;
  c.unet_time_dim = 64;
  c.unet_groups = 8;
  return c;
}

void ModelConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("model config: " + what);
  };
  check(text_dim > 0 && text_dim % text_heads == 0, "text_dim must divide by text_heads");
  check(mel_bins() % predictor_heads == 0, "mel_bins must divide by predictor_heads");
  check(text_kernel % 2 == 1 && duration_kernel % 2 == 1 && predictor_kernel % 2 == 1,
        "kernels must be odd");
  check(compression == 4, "compression rate must be 4 (two stride-2 stages)");
  check(mel_bins() % compression == 0, "mel_bins must divide by compression");
  check(latent_channels > 0, "latent_channels must be positive");
  check(unet_channels % unet_groups == 0 && (2 * unet_channels) % unet_groups == 0,
        "unet_channels must divide by unet_groups");
  check(vae_channels % 4 == 0, "vae_channels must divide by 4");
  check(diffusion_steps >= 1 && sampling_steps >= 1 && sampling_steps <= diffusion_steps,
        "sampling_steps must be in [1, diffusion_steps]");
  check(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end, "bad beta range");
  check(prediction == "epsilon" || prediction == "v", "prediction must be epsilon or v");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"sample_rate", frames.sample_rate},
          {"window_size", frames.window_size},
          {"hop_size", frames.hop_size},
          {"fft_size", frames.fft_size},
          {"mel_bins", frames.mel_bins},
          {"mel_fmin", frames.mel_fmin},
          {"mel_fmax", frames.mel_fmax},
          {"text_dim", text_dim},
          {"text_layers", text_layers},
          {"text_heads", text_heads},
          {"text_filter", text_filter},
          {"text_kernel", text_kernel},
          {"duration_filter", duration_filter},
          {"duration_kernel", duration_kernel},
          {"predictor_layers", predictor_layers},
          {"predictor_heads", predictor_heads},
          {"predictor_filter", predictor_filter},
          {"predictor_kernel", predictor_kernel},
          {"latent_channels", latent_channels},
          {"compression", compression},
          {"vae_channels", vae_channels},
          {"unet_channels", unet_channels},
          {"unet_time_dim", unet_time_dim},
          {"unet_groups", unet_groups},
          {"diffusion_steps", diffusion_steps},
          {"beta_start", beta_start},
          {"beta_end", beta_end},
          {"sampling_steps", sampling_steps},
          {"prediction", prediction}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    get("sample_rate", c.frames.sample_rate);
    get("window_size", c.frames.window_size);
    get("hop_size", c.frames.hop_size);
    get("fft_size", c.frames.fft_size);
    get("mel_bins", c.frames.mel_bins);
    get("mel_fmin", c.frames.mel_fmin);
    get("mel_fmax", c.frames.mel_fmax);
    get("text_dim", c.text_dim);
    get("text_layers", c.text_layers);
    get("text_heads", c.text_heads);
    get("text_filter", c.text_filter);
    get("text_kernel", c.text_kernel);
    get("duration_filter", c.duration_filter);
    get("duration_kernel", c.duration_kernel);
    get("predictor_layers", c.predictor_layers);
    get("predictor_heads", c.predictor_heads);
    get("predictor_filter", c.predictor_filter);
    get("predictor_kernel", c.predictor_kernel);
    get("latent_channels", c.latent_channels);
    get("compression", c.compression);
    get("vae_channels", c.vae_channels);
    get("unet_channels", c.unet_channels);
    get("unet_time_dim", c.unet_time_dim);
    get("unet_groups", c.unet_groups);
    get("diffusion_steps", c.diffusion_steps);
    get("beta_start", c.beta_start);
    get("beta_end", c.beta_end);
    get("sampling_steps", c.sampling_steps);
    get("prediction", c.prediction);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace sketchvoice
