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

#ifndef SKETCHVOICE_ACOUSTIC_H_
#define SKETCHVOICE_ACOUSTIC_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/audio.h"
#include "sketchvoice/model_config.h"
#include "sketchvoice/nn/module.h"
#include "sketchvoice/prosody.h"
#include "sketchvoice/sketch2contour.h"
#include "sketchvoice/text_frontend.h"

namespace sketchvoice {

// Global log-mel normalisation applied before the VAE.
struct MelStats {
  double mean = 0.0;
  double std = 1.0;

  nlohmann::json to_json() const;
  static MelStats from_json(const nlohmann::json& j);
};

// Rows added so the frame count divides the compression rate.
int padded_frames(int frames, int compression);

// [1, T_pad, F] image of the normalised mel, padded with the mel minimum.
nn::Tensor mel_to_image(const Matrix& mel, const MelStats& stats, int compression);
// Inverse of mel_to_image, cropped to `frames` rows.
Matrix image_to_mel(const nn::Tensor& image, const MelStats& stats, int frames);

struct Posterior {
  nn::Tensor mean;    // [C, T_pad / r, F / r]
  nn::Tensor logvar;
};

// Convolutional VAE compressing [1, T, F] by r = 4 in both axes.
class Vae : public nn::Module {
 public:
  Vae(const ModelConfig& config, nn::Rng& rng);

  // Throws NumericalError on non-finite input, InvalidArgument when the
  // spatial size does not divide the compression rate.
  Posterior encode(const nn::Tensor& image) const;
  // Throws InvalidArgument on a channel mismatch.
  nn::Tensor decode(const nn::Tensor& latent) const;

  int latent_channels() const { return channels_; }

 private:
  int channels_;
  nn::Conv2d enc_in_, enc_down1_, enc_mid_, enc_down2_, enc_res_, enc_out_;
  nn::Conv2d dec_in_, dec_res_, dec_up1_, dec_mid_, dec_up2_, dec_out_;
};

// Reparameterised draw mean + exp(logvar / 2) * eps.
nn::Tensor sample_posterior(const Posterior& posterior, nn::Rng& rng);

// Normalised-space bounds of the two contour quantisers.
struct QuantRanges {
  double pitch_low = -3.0, pitch_high = 3.0;
  double energy_low = -3.0, energy_high = 3.0;

  // Training-set extremes in normalised units, widened by `margin` of the
  // span on each side.
  static QuantRanges from_stats(const StatsPair& stats, double margin = 0.1);
  nlohmann::json to_json() const;
  static QuantRanges from_json(const nlohmann::json& j);
};

// Quantise-and-embed tables for contours and sketches. Contours are
// quantised over QuantRanges, sketches over [0, 1]. Tables start from a
// smooth sinusoidal code of the bin value, so neighbouring bins begin close.
class ProsodyEmbedder : public nn::Module {
 public:
  ProsodyEmbedder(const ModelConfig& config, nn::Rng& rng);

  const QuantRanges& ranges() const { return ranges_; }
  void set_ranges(const QuantRanges& ranges) { ranges_ = ranges; }

  nn::Tensor embed_pitch(std::span<const double> normalized) const;
  nn::Tensor embed_energy(std::span<const double> normalized) const;
  nn::Tensor embed_pitch_sketch(const ProsodySketch& sketch) const;
  nn::Tensor embed_energy_sketch(const ProsodySketch& sketch) const;

 private:
  QuantRanges ranges_;
  nn::Embedding pitch_, energy_, pitch_sketch_, energy_sketch_;
};

// Row b of the initial table: sin / cos of pi * k * b / (levels - 1) for
// k = 0.5, 1, 1.5, ...
std::vector<float> value_code_table(int levels, int dim);

// Frame-rate conditions, each [T, F].
struct ConditionBundle {
  nn::Tensor text_frame;
  nn::Tensor pitch_sketch_frame;
  nn::Tensor energy_sketch_frame;

  int frames() const { return text_frame.dim(0); }
};

// text_frame = LR(text + pitch + energy); sketch embeddings expanded
// separately. All inputs are [M, F].
ConditionBundle assemble_conditions(const nn::Tensor& text_projected,
                                    const nn::Tensor& pitch_embedding,
                                    const nn::Tensor& energy_embedding,
                                    const nn::Tensor& pitch_sketch_embedding,
                                    const nn::Tensor& energy_sketch_embedding,
                                    const DurationAlignment& durations);

// Each T x F map zero-padded to the latent grid and averaged over r x r
// cells, one channel per map: [3, T_pad / r, F / r].
nn::Tensor condition_channels(const ConditionBundle& bundle, int compression);

// Concatenates z_n [C, h, w] with the condition channels [3, h, w].
nn::Tensor build_denoiser_input(const nn::Tensor& latent,
                                const nn::Tensor& conditions);
nn::Tensor build_denoiser_input(const nn::Tensor& latent,
                                const ConditionBundle& bundle, int compression);

// Noise predictor over the latent grid: a two-level U-Net with GroupNorm
// residual blocks and a sinusoidal timestep embedding.
class Denoiser : public nn::Module {
 public:
  Denoiser(const ModelConfig& config, nn::Rng& rng);

  // input [C + 3, h, w] -> predicted noise [C, h, w].
  nn::Tensor forward(const nn::Tensor& input, int timestep) const;

 private:
  class ResBlock : public nn::Module {
   public:
    ResBlock(int in, int out, int time_dim, int groups, nn::Rng& rng);
    nn::Tensor forward(const nn::Tensor& x, const nn::Tensor& time) const;

   private:
    nn::GroupNorm norm1_, norm2_;
    nn::Conv2d conv1_, conv2_;
    nn::Linear time_;
    std::unique_ptr<nn::Conv2d> skip_;
  };

  int in_channels_, out_channels_, time_dim_;
  nn::Linear time1_, time2_;
  nn::Conv2d conv_in_;
  ResBlock down_a_, down_b_;
  nn::Conv2d downsample_;
  ResBlock mid_a_, mid_b_;
  nn::Conv2d upsample_;
  ResBlock up_a_, up_b_;
  nn::GroupNorm norm_out_;
  nn::Conv2d conv_out_;
};

class DiffusionSchedule {
 public:
  DiffusionSchedule(int steps, double beta_start, double beta_end);
  static DiffusionSchedule from_config(const ModelConfig& config);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha_bar(int t) const;  // cumulative product up to and including t

  // Evenly spaced training timesteps used by a `count`-step sampler,
  // ascending and ending at steps() - 1.
  std::vector<int> sampling_timesteps(int count) const;

  nlohmann::json to_json() const;

 private:
  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

// z_t = sqrt(abar) z_0 + sqrt(1 - abar) eps.
nn::Tensor diffuse(const nn::Tensor& z0, const nn::Tensor& noise,
                   const DiffusionSchedule& schedule, int timestep);

enum class SamplerKind { kDeterministic, kAncestral };
SamplerKind sampler_kind_from_string(const std::string& name);

using NoisePredictor = std::function<nn::Tensor(const nn::Tensor& z, int timestep)>;

// One reverse update from training timestep `t` to `t_prev` (-1 for the
// final step). The deterministic sampler moves along the predicted noise;
// the ancestral sampler adds fresh noise drawn from `rng`. Throws
// InvalidArgument when t is outside the schedule or t_prev >= t.
nn::Tensor ldm_step(const nn::Tensor& z, int t, int t_prev,
                    const NoisePredictor& predict, const DiffusionSchedule& schedule,
                    SamplerKind kind, nn::Rng* rng);

// Draws z_N from N(0, I) with `rng` and iterates ldm_step over `steps`
// evenly spaced timesteps.
nn::Tensor sample_latent(const nn::Shape& shape, int steps, const NoisePredictor& predict,
                         const DiffusionSchedule& schedule, SamplerKind kind, nn::Rng& rng);

enum class Prediction { kEpsilon, kVelocity };
Prediction prediction_from_string(const std::string& name);

// Regression target for the denoiser at step t: the noise itself, or
// v = sqrt(ab) * noise - sqrt(1 - ab) * z0.
nn::Tensor prediction_target(const nn::Tensor& z0, const nn::Tensor& noise,
                             const DiffusionSchedule& schedule, int timestep,
                             Prediction prediction);
// Noise estimate implied by a denoiser output at z_t.
nn::Tensor noise_from_prediction(const nn::Tensor& output, const nn::Tensor& zt,
                                 const DiffusionSchedule& schedule, int timestep,
                                 Prediction prediction);

// Binds a denoiser and fixed condition channels; returns noise estimates.
NoisePredictor conditioned_predictor(const Denoiser& denoiser, const nn::Tensor& conditions,
                                     const DiffusionSchedule& schedule,
                                     Prediction prediction);

nn::Tensor gaussian_noise(const nn::Shape& shape, nn::Rng& rng);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_ACOUSTIC_H_
