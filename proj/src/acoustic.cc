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

#include "sketchvoice/acoustic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"

namespace sketchvoice {

using nn::Tensor;

nlohmann::json MelStats::to_json() const { return {{"mean", mean}, {"std", std}}; }

MelStats MelStats::from_json(const nlohmann::json& j) {
  MelStats s{j.at("mean").get<double>(), j.at("std").get<double>()};
  if (!(s.std > 0.0)) throw ConfigError("mel std must be positive");
  return s;
}

int padded_frames(int frames, int compression) {
  return (frames + compression - 1) / compression * compression;
}

Tensor mel_to_image(const Matrix& mel, const MelStats& stats, int compression) {
  if (mel.rows() < 1) throw InvalidArgument("empty mel-spectrogram");
  if (!mel.allFinite()) throw NumericalError("mel-spectrogram has non-finite entries");
  const int frames = static_cast<int>(mel.rows()), bins = static_cast<int>(mel.cols());
  const int padded = padded_frames(frames, compression);
  const float floor_value = mel.minCoeff();
  std::vector<float> v(static_cast<std::size_t>(padded) * bins);
  for (int t = 0; t < padded; ++t) {
    for (int f = 0; f < bins; ++f) {
      const float x = t < frames ? mel(t, f) : floor_value;
      v[static_cast<std::size_t>(t) * bins + f] =
          static_cast<float>((x - stats.mean) / stats.std);
    }
  }
  return Tensor::from({1, padded, bins}, std::move(v));
}

Matrix image_to_mel(const Tensor& image, const MelStats& stats, int frames) {
  if (image.rank() != 3 || image.dim(0) != 1 || image.dim(1) < frames) {
    throw InvalidArgument("image shape " + nn::shape_string(image.shape()) +
                          " cannot hold " + std::to_string(frames) + " frames");
  }
  const int bins = image.dim(2);
  Matrix mel(frames, bins);
  const auto d = image.data();
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      mel(t, f) = static_cast<float>(d[static_cast<std::size_t>(t) * bins + f] * stats.std +
                                     stats.mean);
    }
  }
  return mel;
}

// ---------------------------------------------------------------------------

Vae::Vae(const ModelConfig& config, nn::Rng& rng)
    : channels_(config.latent_channels),
      enc_in_(1, config.vae_channels, 3, 1, 1, rng),
      enc_down1_(config.vae_channels, config.vae_channels, 3, 2, 1, rng),
      enc_mid_(config.vae_channels, 2 * config.vae_channels, 3, 1, 1, rng),
      enc_down2_(2 * config.vae_channels, 2 * config.vae_channels, 3, 2, 1, rng),
      enc_res_(2 * config.vae_channels, 2 * config.vae_channels, 3, 1, 1, rng),
      enc_out_(2 * config.vae_channels, 2 * config.latent_channels, 3, 1, 1, rng),
      dec_in_(config.latent_channels, 2 * config.vae_channels, 3, 1, 1, rng),
      dec_res_(2 * config.vae_channels, 2 * config.vae_channels, 3, 1, 1, rng),
      dec_up1_(2 * config.vae_channels, config.vae_channels, 3, 1, 1, rng),
      dec_mid_(config.vae_channels, config.vae_channels, 3, 1, 1, rng),
      dec_up2_(config.vae_channels, config.vae_channels, 3, 1, 1, rng),
      dec_out_(config.vae_channels, 1, 3, 1, 1, rng) {
  if (config.compression != 4) throw ConfigError("the VAE supports compression 4 only");
  add_module("enc_in", &enc_in_);
  add_module("enc_down1", &enc_down1_);
  add_module("enc_mid", &enc_mid_);
  add_module("enc_down2", &enc_down2_);
  add_module("enc_res", &enc_res_);
  add_module("enc_out", &enc_out_);
  add_module("dec_in", &dec_in_);
  add_module("dec_res", &dec_res_);
  add_module("dec_up1", &dec_up1_);
  add_module("dec_mid", &dec_mid_);
  add_module("dec_up2", &dec_up2_);
  add_module("dec_out", &dec_out_);
}

Posterior Vae::encode(const Tensor& image) const {
  if (image.rank() != 3 || image.dim(0) != 1 || image.dim(1) % 4 != 0 ||
      image.dim(2) % 4 != 0) {
    throw InvalidArgument("VAE input must be [1, T, F] with T and F divisible by 4, got " +
                          nn::shape_string(image.shape()));
  }
  for (float v : image.data()) {
    if (!std::isfinite(v)) throw NumericalError("non-finite VAE input");
  }
  Tensor h = nn::silu(enc_in_.forward(image));
  h = nn::silu(enc_down1_.forward(h));
  h = nn::silu(enc_mid_.forward(h));
  h = nn::silu(enc_down2_.forward(h));
  h = nn::add(h, nn::silu(enc_res_.forward(h)));
  Tensor out = enc_out_.forward(h);
  const int hh = out.dim(1), ww = out.dim(2);
  Tensor flat = nn::reshape(out, {2 * channels_, hh * ww});
  return {nn::reshape(nn::slice_rows(flat, 0, channels_), {channels_, hh, ww}),
          nn::reshape(nn::slice_rows(flat, channels_, 2 * channels_), {channels_, hh, ww})};
}

Tensor Vae::decode(const Tensor& latent) const {
  if (latent.rank() != 3 || latent.dim(0) != channels_) {
    throw InvalidArgument("latent must have " + std::to_string(channels_) +
                          " channels, got shape " + nn::shape_string(latent.shape()));
  }
  Tensor h = nn::silu(dec_in_.forward(latent));
  h = nn::add(h, nn::silu(dec_res_.forward(h)));
  h = nn::silu(dec_up1_.forward(nn::upsample_nearest2x(h)));
  h = nn::silu(dec_mid_.forward(h));
  h = nn::silu(dec_up2_.forward(nn::upsample_nearest2x(h)));
  return dec_out_.forward(h);
}

Tensor gaussian_noise(const nn::Shape& shape, nn::Rng& rng) {
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> v(nn::shape_size(shape));
  for (float& x : v) x = dist(rng);
  return Tensor::from(shape, std::move(v));
}

Tensor sample_posterior(const Posterior& posterior, nn::Rng& rng) {
  const Tensor eps = gaussian_noise(posterior.mean.shape(), rng);
  return nn::add(posterior.mean,
                 nn::mul(nn::exp(nn::scale(posterior.logvar, 0.5f)), eps));
}

// ---------------------------------------------------------------------------

QuantRanges QuantRanges::from_stats(const StatsPair& stats, double margin) {
  auto span = [margin](const ContourStats& s, double* lo, double* hi) {
    s.validate();
    const double a = (s.min - s.mean) / s.std, b = (s.max - s.mean) / s.std;
    const double pad = margin * (b - a);
    *lo = a - pad;
    *hi = b + pad;
  };
  QuantRanges r;
  span(stats.pitch, &r.pitch_low, &r.pitch_high);
  span(stats.energy, &r.energy_low, &r.energy_high);
  return r;
}

nlohmann::json QuantRanges::to_json() const {
  return {{"pitch", {pitch_low, pitch_high}}, {"energy", {energy_low, energy_high}},
          {"sketch", {0.0, 1.0}}, {"levels", kQuantizationLevels}};
}

QuantRanges QuantRanges::from_json(const nlohmann::json& j) {
  QuantRanges r;
  r.pitch_low = j.at("pitch").at(0).get<double>();
  r.pitch_high = j.at("pitch").at(1).get<double>();
  r.energy_low = j.at("energy").at(0).get<double>();
  r.energy_high = j.at("energy").at(1).get<double>();
  if (!(r.pitch_high > r.pitch_low) || !(r.energy_high > r.energy_low)) {
    throw ConfigError("quantisation ranges must be increasing");
  }
  return r;
}

std::vector<float> value_code_table(int levels, int dim) {
  std::vector<float> table(static_cast<std::size_t>(levels) * dim);
  for (int b = 0; b < levels; ++b) {
    const double u = static_cast<double>(b) / (levels - 1);
    for (int d = 0; d < dim; ++d) {
      const double k = 0.5 * (d / 2 + 1);
      const double angle = std::numbers::pi * k * u;
      table[static_cast<std::size_t>(b) * dim + d] =
          static_cast<float>(d % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return table;
}

namespace {

nn::Embedding make_value_embedding(int dim, nn::Rng& rng) {
  std::vector<float> table = value_code_table(kQuantizationLevels, dim);
  // A small perturbation keeps the four tables distinct.
  std::normal_distribution<float> dist(0.0f, 0.1f);
  for (float& v : table) v += dist(rng);
  return nn::Embedding(kQuantizationLevels, dim, std::move(table));
}

}  // namespace

ProsodyEmbedder::ProsodyEmbedder(const ModelConfig& config, nn::Rng& rng)
    : pitch_(make_value_embedding(config.mel_bins(), rng)),
      energy_(make_value_embedding(config.mel_bins(), rng)),
      pitch_sketch_(make_value_embedding(config.mel_bins(), rng)),
      energy_sketch_(make_value_embedding(config.mel_bins(), rng)) {
  add_module("pitch", &pitch_);
  add_module("energy", &energy_);
  add_module("pitch_sketch", &pitch_sketch_);
  add_module("energy_sketch", &energy_sketch_);
}

Tensor ProsodyEmbedder::embed_pitch(std::span<const double> normalized) const {
  return pitch_.forward(quantize(normalized, ranges_.pitch_low, ranges_.pitch_high));
}

Tensor ProsodyEmbedder::embed_energy(std::span<const double> normalized) const {
  return energy_.forward(quantize(normalized, ranges_.energy_low, ranges_.energy_high));
}

Tensor ProsodyEmbedder::embed_pitch_sketch(const ProsodySketch& sketch) const {
  return pitch_sketch_.forward(quantize(sketch.values, 0.0, 1.0));
}

Tensor ProsodyEmbedder::embed_energy_sketch(const ProsodySketch& sketch) const {
  return energy_sketch_.forward(quantize(sketch.values, 0.0, 1.0));
}

// ---------------------------------------------------------------------------

ConditionBundle assemble_conditions(const Tensor& text_projected,
                                    const Tensor& pitch_embedding,
                                    const Tensor& energy_embedding,
                                    const Tensor& pitch_sketch_embedding,
                                    const Tensor& energy_sketch_embedding,
                                    const DurationAlignment& durations) {
  const nn::Shape& shape = text_projected.shape();
  for (const Tensor* t : {&pitch_embedding, &energy_embedding, &pitch_sketch_embedding,
                          &energy_sketch_embedding}) {
    if (t->shape() != shape) {
      throw InvalidArgument("condition part has shape " + nn::shape_string(t->shape()) +
                            ", expected " + nn::shape_string(shape));
    }
  }
  const Tensor text = nn::add(text_projected, nn::add(pitch_embedding, energy_embedding));
  return {length_regulate(text, durations), length_regulate(pitch_sketch_embedding, durations),
          length_regulate(energy_sketch_embedding, durations)};
}

Tensor condition_channels(const ConditionBundle& bundle, int compression) {
  const int frames = bundle.frames();
  const int bins = bundle.text_frame.dim(1);
  if (bundle.pitch_sketch_frame.shape() != bundle.text_frame.shape() ||
      bundle.energy_sketch_frame.shape() != bundle.text_frame.shape()) {
    throw InvalidArgument("condition frames disagree in length");
  }
  if (bins % compression != 0) throw InvalidArgument("feature width not divisible by r");
  const int padded = padded_frames(frames, compression);
  std::vector<Tensor> maps;
  for (const Tensor* t :
       {&bundle.text_frame, &bundle.pitch_sketch_frame, &bundle.energy_sketch_frame}) {
    Tensor m = *t;
    if (padded > frames) m = nn::concat0({m, Tensor::zeros({padded - frames, bins})});
    maps.push_back(nn::reshape(m, {1, padded, bins}));
  }
  return nn::avg_pool2d(nn::concat0(maps), compression);
}

Tensor build_denoiser_input(const Tensor& latent, const Tensor& conditions) {
  if (latent.rank() != 3 || conditions.rank() != 3 || conditions.dim(0) != 3 ||
      latent.dim(1) != conditions.dim(1) || latent.dim(2) != conditions.dim(2)) {
    throw InvalidArgument("latent " + nn::shape_string(latent.shape()) +
                          " and conditions " + nn::shape_string(conditions.shape()) +
                          " do not share a spatial grid");
  }
  return nn::concat0({latent, conditions});
}

Tensor build_denoiser_input(const Tensor& latent, const ConditionBundle& bundle,
                            int compression) {
  return build_denoiser_input(latent, condition_channels(bundle, compression));
}

// ---------------------------------------------------------------------------

Denoiser::ResBlock::ResBlock(int in, int out, int time_dim, int groups, nn::Rng& rng)
    : norm1_(std::min(groups, in), in),
      norm2_(std::min(groups, out), out),
      conv1_(in, out, 3, 1, 1, rng),
      conv2_(out, out, 3, 1, 1, rng),
      time_(time_dim, out, rng) {
  add_module("norm1", &norm1_);
  add_module("conv1", &conv1_);
  add_module("time", &time_);
  add_module("norm2", &norm2_);
  add_module("conv2", &conv2_);
  if (in != out) {
    skip_ = std::make_unique<nn::Conv2d>(in, out, 1, 1, 0, rng);
    add_module("skip", skip_.get());
  }
}

Tensor Denoiser::ResBlock::forward(const Tensor& x, const Tensor& time) const {
  Tensor h = conv1_.forward(nn::silu(norm1_.forward(x)));
  const Tensor t = time_.forward(time);
  h = nn::add_channel_vector(h, nn::reshape(t, {t.dim(1)}));
  h = conv2_.forward(nn::silu(norm2_.forward(h)));
  return nn::add(skip_ ? skip_->forward(x) : x, h);
}

Denoiser::Denoiser(const ModelConfig& config, nn::Rng& rng)
    : in_channels_(config.denoiser_in_channels()),
      out_channels_(config.latent_channels),
      time_dim_(config.unet_time_dim),
      time1_(config.unet_time_dim, config.unet_time_dim, rng),
      time2_(config.unet_time_dim, config.unet_time_dim, rng),
      conv_in_(config.denoiser_in_channels() + 1, config.unet_channels, 3, 1, 1, rng),
      down_a_(config.unet_channels, config.unet_channels, config.unet_time_dim,
              config.unet_groups, rng),
      down_b_(config.unet_channels, config.unet_channels, config.unet_time_dim,
              config.unet_groups, rng),
      downsample_(config.unet_channels, 2 * config.unet_channels, 3, 2, 1, rng),
      mid_a_(2 * config.unet_channels, 2 * config.unet_channels, config.unet_time_dim,
             config.unet_groups, rng),
      mid_b_(2 * config.unet_channels, 2 * config.unet_channels, config.unet_time_dim,
             config.unet_groups, rng),
      upsample_(2 * config.unet_channels, config.unet_channels, 3, 1, 1, rng),
      up_a_(2 * config.unet_channels, config.unet_channels, config.unet_time_dim,
            config.unet_groups, rng),
      up_b_(config.unet_channels, config.unet_channels, config.unet_time_dim,
            config.unet_groups, rng),
      norm_out_(config.unet_groups, config.unet_channels),
      conv_out_(config.unet_channels, config.latent_channels, 3, 1, 1, rng) {
  conv_out_.scale_weights(0.1f);
  add_module("time1", &time1_);
  add_module("time2", &time2_);
  add_module("conv_in", &conv_in_);
  add_module("down_a", &down_a_);
  add_module("down_b", &down_b_);
  add_module("downsample", &downsample_);
  add_module("mid_a", &mid_a_);
  add_module("mid_b", &mid_b_);
  add_module("upsample", &upsample_);
  add_module("up_a", &up_a_);
  add_module("up_b", &up_b_);
  add_module("norm_out", &norm_out_);
  add_module("conv_out", &conv_out_);
}

Tensor Denoiser::forward(const Tensor& input, int timestep) const {
  if (input.rank() != 3 || input.dim(0) != in_channels_) {
    throw InvalidArgument("denoiser expects " + std::to_string(in_channels_) +
                          " input channels, got shape " + nn::shape_string(input.shape()));
  }
  const int height = input.dim(1), width = input.dim(2);
  // Frequency coordinate channel; convolutions alone cannot tell bands apart.
  std::vector<float> coord(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      coord[static_cast<std::size_t>(y) * width + x] =
          width > 1 ? 2.0f * x / (width - 1) - 1.0f : 0.0f;
    }
  }
  const Tensor x = nn::concat0({input, Tensor::from({1, height, width}, std::move(coord))});

  Tensor time = nn::sinusoidal_embedding(static_cast<float>(timestep), time_dim_);
  time = nn::silu(time2_.forward(nn::silu(time1_.forward(time))));

  Tensor h = conv_in_.forward(x);
  h = down_a_.forward(h, time);
  const Tensor skip = down_b_.forward(h, time);
  h = downsample_.forward(skip);
  h = mid_a_.forward(h, time);
  h = mid_b_.forward(h, time);
  h = upsample_.forward(nn::upsample_nearest2x(h));
  h = nn::crop2d(h, height, width);
  h = up_a_.forward(nn::concat0({h, skip}), time);
  h = up_b_.forward(h, time);
  return conv_out_.forward(nn::silu(norm_out_.forward(h)));
}

// ---------------------------------------------------------------------------

DiffusionSchedule::DiffusionSchedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw ConfigError("diffusion needs at least one step");
  if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end)) {
    throw ConfigError("betas must satisfy 0 < start <= end < 1");
  }
  betas_.resize(static_cast<std::size_t>(steps));
  alpha_bars_.resize(betas_.size());
  double prod = 1.0;
  for (int t = 0; t < steps; ++t) {
    betas_[t] = steps == 1 ? beta_start
                           : beta_start + (beta_end - beta_start) * t / (steps - 1);
    prod *= 1.0 - betas_[t];
    alpha_bars_[t] = prod;
  }
}

DiffusionSchedule DiffusionSchedule::from_config(const ModelConfig& config) {
  return DiffusionSchedule(config.diffusion_steps, config.beta_start, config.beta_end);
}

double DiffusionSchedule::beta(int t) const {
  if (t < 0 || t >= steps()) throw InvalidArgument("timestep " + std::to_string(t) + " outside the schedule");
  return betas_[t];
}

double DiffusionSchedule::alpha_bar(int t) const {
  if (t < 0 || t >= steps()) throw InvalidArgument("timestep " + std::to_string(t) + " outside the schedule");
  return alpha_bars_[t];
}

std::vector<int> DiffusionSchedule::sampling_timesteps(int count) const {
  if (count < 1 || count > steps()) {
    throw InvalidArgument("sampling steps must be in [1, " + std::to_string(steps()) + "]");
  }
  std::vector<int> ts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ts[i] = static_cast<int>((static_cast<long long>(i) + 1) * steps() / count) - 1;
  }
  return ts;
}

nlohmann::json DiffusionSchedule::to_json() const {
  return {{"steps", steps()}, {"beta_start", betas_.front()}, {"beta_end", betas_.back()},
          {"kind", "linear"}, {"prediction", "epsilon"}};
}

Tensor diffuse(const Tensor& z0, const Tensor& noise, const DiffusionSchedule& schedule,
               int timestep) {
  const double ab = schedule.alpha_bar(timestep);
  return nn::add(nn::scale(z0, static_cast<float>(std::sqrt(ab))),
                 nn::scale(noise, static_cast<float>(std::sqrt(1.0 - ab))));
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "ddim" || name == "deterministic") return SamplerKind::kDeterministic;
  if (name == "ancestral" || name == "ddpm") return SamplerKind::kAncestral;
  throw InvalidArgument("unknown sampler '" + name + "' (ddim, ancestral)");
}

Tensor ldm_step(const Tensor& z, int t, int t_prev, const NoisePredictor& predict,
                const DiffusionSchedule& schedule, SamplerKind kind, nn::Rng* rng) {
  if (t < 0 || t >= schedule.steps()) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside the schedule");
  }
  if (t_prev >= t || t_prev < -1) throw InvalidArgument("previous timestep must precede t");
  const double ab = schedule.alpha_bar(t);
  const double ab_prev = t_prev >= 0 ? schedule.alpha_bar(t_prev) : 1.0;
  const Tensor eps = predict(z, t);
  if (eps.shape() != z.shape()) throw InvalidArgument("noise prediction has the wrong shape");
  const auto zv = z.data();
  const auto ev = eps.data();
  std::vector<float> out(zv.size());
  double sigma = 0.0;
  if (kind == SamplerKind::kAncestral) {
    if (rng == nullptr) throw InvalidArgument("the ancestral sampler needs a random source");
    sigma = std::sqrt((1.0 - ab_prev) / (1.0 - ab) * (1.0 - ab / ab_prev));
  }
  const double dir = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));
  std::normal_distribution<float> dist(0.0f, 1.0f);
  for (std::size_t i = 0; i < zv.size(); ++i) {
    const double x0 = (zv[i] - std::sqrt(1.0 - ab) * ev[i]) / std::sqrt(ab);
    double v = std::sqrt(ab_prev) * x0 + dir * ev[i];
    if (sigma > 0.0) v += sigma * dist(*rng);
    out[i] = static_cast<float>(v);
  }
  return Tensor::from(z.shape(), std::move(out));
}

Tensor sample_latent(const nn::Shape& shape, int steps, const NoisePredictor& predict,
                     const DiffusionSchedule& schedule, SamplerKind kind, nn::Rng& rng) {
  nn::NoGradGuard guard;
  const std::vector<int> ts = schedule.sampling_timesteps(steps);
  Tensor z = gaussian_noise(shape, rng);
  for (int i = static_cast<int>(ts.size()) - 1; i >= 0; --i) {
    z = ldm_step(z, ts[i], i > 0 ? ts[i - 1] : -1, predict, schedule, kind, &rng);
  }
  return z;
}

Prediction prediction_from_string(const std::string& name) {
  if (name == "epsilon") return Prediction::kEpsilon;
  if (name == "v") return Prediction::kVelocity;
  throw InvalidArgument("unknown prediction '" + name + "' (epsilon, v)");
}

Tensor prediction_target(const Tensor& z0, const Tensor& noise, const DiffusionSchedule& schedule,
                         int timestep, Prediction prediction) {
  if (prediction == Prediction::kEpsilon) return noise;
  const double ab = schedule.alpha_bar(timestep);
  return nn::sub(nn::scale(noise, static_cast<float>(std::sqrt(ab))),
                 nn::scale(z0, static_cast<float>(std::sqrt(1.0 - ab))));
}

Tensor noise_from_prediction(const Tensor& output, const Tensor& zt,
                             const DiffusionSchedule& schedule, int timestep,
                             Prediction prediction) {
  if (prediction == Prediction::kEpsilon) return output;
  // eps = sqrt(ab) * v + sqrt(1 - ab) * z_t
  const double ab = schedule.alpha_bar(timestep);
  return nn::add(nn::scale(output, static_cast<float>(std::sqrt(ab))),
                 nn::scale(zt, static_cast<float>(std::sqrt(1.0 - ab))));
}

NoisePredictor conditioned_predictor(const Denoiser& denoiser, const Tensor& conditions,
                                     const DiffusionSchedule& schedule, Prediction prediction) {
  return [&denoiser, &schedule, conditions, prediction](const Tensor& z, int t) {
    return noise_from_prediction(denoiser.forward(build_denoiser_input(z, conditions), t), z,
                                 schedule, t, prediction);
  };
}

}  // namespace sketchvoice
