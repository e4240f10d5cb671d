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

#include "sketchvoice/training.h"

#include <cmath>
#include <optional>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"
#include "sketchvoice/nn/optim.h"

namespace sketchvoice {

using nn::Tensor;

std::string to_string(TrainStage stage) { return stage == TrainStage::kVae ? "vae" : "ldm"; }

TrainStage train_stage_from_string(const std::string& name) {
  if (name == "vae") return TrainStage::kVae;
  if (name == "ldm") return TrainStage::kLdm;
  throw ConfigError("unknown stage '" + name + "'");
}

TrainConfig TrainConfig::for_stage(TrainStage stage) {
  TrainConfig c;
  c.stage = stage;
  if (stage == TrainStage::kLdm) {
    c.optimizer = "adamw";
    c.weight_decay = 1e-2;
  }
  return c;
}

TrainConfig TrainConfig::desk(TrainStage stage) {
  TrainConfig c = for_stage(stage);
  c.steps = stage == TrainStage::kVae ? 2000 : 5000;
  c.batch_size = 4;
  c.warmup_steps = 100;
  c.learning_rate = stage == TrainStage::kVae ? 2e-3 : 1e-3;
  c.min_learning_rate = c.learning_rate * 0.05;
  return c;
}

void TrainConfig::validate() const {
  auto check = [](bool ok, const std::string& key, const std::string& rule) {
    if (!ok) throw ConfigError(key + ": " + rule);
  };
  check(steps >= 1, "steps", "must be >= 1");
  check(batch_size >= 1, "batch_size", "must be >= 1");
  check(learning_rate > 0.0, "learning_rate", "must be > 0");
  check(min_learning_rate >= 0.0 && min_learning_rate <= learning_rate, "min_learning_rate",
        "must be in [0, learning_rate]");
  check(warmup_steps >= 0, "warmup_steps", "must be >= 0");
  check(optimizer == "adam" || optimizer == "adamw", "optimizer", "must be adam or adamw");
  check(weight_decay >= 0.0, "weight_decay", "must be >= 0");
  check(sketch_dropout_p >= 0.0 && sketch_dropout_p <= 1.0, "sketch_dropout_p",
        "must be in [0, 1]");
  check(checkpoint_every >= 1, "checkpoint_every", "must be >= 1");
  check(log_every >= 1, "log_every", "must be >= 1");
  check(grad_clip >= 0.0, "grad_clip", "must be >= 0 (0 disables)");
  check(kl_weight >= 0.0, "kl_weight", "must be >= 0");
  check(crop_frames >= 4 && crop_frames % 4 == 0, "crop_frames",
        "must be a positive multiple of 4");
  check(duration_weight >= 0.0 && contour_weight >= 0.0, "aux weights", "must be >= 0");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"version", kVersion},
          {"stage", to_string(stage)},
          {"steps", steps},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"warmup_steps", warmup_steps},
          {"min_learning_rate", min_learning_rate},
          {"optimizer", optimizer},
          {"weight_decay", weight_decay},
          {"sketch_dropout_p", sketch_dropout_p},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"log_every", log_every},
          {"grad_clip", grad_clip},
          {"kl_weight", kl_weight},
          {"crop_frames", crop_frames},
          {"duration_weight", duration_weight},
          {"contour_weight", contour_weight}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  if (j.contains("version") && j.at("version").get<int>() != kVersion) {
    throw ConfigError("unsupported train config version " + j.at("version").dump());
  }
  TrainConfig c = j.contains("stage")
                      ? desk(train_stage_from_string(j.at("stage").get<std::string>()))
                      : desk(TrainStage::kVae);
  for (const auto& [key, value] : j.items()) {
    if (key == "version" || key == "stage") continue;
    c.set(key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  c.validate();
  return c;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    auto as_int = [&] {
      const long long v = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    };
    auto as_double = [&] {
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    };
    if (key == "stage") stage = train_stage_from_string(value);
    else if (key == "steps") steps = static_cast<int>(as_int());
    else if (key == "batch_size") batch_size = static_cast<int>(as_int());
    else if (key == "learning_rate") learning_rate = as_double();
    else if (key == "warmup_steps") warmup_steps = static_cast<int>(as_int());
    else if (key == "min_learning_rate") min_learning_rate = as_double();
    else if (key == "optimizer") optimizer = value;
    else if (key == "weight_decay") weight_decay = as_double();
    else if (key == "sketch_dropout_p") sketch_dropout_p = as_double();
    else if (key == "seed") seed = static_cast<std::uint64_t>(as_int());
    else if (key == "checkpoint_every") checkpoint_every = static_cast<int>(as_int());
    else if (key == "log_every") log_every = static_cast<int>(as_int());
    else if (key == "grad_clip") grad_clip = as_double();
    else if (key == "kl_weight") kl_weight = as_double();
    else if (key == "crop_frames") crop_frames = static_cast<int>(as_int());
    else if (key == "duration_weight") duration_weight = as_double();
    else if (key == "contour_weight") contour_weight = as_double();
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const std::logic_error&) {
    throw ConfigError(key + ": cannot parse '" + value + "'");
  }
}

// ---------------------------------------------------------------------------

nn::Rng step_rng(std::uint64_t seed, std::int64_t step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
  return nn::Rng(seq);
}

MelStats compute_mel_stats(const std::vector<const CacheRecord*>& records) {
  double acc = 0.0, acc2 = 0.0;
  std::size_t n = 0;
  for (const CacheRecord* r : records) {
    for (Eigen::Index i = 0; i < r->mel.size(); ++i) {
      const double v = r->mel.data()[i];
      acc += v;
      acc2 += v * v;
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("no mel frames for statistics");
  MelStats s;
  s.mean = acc / n;
  s.std = std::sqrt(std::max(1e-12, acc2 / n - s.mean * s.mean));
  return s;
}

Tensor encode_mel(const Model& model, const Matrix& mel) {
  nn::NoGradGuard guard;
  const int r = model.config().compression;
  return model.vae.encode(mel_to_image(mel, model.mel_stats, r)).mean;
}

Matrix decode_latent(const Model& model, const Tensor& latent, int frames) {
  nn::NoGradGuard guard;
  return image_to_mel(model.vae.decode(latent), model.mel_stats, frames);
}

VaeMetrics evaluate_vae(const Model& model, const std::vector<const CacheRecord*>& records) {
  VaeMetrics m;
  if (records.empty()) return m;
  for (const CacheRecord* r : records) {
    const Matrix rec = decode_latent(model, encode_mel(model, r->mel), static_cast<int>(r->mel.rows()));
    m.l1 += (rec - r->mel).cwiseAbs().mean();
    m.correlation += matrix_correlation(rec, r->mel);
  }
  m.l1 /= records.size();
  m.correlation /= records.size();
  return m;
}

namespace {

void require_finite(double value, const char* what, int step) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("non-finite ") + what + " loss at step " +
                         std::to_string(step) + "; lower the learning rate or check the data");
  }
}

nn::Adam make_optimizer(const std::vector<Tensor>& params, const TrainConfig& config) {
  nn::AdamOptions o;
  o.weight_decay = static_cast<float>(config.weight_decay);
  o.decoupled = config.optimizer == "adamw";
  return nn::Adam(params, o);
}

void write_checkpoint(const Model& model, const nn::Adam& optimizer, const TrainConfig& config,
                      int step, const std::filesystem::path& path) {
  if (path.empty()) return;
  Archive a = model.to_archive();
  const std::vector<float> state = optimizer.state();
  a.put("optimizer.state", {static_cast<int>(state.size())}, state);
  a.meta()["training"] = {{"stage", to_string(config.stage)},
                          {"step", step},
                          {"optimizer_step", optimizer.steps_taken()},
                          {"config", config.to_json()}};
  a.write(path);
}

// Loads model and, when the archive was written by the same stage, the
// optimizer state and step to continue from.
std::unique_ptr<Model> resume(const std::filesystem::path& path, TrainStage stage,
                              nn::Adam** optimizer_out, std::optional<nn::Adam>& optimizer,
                              const TrainConfig& config, int* step) {
  const Archive a = Archive::read(path);
  auto model = Model::from_archive(a);
  *step = 0;
  if (a.meta().contains("training") &&
      a.meta().at("training").at("stage").get<std::string>() == to_string(stage)) {
    *step = a.meta().at("training").at("step").get<int>();
    const auto params = stage == TrainStage::kVae ? model->vae.parameters()
                                                  : model->ldm_parameters();
    optimizer.emplace(make_optimizer(params, config));
    optimizer->load_state(a.get("optimizer.state").values(),
                          a.meta().at("training").at("optimizer_step").get<std::int64_t>());
    *optimizer_out = &*optimizer;
  }
  return model;
}

double apply_update(nn::Adam& optimizer, std::vector<Tensor>& params, const TrainConfig& config,
                    int step) {
  if (config.grad_clip > 0.0) nn::clip_grad_norm(params, static_cast<float>(config.grad_clip));
  const float lr = nn::warmup_cosine_lr(step, config.warmup_steps, config.steps,
                                        static_cast<float>(config.learning_rate),
                                        static_cast<float>(config.min_learning_rate));
  optimizer.step(lr);
  return lr;
}

}  // namespace

TrainResult train_vae(const FeatureCache& cache, const TrainConfig& config,
                      const TrainOptions& options) {
  config.validate();
  if (config.stage != TrainStage::kVae) throw ConfigError("stage: train_vae needs stage=vae");
  const auto train = cache.split("train");
  if (train.empty()) throw ConfigError("the cache has no train split");

  std::unique_ptr<Model> model;
  std::optional<nn::Adam> optimizer_storage;
  nn::Adam* optimizer = nullptr;
  int start = 0;
  if (!options.resume_from.empty()) {
    model = resume(options.resume_from, TrainStage::kVae, &optimizer, optimizer_storage, config,
                   &start);
  } else {
    if (!(options.model_config.frames == cache.frames)) {
      throw ConfigError("cache frame configuration differs from the model");
    }
    model = std::make_unique<Model>(options.model_config, config.seed);
    model->mel_stats = compute_mel_stats(train);
    model->contour_stats = cache.stats;
    model->embedder.set_ranges(QuantRanges::from_stats(cache.stats));
  }
  std::vector<Tensor> params = model->vae.parameters();
  if (!optimizer) {
    optimizer_storage.emplace(make_optimizer(params, config));
    optimizer = &*optimizer_storage;
  }
  model->stage = "vae";

  const int r = model->config().compression;
  TrainResult result;
  result.first_step = start;
  for (int step = start; step < config.steps; ++step) {
    nn::Rng rng = step_rng(config.seed, step);
    std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
    Tensor total;
    double recon_sum = 0.0, kl_sum = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      const CacheRecord& rec = *train[pick(rng)];
      const int frames = static_cast<int>(rec.mel.rows());
      Matrix crop = rec.mel;
      if (frames > config.crop_frames) {
        std::uniform_int_distribution<int> start_at(0, frames - config.crop_frames);
        crop = rec.mel.middleRows(start_at(rng), config.crop_frames);
      }
      const Tensor image = mel_to_image(crop, model->mel_stats, r);
      const Posterior post = model->vae.encode(image);
      const Tensor z = sample_posterior(post, rng);
      const Tensor recon = nn::l1_loss(model->vae.decode(z), image);
      Tensor loss = recon;
      const Tensor kl = nn::gaussian_kl(post.mean, post.logvar);
      if (config.kl_weight > 0.0) {
        loss = nn::add(loss, nn::scale(kl, static_cast<float>(config.kl_weight)));
      }
      recon_sum += recon.item();
      kl_sum += kl.item();
      total = total.defined() ? nn::add(total, loss) : loss;
    }
    total = nn::scale(total, 1.0f / config.batch_size);
    StepLosses losses;
    losses.total = total.item();
    losses.reconstruction = recon_sum / config.batch_size;
    losses.kl = kl_sum / config.batch_size;
    require_finite(losses.total, "VAE", step);
    total.backward();
    apply_update(*optimizer, params, config, step);
    result.losses.push_back(losses);
    if (options.progress) options.progress(step, losses);
    const bool last = step + 1 == config.steps;
    if (last || (step + 1) % config.checkpoint_every == 0) {
      model->vae_hash = parameter_hash(model->vae);
      write_checkpoint(*model, *optimizer, config, step + 1, options.checkpoint);
    }
  }
  result.vae_hash_before = result.vae_hash_after = parameter_hash(model->vae);
  return result;
}

TrainResult train_ldm(const FeatureCache& cache, const TrainConfig& config,
                      const TrainOptions& options) {
  config.validate();
  if (config.stage != TrainStage::kLdm) throw ConfigError("stage: train_ldm needs stage=ldm");
  const auto train = cache.split("train");
  if (train.empty()) throw ConfigError("the cache has no train split");

  std::unique_ptr<Model> model;
  std::optional<nn::Adam> optimizer_storage;
  nn::Adam* optimizer = nullptr;
  int start = 0;
  if (!options.resume_from.empty()) {
    model = resume(options.resume_from, TrainStage::kLdm, &optimizer, optimizer_storage, config,
                   &start);
  } else {
    if (options.vae_checkpoint.empty()) throw ConfigError("train_ldm needs a VAE checkpoint");
    model = Model::load(options.vae_checkpoint);
    if (model->stage != "vae" && model->stage != "ldm") {
      throw ConfigError("checkpoint holds no trained VAE");
    }
  }
  if (!(model->config().frames == cache.frames)) {
    throw ConfigError("cache frame configuration differs from the model");
  }
  const std::string vae_hash = parameter_hash(model->vae);
  if (!model->vae_hash.empty() && model->vae_hash != vae_hash) {
    throw IoError("VAE parameters do not match the hash recorded in the checkpoint");
  }

  // Frozen VAE: latents are computed once with the posterior mean.
  std::vector<Tensor> latents;
  for (const CacheRecord* rec : train) latents.push_back(encode_mel(*model, rec->mel));
  if (start == 0 && model->stage != "ldm") {
    double acc = 0.0, acc2 = 0.0;
    std::size_t n = 0;
    for (const Tensor& z : latents) {
      for (float v : z.data()) {
        acc += v;
        acc2 += static_cast<double>(v) * v;
        ++n;
      }
    }
    const double mean = acc / n;
    model->latent_scale = 1.0 / std::sqrt(std::max(1e-12, acc2 / n - mean * mean));
    model->contour_stats = cache.stats;
    model->embedder.set_ranges(QuantRanges::from_stats(cache.stats));
  }
  model->stage = "ldm";
  model->vae_hash = vae_hash;

  std::vector<Tensor> params = model->ldm_parameters();
  if (!optimizer) {
    optimizer_storage.emplace(make_optimizer(params, config));
    optimizer = &*optimizer_storage;
  }
  const auto& stats = model->contour_stats;
  const int r = model->config().compression;
  const float scale = static_cast<float>(model->latent_scale);
  const Prediction prediction = prediction_from_string(model->config().prediction);

  TrainResult result;
  result.first_step = start;
  result.vae_hash_before = vae_hash;
  for (int step = start; step < config.steps; ++step) {
    nn::Rng rng = step_rng(config.seed, step);
    std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
    std::uniform_int_distribution<int> pick_t(0, model->schedule.steps() - 1);
    Tensor total;
    StepLosses losses;
    for (int b = 0; b < config.batch_size; ++b) {
      const std::size_t index = pick(rng);
      const CacheRecord& rec = *train[index];
      const PhonemeSequence seq = sequence_from_symbols(rec.phonemes, rec.transcript);
      const TextEncoding enc = model->text.forward(seq);

      // Duration loss in the log domain.
      std::vector<float> log_d(rec.durations.size());
      for (std::size_t m = 0; m < log_d.size(); ++m) {
        log_d[m] = std::log(static_cast<float>(std::max(rec.durations[m], 1)));
      }
      const int count = static_cast<int>(log_d.size());
      const Tensor dur_loss = nn::mse_loss(model->duration.forward(enc),
                                           Tensor::from({count}, std::move(log_d)));

      // Contour loss against the normalised ground truth.
      SketchPair sketches{rec.pitch_sketch, rec.energy_sketch};
      sketches = sketch_dropout(sketches, config.sketch_dropout_p, rng);
      ++result.samples;
      if (sketches.pitch.is_absent()) ++result.samples_with_pitch_dropped;
      else if (sketches.energy.is_absent()) ++result.samples_with_energy_dropped;
      else ++result.samples_with_both_sketches;
      const std::vector<double> pitch_n = normalize_contour(rec.pitch.values, stats.pitch);
      const std::vector<double> energy_n = normalize_contour(rec.loudness.values, stats.energy);
      const ContourPrediction pred = model->predictor.forward(enc, sketches);
      auto as_tensor = [count](const std::vector<double>& v) {
        return Tensor::from({count}, std::vector<float>(v.begin(), v.end()));
      };
      const Tensor contour_loss = nn::add(nn::mse_loss(pred.pitch, as_tensor(pitch_n)),
                                          nn::mse_loss(pred.energy, as_tensor(energy_n)));

      // Diffusion loss with ground-truth contours and durations.
      const ConditionBundle bundle = assemble_conditions(
          enc.projected, model->embedder.embed_pitch(pitch_n),
          model->embedder.embed_energy(energy_n), model->embedder.embed_pitch_sketch(sketches.pitch),
          model->embedder.embed_energy_sketch(sketches.energy),
          DurationAlignment::from_frames(rec.durations));
      const Tensor conditions = condition_channels(bundle, r);
      const Tensor z0 = nn::scale(latents[index], scale);
      const Tensor noise = gaussian_noise(z0.shape(), rng);
      const int t = pick_t(rng);
      const Tensor zt = diffuse(z0, noise, model->schedule, t);
      const Tensor out = model->denoiser.forward(build_denoiser_input(zt, conditions), t);
      const Tensor diff_loss = nn::mse_loss(
          out, prediction_target(z0, noise, model->schedule, t, prediction));

      Tensor loss = nn::add(diff_loss,
                            nn::add(nn::scale(dur_loss, static_cast<float>(config.duration_weight)),
                                    nn::scale(contour_loss,
                                              static_cast<float>(config.contour_weight))));
      losses.diffusion += diff_loss.item();
      losses.duration += dur_loss.item();
      losses.contour += contour_loss.item();
      total = total.defined() ? nn::add(total, loss) : loss;
    }
    total = nn::scale(total, 1.0f / config.batch_size);
    losses.total = total.item();
    losses.diffusion /= config.batch_size;
    losses.duration /= config.batch_size;
    losses.contour /= config.batch_size;
    require_finite(losses.total, "LDM", step);
    total.backward();
    model->vae.zero_grad();
    apply_update(*optimizer, params, config, step);
    result.losses.push_back(losses);
    if (options.progress) options.progress(step, losses);
    const bool last = step + 1 == config.steps;
    if (last || (step + 1) % config.checkpoint_every == 0) {
      write_checkpoint(*model, *optimizer, config, step + 1, options.checkpoint);
    }
  }
  result.vae_hash_after = parameter_hash(model->vae);
  if (result.vae_hash_after != result.vae_hash_before) {
    throw Error("VAE parameters changed during LDM training");
  }
  return result;
}

}  // namespace sketchvoice
