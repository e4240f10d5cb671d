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

#include "sketchvoice/model.h"

#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {

constexpr const char* kFormat = "sketchvoice-model";

}  // namespace

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : config_((config.validate(), config)),
      init_rng_(seed),
      vae(config_, init_rng_),
      text(config_, init_rng_),
      duration(config_, init_rng_),
      predictor(config_, init_rng_),
      embedder(config_, init_rng_),
      denoiser(config_, init_rng_),
      schedule(DiffusionSchedule::from_config(config_)) {}

std::vector<nn::Tensor> Model::ldm_parameters() const {
  std::vector<nn::Tensor> params;
  for (const nn::Module* m : std::initializer_list<const nn::Module*>{
           &text, &duration, &predictor, &embedder, &denoiser}) {
    for (const auto& p : m->parameters()) params.push_back(p);
  }
  return params;
}

Archive Model::to_archive() const {
  Archive a;
  a.meta() = {{"format", kFormat},
              {"version", kCheckpointVersion},
              {"stage", stage},
              {"config", config_.to_json()},
              {"mel_stats", mel_stats.to_json()},
              {"contour_stats",
               {{"pitch", stats_to_json(contour_stats.pitch)},
                {"energy", stats_to_json(contour_stats.energy)}}},
              {"quantization", embedder.ranges().to_json()},
              {"schedule", schedule.to_json()},
              {"latent_scale", latent_scale},
              {"vae_hash", vae_hash}};
  store_module(a, "vae.", vae);
  store_module(a, "text.", text);
  store_module(a, "duration.", duration);
  store_module(a, "predictor.", predictor);
  store_module(a, "embedder.", embedder);
  store_module(a, "denoiser.", denoiser);
  return a;
}

std::unique_ptr<Model> Model::from_archive(const Archive& a) {
  const auto& m = a.meta();
  if (m.value("format", "") != kFormat) throw IoError("archive is not a model checkpoint");
  if (!m.contains("version")) throw IoError("checkpoint has no version field");
  if (m.at("version").get<int>() != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + m.at("version").dump());
  }
  std::unique_ptr<Model> model;
  try {
    model = std::make_unique<Model>(ModelConfig::from_json(m.at("config")));
    model->stage = m.at("stage").get<std::string>();
    model->mel_stats = MelStats::from_json(m.at("mel_stats"));
    model->contour_stats.pitch =
        stats_from_json(m.at("contour_stats").at("pitch"), ProsodyKind::kPitch);
    model->contour_stats.energy =
        stats_from_json(m.at("contour_stats").at("energy"), ProsodyKind::kEnergy);
    model->embedder.set_ranges(QuantRanges::from_json(m.at("quantization")));
    model->latent_scale = m.at("latent_scale").get<double>();
    model->vae_hash = m.at("vae_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint header: ") + e.what());
  }
  load_module(a, "vae.", model->vae);
  load_module(a, "text.", model->text);
  load_module(a, "duration.", model->duration);
  load_module(a, "predictor.", model->predictor);
  load_module(a, "embedder.", model->embedder);
  load_module(a, "denoiser.", model->denoiser);
  return model;
}

void Model::save(const std::filesystem::path& path) const { to_archive().write(path); }

std::unique_ptr<Model> Model::load(const std::filesystem::path& path) {
  return from_archive(Archive::read(path));
}

}  // namespace sketchvoice
