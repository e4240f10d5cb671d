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

#include "sketchvoice/synthesis.h"

#include <algorithm>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"
#include "sketchvoice/training.h"

namespace sketchvoice {

ProsodyContour realized_contour(const FrameSeries& frames, std::span<const int> durations) {
  std::vector<int> kept;
  std::vector<std::size_t> where;
  for (std::size_t m = 0; m < durations.size(); ++m) {
    if (durations[m] > 0) {
      kept.push_back(durations[m]);
      where.push_back(m);
    }
  }
  ProsodyContour out{std::vector<double>(durations.size(), 0.0), frames.kind};
  if (kept.empty()) return out;
  // Durations are consumed in order, so zero-length entries just drop out.
  const ProsodyContour pooled = pool_to_phoneme(frames, kept);
  std::vector<bool> known(durations.size(), false);
  for (std::size_t i = 0; i < where.size(); ++i) {
    out.values[where[i]] = pooled.values[i];
    known[where[i]] = frames.kind == ProsodyKind::kEnergy || pooled.values[i] > 0.0;
  }
  // Fill the unknown entries linearly between known neighbours.
  std::vector<std::size_t> anchors;
  for (std::size_t m = 0; m < known.size(); ++m) {
    if (known[m]) anchors.push_back(m);
  }
  if (anchors.empty()) return out;
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    if (known[m]) continue;
    const auto next = std::lower_bound(anchors.begin(), anchors.end(), m);
    if (next == anchors.begin()) {
      out.values[m] = out.values[anchors.front()];
    } else if (next == anchors.end()) {
      out.values[m] = out.values[anchors.back()];
    } else {
      const std::size_t lo = *(next - 1), hi = *next;
      const double w = static_cast<double>(m - lo) / static_cast<double>(hi - lo);
      out.values[m] = out.values[lo] + w * (out.values[hi] - out.values[lo]);
    }
  }
  return out;
}

Synthesizer::Synthesizer(std::shared_ptr<const Model> model,
                         std::shared_ptr<const Vocoder> vocoder)
    : model_(std::move(model)), vocoder_(std::move(vocoder)) {
  if (!model_ || !vocoder_) throw InvalidArgument("synthesizer needs a model and a vocoder");
  if (model_->stage != "ldm") throw ConfigError("checkpoint is not a fully trained model");
  if (!(vocoder_->frame_config() == model_->config().frames)) {
    throw ConfigError("vocoder frame configuration does not match the acoustic model");
  }
}

PhonemeSequence Synthesizer::phonemize(const std::string& text) const {
  return sketchvoice::phonemize(text);
}

SynthesisResult Synthesizer::synthesize(const SynthesisRequest& request) const {
  const Model& model = *model_;
  const ModelConfig& config = model.config();
  nn::NoGradGuard guard;
  SynthesisResult out;
  out.phonemes = phonemize(request.text);
  const std::size_t count = out.phonemes.size();
  out.sketches = request.sketches ? *request.sketches : SketchPair::absent(count);
  out.sketches.validate();
  if (out.sketches.size() != count) {
    throw InvalidArgument("sketch has " + std::to_string(out.sketches.size()) +
                          " values but the text has " + std::to_string(count) + " phonemes");
  }

  const TextEncoding enc = model.text.forward(out.phonemes);
  if (request.durations) {
    if (request.durations->size() != count) {
      throw InvalidArgument("duration override does not match the phoneme count");
    }
    out.durations = DurationAlignment::from_frames(*request.durations);
  } else {
    out.durations = predict_durations(model.duration, enc, out.phonemes);
  }
  if (out.durations.total_frames < kMinimumFrames) {
    std::vector<int> frames = out.durations.frames_per_phoneme;
    frames.back() += kMinimumFrames - out.durations.total_frames;
    out.durations = DurationAlignment::from_frames(std::move(frames));
  }

  const ContourPrediction pred = model.predictor.forward(enc, out.sketches);
  const std::vector<double> pitch_n(pred.pitch.data().begin(), pred.pitch.data().end());
  const std::vector<double> energy_n(pred.energy.data().begin(), pred.energy.data().end());
  out.predicted_pitch = {denormalize_contour(pitch_n, model.contour_stats.pitch),
                         ProsodyKind::kPitch};
  out.predicted_energy = {denormalize_contour(energy_n, model.contour_stats.energy),
                          ProsodyKind::kEnergy};

  const ConditionBundle bundle = assemble_conditions(
      enc.projected, model.embedder.embed_pitch(pitch_n), model.embedder.embed_energy(energy_n),
      model.embedder.embed_pitch_sketch(out.sketches.pitch),
      model.embedder.embed_energy_sketch(out.sketches.energy), out.durations);
  const int r = config.compression;
  const nn::Tensor conditions = condition_channels(bundle, r);
  const nn::Shape shape = {config.latent_channels, conditions.dim(1), conditions.dim(2)};
  nn::Rng rng(request.seed);
  const int steps = request.steps > 0 ? request.steps : config.sampling_steps;
  const NoisePredictor predict = conditioned_predictor(
      model.denoiser, conditions, model.schedule, prediction_from_string(config.prediction));
  nn::Tensor z = sample_latent(shape, steps, predict, model.schedule, request.sampler, rng);
  z = nn::scale(z, static_cast<float>(1.0 / model.latent_scale));
  out.mel = decode_latent(model, z, out.durations.total_frames);
  out.audio = vocoder_->synthesize(out.mel, config.frames);

  const auto& frames = out.durations.frames_per_phoneme;
  out.realized_pitch = realized_contour(extract_f0(out.audio, config.frames), frames);
  out.realized_energy = realized_contour(extract_energy(out.audio, config.frames), frames);
  return out;
}

}  // namespace sketchvoice
