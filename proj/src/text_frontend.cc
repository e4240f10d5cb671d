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

#include "sketchvoice/text_frontend.h"

#include <cmath>
#include <fstream>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"

namespace sketchvoice {

TextEncoder::TextEncoder(const ModelConfig& config, nn::Rng& rng)
    : dim_(config.text_dim),
      embedding_(PhonemeInventory::instance().size(), config.text_dim, rng,
                 1.0f / std::sqrt(static_cast<float>(config.text_dim)) * 4.0f),
      projection_(config.text_dim, config.mel_bins(), 1, rng) {
  add_module("embedding", &embedding_);
  for (int i = 0; i < config.text_layers; ++i) {
    blocks_.push_back(std::make_unique<nn::ConvTransformerBlock>(
        config.text_dim, config.text_heads, config.text_filter,
        config.text_kernel, rng));
    add_module("block" + std::to_string(i), blocks_.back().get());
  }
  add_module("projection", &projection_);
}

TextEncoding TextEncoder::forward(const PhonemeSequence& phonemes) const {
  const std::vector<int> ids = phonemes.ids();
  return forward(ids);
}

TextEncoding TextEncoder::forward(std::span<const int> ids) const {
  if (ids.empty()) throw InvalidArgument("cannot encode an empty phoneme sequence");
  const int length = static_cast<int>(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= embedding_.vocab()) {
      throw VocabularyError("phoneme id " + std::to_string(id) + " out of range");
    }
  }
  nn::Tensor h = nn::add(embedding_.forward(ids),
                         nn::sinusoidal_positions(length, dim_));
  for (const auto& block : blocks_) h = block->forward(h);
  return {h, projection_.forward(h)};
}

DurationAlignment DurationAlignment::from_frames(std::vector<int> frames) {
  DurationAlignment a;
  for (int f : frames) {
    if (f < 0) throw InvalidArgument("negative duration");
    a.total_frames += f;
  }
  a.frames_per_phoneme = std::move(frames);
  return a;
}

DurationPredictor::DurationPredictor(const ModelConfig& config, nn::Rng& rng)
    : conv1_(config.text_dim, config.duration_filter, config.duration_kernel, rng),
      norm1_(config.duration_filter),
      conv2_(config.duration_filter, config.duration_filter,
             config.duration_kernel, rng),
      norm2_(config.duration_filter),
      head_(config.duration_filter, 1, rng) {
  add_module("conv1", &conv1_);
  add_module("norm1", &norm1_);
  add_module("conv2", &conv2_);
  add_module("norm2", &norm2_);
  add_module("head", &head_);
}

nn::Tensor DurationPredictor::forward(const TextEncoding& encoding) const {
  nn::Tensor h = encoding.embedding.detach();
  h = norm1_.forward(nn::relu(conv1_.forward(h)));
  h = norm2_.forward(nn::relu(conv2_.forward(h)));
  nn::Tensor out = head_.forward(h);
  return nn::reshape(out, {out.dim(0)});
}

DurationAlignment durations_from_log(std::span<const float> log_durations,
                                     const PhonemeSequence& phonemes) {
  if (log_durations.size() != phonemes.size()) {
    throw InvalidArgument("duration count does not match phoneme count");
  }
  std::vector<int> frames(log_durations.size());
  for (std::size_t m = 0; m < frames.size(); ++m) {
    const double d = std::exp(static_cast<double>(log_durations[m]));
    int f = static_cast<int>(std::lround(std::min(d, 1e6)));
    if (!PhonemeInventory::is_pause(phonemes.symbols[m])) f = std::max(f, 1);
    frames[m] = std::max(f, 0);
  }
  return DurationAlignment::from_frames(std::move(frames));
}

DurationAlignment predict_durations(const DurationPredictor& predictor,
                                    const TextEncoding& encoding,
                                    const PhonemeSequence& phonemes) {
  nn::NoGradGuard guard;
  const nn::Tensor log_d = predictor.forward(encoding);
  return durations_from_log(log_d.data(), phonemes);
}

nn::Tensor length_regulate(const nn::Tensor& sequence,
                           const DurationAlignment& durations) {
  if (static_cast<int>(durations.frames_per_phoneme.size()) != sequence.dim(0)) {
    throw InvalidArgument("durations length does not match sequence rows");
  }
  if (durations.total_frames <= 0) throw InvalidArgument("empty expansion");
  return nn::repeat_rows(sequence, durations.frames_per_phoneme);
}

void write_alignment_file(const std::filesystem::path& path,
                          const AlignmentFile& alignment) {
  if (alignment.phonemes.size() != alignment.frames.size()) {
    throw InvalidArgument("alignment phoneme and frame counts differ");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json{{"phonemes", alignment.phonemes},
                        {"frames", alignment.frames}}
             .dump()
      << "\n";
}

AlignmentFile read_alignment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read alignment " + path.string());
  AlignmentFile a;
  try {
    const auto j = nlohmann::json::parse(in);
    a.phonemes = j.at("phonemes").get<std::vector<std::string>>();
    a.frames = j.at("frames").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (a.phonemes.size() != a.frames.size() || a.phonemes.empty()) {
    throw IoError(path.string() + ": phoneme and frame counts differ");
  }
  return a;
}

}  // namespace sketchvoice
