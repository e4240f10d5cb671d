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

#ifndef SKETCHVOICE_TEXT_FRONTEND_H_
#define SKETCHVOICE_TEXT_FRONTEND_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sketchvoice/model_config.h"
#include "sketchvoice/nn/module.h"
#include "sketchvoice/phonemes.h"

namespace sketchvoice {

// Phoneme embeddings H^y [M, D] and their projection to the mel width [M, F].
struct TextEncoding {
  nn::Tensor embedding;
  nn::Tensor projected;

  int length() const { return embedding.dim(0); }
};

// Phoneme embedding plus sinusoidal positions, a stack of convolutional
// Transformer blocks, and a kernel-1 convolution from D to F.
class TextEncoder : public nn::Module {
 public:
  TextEncoder(const ModelConfig& config, nn::Rng& rng);

  // Throws VocabularyError on unknown symbols, InvalidArgument when empty.
  TextEncoding forward(const PhonemeSequence& phonemes) const;
  TextEncoding forward(std::span<const int> ids) const;

 private:
  int dim_;
  nn::Embedding embedding_;
  std::vector<std::unique_ptr<nn::ConvTransformerBlock>> blocks_;
  nn::Conv1d projection_;
};

struct DurationAlignment {
  std::vector<int> frames_per_phoneme;
  int total_frames = 0;

  static DurationAlignment from_frames(std::vector<int> frames);
};

// Two conv + ReLU + LayerNorm layers and a linear head predicting
// log-durations (log frames) per phoneme.
class DurationPredictor : public nn::Module {
 public:
  DurationPredictor(const ModelConfig& config, nn::Rng& rng);

  // [M] log-durations. The input is detached so this predictor only learns
  // from its own loss.
  nn::Tensor forward(const TextEncoding& encoding) const;

 private:
  nn::Conv1d conv1_;
  nn::LayerNorm norm1_;
  nn::Conv1d conv2_;
  nn::LayerNorm norm2_;
  nn::Linear head_;
};

// Rounds exp(log_duration) to frames; at least one frame for every
// non-pause phoneme.
DurationAlignment durations_from_log(std::span<const float> log_durations,
                                     const PhonemeSequence& phonemes);

DurationAlignment predict_durations(const DurationPredictor& predictor,
                                   const TextEncoding& encoding,
                                   const PhonemeSequence& phonemes);

// Row m repeated durations[m] times. Throws InvalidArgument("empty
// expansion") when every duration is zero.
nn::Tensor length_regulate(const nn::Tensor& sequence,
                           const DurationAlignment& durations);

// Alignment file: {"phonemes": [...], "frames": [...]}.
struct AlignmentFile {
  std::vector<std::string> phonemes;
  std::vector<int> frames;
};
void write_alignment_file(const std::filesystem::path& path,
                          const AlignmentFile& alignment);
AlignmentFile read_alignment_file(const std::filesystem::path& path);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_TEXT_FRONTEND_H_
