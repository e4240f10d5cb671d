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

#ifndef SKETCHVOICE_SYNTHESIS_H_
#define SKETCHVOICE_SYNTHESIS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sketchvoice/acoustic.h"
#include "sketchvoice/model.h"
#include "sketchvoice/vocoder.h"

namespace sketchvoice {

struct SynthesisRequest {
  std::string text;
  // Phoneme-level sketches; when unset both are absent (text-only mode).
  std::optional<SketchPair> sketches;
  std::uint64_t seed = 0;
  int steps = 0;  // 0 = the model's default sampling steps
  SamplerKind sampler = SamplerKind::kDeterministic;
  // Replaces the predicted durations, e.g. to follow a reference alignment.
  std::optional<std::vector<int>> durations;
};

struct SynthesisResult {
  PhonemeSequence phonemes;
  DurationAlignment durations;
  SketchPair sketches;
  ProsodyContour predicted_pitch;   // Hz
  ProsodyContour predicted_energy;  // dB
  Matrix mel;
  std::vector<float> audio;
  // Re-extracted from `audio` and pooled with `durations`.
  ProsodyContour realized_pitch;
  ProsodyContour realized_energy;
};

// Utterances shorter than this many frames are lengthened at the end so
// the vocoder window fits.
inline constexpr int kMinimumFrames = 4;

// Pools a frame series with durations that may contain zeros; zero-length
// phonemes take values interpolated from their neighbours, and unvoiced
// pitch is interpolated as for training contours.
ProsodyContour realized_contour(const FrameSeries& frames, std::span<const int> durations);

// Immutable after construction; synthesize() may run concurrently.
class Synthesizer {
 public:
  Synthesizer(std::shared_ptr<const Model> model, std::shared_ptr<const Vocoder> vocoder);

  const Model& model() const { return *model_; }
  const Vocoder& vocoder() const { return *vocoder_; }

  PhonemeSequence phonemize(const std::string& text) const;
  // Throws InvalidArgument when the sketches do not have one value per
  // phoneme.
  SynthesisResult synthesize(const SynthesisRequest& request) const;

 private:
  std::shared_ptr<const Model> model_;
  std::shared_ptr<const Vocoder> vocoder_;
};

}  // namespace sketchvoice

#endif  // SKETCHVOICE_SYNTHESIS_H_
