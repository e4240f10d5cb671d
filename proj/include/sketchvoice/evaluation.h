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

#ifndef SKETCHVOICE_EVALUATION_H_
#define SKETCHVOICE_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/dataset.h"
#include "sketchvoice/prosody.h"
#include "sketchvoice/synthesis.h"

namespace sketchvoice {

// Root mean square difference in the contours' own units. Throws
// InvalidArgument on a length mismatch or empty input.
double rmse_contour(const ProsodyContour& synth, const ProsodyContour& ref);

// Pearson correlation between the two series; 0 when either is constant.
double pearson(std::span<const double> a, std::span<const double> b);

// Pearson correlation of the sketch with the smoothed, normalised realised
// contour. Constant inputs give 0.
double sketch_adherence(const ProsodySketch& sketch, const ProsodyContour& realized);

// Single-peak sketch: `peak` over the word's phonemes, `base` elsewhere.
ProsodySketch emphasis_sketch(const PhonemeSequence& phonemes, int word_index,
                              double peak = 1.0, double base = 0.2);

enum class ProbeStatus { kPass, kFail, kNoPeak };
std::string to_string(ProbeStatus status);

struct ProbeResult {
  ProbeStatus status = ProbeStatus::kNoPeak;
  int word_index = 0;
  int word_begin = 0;
  int word_end = 0;
  int argmax = -1;
  double adherence = 0.0;
  ProsodySketch sketch;
  ProsodyContour realized_pitch;
  std::vector<std::string> phonemes;

  nlohmann::json to_json() const;
};

// Checks that the realised pitch peaks inside the emphasised word. A sketch
// without a unique peak region returns kNoPeak without synthesising.
ProbeResult emphasis_probe(const Synthesizer& synth, const std::string& text, int word_index,
                           std::uint64_t seed = 0);
// Same check with a caller-provided sketch.
ProbeResult emphasis_probe(const Synthesizer& synth, const std::string& text, int word_index,
                           const ProsodySketch& sketch, std::uint64_t seed = 0);

struct UtteranceReport {
  std::string id;
  double pitch_rmse_hz = 0.0;
  double energy_rmse_db = 0.0;
  double pitch_adherence = 0.0;
  double energy_adherence = 0.0;
  // Text-only baseline (both sketches absent).
  double baseline_pitch_rmse_hz = 0.0;
  double baseline_energy_rmse_db = 0.0;
  ProsodyContour realized_pitch;
  ProsodyContour reference_pitch;
  ProsodySketch pitch_sketch;
};

struct EvaluationReport {
  std::vector<UtteranceReport> utterances;
  double mean_pitch_rmse_hz = 0.0;
  double mean_energy_rmse_db = 0.0;
  double mean_pitch_adherence = 0.0;
  double mean_energy_adherence = 0.0;
  double mean_baseline_pitch_rmse_hz = 0.0;
  double mean_baseline_energy_rmse_db = 0.0;

  nlohmann::json to_json() const;
};

struct EvaluationOptions {
  std::uint64_t seed = 0;
  int steps = 0;
  bool baseline = true;  // also run the text-only condition
};

// Synthesises every record with its own ground-truth sketches and compares
// the realised contours with the reference phoneme by phoneme.
EvaluationReport evaluate_records(const Synthesizer& synth,
                                  const std::vector<const CacheRecord*>& records,
                                  const EvaluationOptions& options = {});

// Sketch as a line and realised contour as points, normalised per series,
// one column per phoneme.
std::string contour_plot_svg(const ProsodySketch& sketch, const ProsodyContour& realized,
                             const std::vector<std::string>& phonemes,
                             const std::string& title);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_EVALUATION_H_
