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

#ifndef SKETCHVOICE_PROSODY_H_
#define SKETCHVOICE_PROSODY_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/audio.h"

namespace sketchvoice {

enum class ProsodyKind { kPitch, kEnergy };

std::string to_string(ProsodyKind kind);
ProsodyKind prosody_kind_from_string(const std::string& name);

// Frame-rate pitch (Hz, 0 = unvoiced) or energy (dB) track.
struct FrameSeries {
  std::vector<double> values;
  ProsodyKind kind = ProsodyKind::kPitch;
  FrameConfig config;
};

// Phoneme-rate pitch (Hz) or energy (dB), one value per phoneme.
struct ProsodyContour {
  std::vector<double> values;
  ProsodyKind kind = ProsodyKind::kPitch;

  std::size_t size() const { return values.size(); }
};

// Phoneme-rate trend in [0, 1]. All zeros means "no sketch given".
struct ProsodySketch {
  std::vector<double> values;
  ProsodyKind kind = ProsodyKind::kPitch;

  static ProsodySketch absent(ProsodyKind kind, std::size_t length);
  bool is_absent() const;
  std::size_t size() const { return values.size(); }
};

// Dataset-level statistics of a contour kind, from the training split.
struct ContourStats {
  double mean = 0.0;
  double std = 1.0;
  double min = 0.0;
  double max = 1.0;
  ProsodyKind kind = ProsodyKind::kPitch;

  // Throws ConfigError unless std > 0 and max > min.
  void validate() const;
};

struct PitchOptions {
  double min_hz = 60.0;
  double max_hz = 500.0;
  // Normalised autocorrelation peak required to call a frame voiced.
  double voicing_threshold = 0.8;
  // Frames quieter than this RMS are unvoiced without analysis.
  double silence_rms = 1e-4;
  // A shorter-lag peak replaces the best one when it reaches this fraction
  // of the best correlation.
  double candidate_ratio = 0.97;
  // Voiced runs shorter than this many frames are set to unvoiced.
  int min_voiced_frames = 3;
};

// Time-domain normalised autocorrelation pitch tracker with parabolic peak
// refinement. One value per hop; unvoiced frames are 0.
FrameSeries extract_f0(std::span<const float> waveform,
                       const FrameConfig& config,
                       const PitchOptions& options = {});

inline constexpr double kEnergyEpsilon = 1e-9;

// Per-frame 20 * log10(rms + 1e-9).
FrameSeries extract_energy(std::span<const float> waveform,
                           const FrameConfig& config);

// Mean of the frames assigned to each phoneme. Pitch means use voiced frames
// only and fall back to 0. Throws AlignmentError when the durations exceed
// the frame count, InvalidArgument on a duration below 1.
ProsodyContour pool_to_phoneme(const FrameSeries& frames,
                               std::span<const int> durations);

// Replaces zero (unvoiced) entries by linear interpolation between the
// nearest voiced neighbours, holding the edge values flat. An all-zero
// contour is left unchanged.
void interpolate_unvoiced(ProsodyContour& contour);

// Least-squares polynomial smoothing; edge samples use the polynomial fitted
// to the first/last full window. Requires odd window > polyorder and
// window <= values.size().
std::vector<double> savitzky_golay(std::span<const double> values, int window,
                                   int polyorder);

// Per-utterance min-max normalisation to [0, 1]; constant input maps to 0.5.
std::vector<double> min_max_normalize(std::span<const double> values);

inline constexpr int kDefaultSketchWindow = 9;
inline constexpr int kDefaultSketchPolyorder = 2;

// Savitzky-Golay smoothing followed by min-max normalisation. The window is
// clamped to the largest odd value <= M; when no valid window exists the
// contour is only normalised.
ProsodySketch smooth_to_sketch(const ProsodyContour& contour,
                               int window = kDefaultSketchWindow,
                               int polyorder = kDefaultSketchPolyorder);

std::vector<double> normalize_contour(std::span<const double> values,
                                      const ContourStats& stats);
std::vector<double> denormalize_contour(std::span<const double> values,
                                        const ContourStats& stats);

ContourStats compute_stats(const std::vector<ProsodyContour>& contours,
                           ProsodyKind kind);

inline constexpr int kQuantizationLevels = 256;

// Linear binning of [lo, hi] onto 0..levels-1 with round-half-up;
// out-of-range values clamp to the end bins.
std::vector<int> quantize(std::span<const double> values, double lo, double hi,
                          int levels = kQuantizationLevels);

// Contour or sketch file: {"kind", "phonemes", "values"}.
struct ProsodyFile {
  ProsodyKind kind = ProsodyKind::kPitch;
  std::vector<std::string> phonemes;
  std::vector<double> values;
};
void write_prosody_file(const std::filesystem::path& path,
                        const ProsodyFile& file);
ProsodyFile read_prosody_file(const std::filesystem::path& path);

// Stats file: {"pitch": {mean, std, min, max}, "energy": {...}}.
struct StatsPair {
  ContourStats pitch;
  ContourStats energy;
};
nlohmann::json stats_to_json(const ContourStats& stats);
ContourStats stats_from_json(const nlohmann::json& j, ProsodyKind kind);
void write_stats_file(const std::filesystem::path& path, const StatsPair& stats);
StatsPair read_stats_file(const std::filesystem::path& path);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_PROSODY_H_
