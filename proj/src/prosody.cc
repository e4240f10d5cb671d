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

#include "sketchvoice/prosody.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "sketchvoice/errors.h"

namespace sketchvoice {

std::string to_string(ProsodyKind kind) {
  return kind == ProsodyKind::kPitch ? "pitch" : "energy";
}

ProsodyKind prosody_kind_from_string(const std::string& name) {
  if (name == "pitch") return ProsodyKind::kPitch;
  if (name == "energy") return ProsodyKind::kEnergy;
  throw InvalidArgument("unknown prosody kind '" + name + "'");
}

ProsodySketch ProsodySketch::absent(ProsodyKind kind, std::size_t length) {
  return ProsodySketch{std::vector<double>(length, 0.0), kind};
}

bool ProsodySketch::is_absent() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return v == 0.0; });
}

void ContourStats::validate() const {
  if (!(std > 0.0) || !std::isfinite(std)) {
    throw ConfigError(to_string(kind) + " stats: std must be positive");
  }
  if (!(max > min)) {
    throw ConfigError(to_string(kind) + " stats: max must exceed min");
  }
}

FrameSeries extract_f0(std::span<const float> waveform,
                       const FrameConfig& config, const PitchOptions& options) {
  const int frames = frame_count(waveform.size(), config);
  const int min_lag = static_cast<int>(std::floor(config.sample_rate / options.max_hz));
  const int max_lag = static_cast<int>(std::ceil(config.sample_rate / options.min_hz));
  const int span = config.window_size - max_lag - 1;
  if (span < max_lag) throw ConfigError("window too short for pitch range");

  FrameSeries out{std::vector<double>(static_cast<std::size_t>(frames), 0.0),
                  ProsodyKind::kPitch, config};
  std::vector<double> x(static_cast<std::size_t>(config.window_size));
  std::vector<double> nccf(static_cast<std::size_t>(max_lag) + 2, 0.0);
  for (int t = 0; t < frames; ++t) {
    const std::vector<float> frame = analysis_frame(waveform, t, config);
    double mu = 0.0;
    for (float v : frame) mu += v;
    mu /= frame.size();
    double energy = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      x[i] = frame[i] - mu;
      energy += x[i] * x[i];
    }
    if (std::sqrt(energy / frame.size()) < options.silence_rms) continue;

    double e0 = 0.0;
    for (int n = 0; n < span; ++n) e0 += x[n] * x[n];
    double e_lag = 0.0;
    for (int n = min_lag - 1; n < min_lag - 1 + span; ++n) e_lag += x[n] * x[n];
    double best = 0.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      if (lag > min_lag - 1) {
        // Slide the lagged energy window by one sample.
        e_lag += x[lag + span - 1] * x[lag + span - 1] - x[lag - 1] * x[lag - 1];
      }
      double r = 0.0;
      for (int n = 0; n < span; ++n) r += x[n] * x[n + lag];
      const double denom = std::sqrt(e0 * std::max(e_lag, 0.0));
      nccf[lag] = denom > 0.0 ? r / denom : 0.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, nccf[lag]);
    }
    if (best < options.voicing_threshold) continue;

    // Shortest lag whose local peak is close to the best one; longer lags
    // that match equally well are sub-harmonics.
    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (nccf[lag] >= nccf[lag - 1] && nccf[lag] >= nccf[lag + 1] &&
          nccf[lag] >= options.candidate_ratio * best) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;
    const double a = nccf[chosen - 1], b = nccf[chosen], c = nccf[chosen + 1];
    const double curvature = a - 2.0 * b + c;
    double shift = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    out.values[t] = config.sample_rate / (chosen + shift);
  }
  // Drop voiced runs too short to be a syllable nucleus.
  std::size_t t = 0;
  while (t < out.values.size()) {
    if (out.values[t] <= 0.0) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < out.values.size() && out.values[end] > 0.0) ++end;
    if (static_cast<int>(end - t) < options.min_voiced_frames) {
      std::fill(out.values.begin() + t, out.values.begin() + end, 0.0);
    }
    t = end;
  }
  return out;
}

FrameSeries extract_energy(std::span<const float> waveform,
                           const FrameConfig& config) {
  const int frames = frame_count(waveform.size(), config);
  FrameSeries out{std::vector<double>(static_cast<std::size_t>(frames)),
                  ProsodyKind::kEnergy, config};
  for (int t = 0; t < frames; ++t) {
    const std::vector<float> frame = analysis_frame(waveform, t, config);
    double acc = 0.0;
    for (float v : frame) acc += static_cast<double>(v) * v;
    const double rms = std::sqrt(acc / frame.size());
    out.values[t] = 20.0 * std::log10(rms + kEnergyEpsilon);
  }
  return out;
}

ProsodyContour pool_to_phoneme(const FrameSeries& frames,
                               std::span<const int> durations) {
  long total = 0;
  for (int d : durations) {
    if (d < 1) throw InvalidArgument("phoneme durations must be at least 1 frame");
    total += d;
  }
  if (total > static_cast<long>(frames.values.size())) {
    throw AlignmentError("durations cover " + std::to_string(total) +
                         " frames but only " +
                         std::to_string(frames.values.size()) + " exist");
  }
  ProsodyContour out{std::vector<double>(durations.size(), 0.0), frames.kind};
  std::size_t at = 0;
  for (std::size_t m = 0; m < durations.size(); ++m) {
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i < durations[m]; ++i, ++at) {
      const double v = frames.values[at];
      if (frames.kind == ProsodyKind::kPitch && v <= 0.0) continue;
      acc += v;
      ++count;
    }
    out.values[m] = count > 0 ? acc / count : 0.0;
  }
  return out;
}

void interpolate_unvoiced(ProsodyContour& contour) {
  auto& v = contour.values;
  const long n = static_cast<long>(v.size());
  std::vector<long> voiced;
  for (long i = 0; i < n; ++i) {
    if (v[i] > 0.0) voiced.push_back(i);
  }
  if (voiced.empty()) return;
  for (long i = 0; i < voiced.front(); ++i) v[i] = v[voiced.front()];
  for (long i = voiced.back() + 1; i < n; ++i) v[i] = v[voiced.back()];
  for (std::size_t k = 0; k + 1 < voiced.size(); ++k) {
    const long a = voiced[k], b = voiced[k + 1];
    for (long i = a + 1; i < b; ++i) {
      const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
      v[i] = (1.0 - w) * v[a] + w * v[b];
    }
  }
}

std::vector<double> savitzky_golay(std::span<const double> values, int window,
                                   int polyorder) {
  const int n = static_cast<int>(values.size());
  if (window % 2 == 0 || window <= polyorder || window > n || polyorder < 0) {
    throw InvalidArgument("invalid Savitzky-Golay window " +
                          std::to_string(window) + " / order " +
                          std::to_string(polyorder) + " for length " +
                          std::to_string(n));
  }
  const int half = window / 2;
  // Design matrix on abscissae centred in the window and scaled to [-1, 1]
  // for conditioning.
  const double unit = half > 0 ? static_cast<double>(half) : 1.0;
  Eigen::MatrixXd design(window, polyorder + 1);
  for (int i = 0; i < window; ++i) {
    const double u = (i - half) / unit;
    double p = 1.0;
    for (int j = 0; j <= polyorder; ++j, p *= u) design(i, j) = p;
  }
  // Row r of `projection` evaluates the fitted polynomial at window offset r.
  const Eigen::MatrixXd pinv =
      design.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd projection = design * pinv;

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const int start = std::clamp(m - half, 0, n - window);
    const int offset = m - start;
    double acc = 0.0;
    for (int i = 0; i < window; ++i) acc += projection(offset, i) * values[start + i];
    out[m] = acc;
  }
  return out;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double range = hi - lo;
  std::vector<double> out(values.size(), 0.5);
  if (range <= 1e-12 * std::max(1.0, std::fabs(hi))) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - lo) / range, 0.0, 1.0);
  }
  return out;
}

ProsodySketch smooth_to_sketch(const ProsodyContour& contour, int window,
                               int polyorder) {
  const int m = static_cast<int>(contour.size());
  if (m == 0) throw InvalidArgument("cannot sketch an empty contour");
  if (window < 1 || polyorder < 0) {
    throw InvalidArgument("sketch window and polyorder must be positive");
  }
  int w = std::min(window, m);
  if (w % 2 == 0) --w;
  if (m < polyorder + 1 || w <= polyorder) {
    return ProsodySketch{min_max_normalize(contour.values), contour.kind};
  }
  return ProsodySketch{
      min_max_normalize(savitzky_golay(contour.values, w, polyorder)),
      contour.kind};
}

std::vector<double> normalize_contour(std::span<const double> values,
                                      const ContourStats& stats) {
  stats.validate();
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - stats.mean) / stats.std;
  }
  return out;
}

std::vector<double> denormalize_contour(std::span<const double> values,
                                        const ContourStats& stats) {
  stats.validate();
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] * stats.std + stats.mean;
  }
  return out;
}

ContourStats compute_stats(const std::vector<ProsodyContour>& contours,
                           ProsodyKind kind) {
  double acc = 0.0, acc2 = 0.0;
  std::size_t count = 0;
  ContourStats stats;
  stats.kind = kind;
  stats.min = std::numeric_limits<double>::infinity();
  stats.max = -std::numeric_limits<double>::infinity();
  for (const ProsodyContour& c : contours) {
    for (double v : c.values) {
      acc += v;
      acc2 += v * v;
      stats.min = std::min(stats.min, v);
      stats.max = std::max(stats.max, v);
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("no contour values for statistics");
  stats.mean = acc / count;
  stats.std = std::sqrt(std::max(0.0, acc2 / count - stats.mean * stats.mean));
  stats.validate();
  return stats;
}

std::vector<int> quantize(std::span<const double> values, double lo, double hi,
                          int levels) {
  if (!(hi > lo) || levels < 2) {
    throw InvalidArgument("quantization range must be non-empty");
  }
  std::vector<int> out(values.size());
  const double top = levels - 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double unit = std::clamp((values[i] - lo) / (hi - lo), 0.0, 1.0);
    out[i] = static_cast<int>(std::floor(unit * top + 0.5));
  }
  return out;
}

void write_prosody_file(const std::filesystem::path& path,
                        const ProsodyFile& file) {
  if (!file.phonemes.empty() && file.phonemes.size() != file.values.size()) {
    throw InvalidArgument("phoneme and value counts differ");
  }
  nlohmann::json j{{"kind", to_string(file.kind)},
                   {"phonemes", file.phonemes},
                   {"values", file.values}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ProsodyFile read_prosody_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  ProsodyFile file;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    file.kind = prosody_kind_from_string(j.at("kind").get<std::string>());
    file.phonemes = j.at("phonemes").get<std::vector<std::string>>();
    file.values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (file.phonemes.size() != file.values.size()) {
    throw InvalidArgument(path.string() + ": phoneme and value counts differ");
  }
  return file;
}

nlohmann::json stats_to_json(const ContourStats& stats) {
  return {{"mean", stats.mean},
          {"std", stats.std},
          {"min", stats.min},
          {"max", stats.max}};
}

ContourStats stats_from_json(const nlohmann::json& j, ProsodyKind kind) {
  ContourStats stats;
  stats.kind = kind;
  try {
    stats.mean = j.at("mean").get<double>();
    stats.std = j.at("std").get<double>();
    stats.min = j.at("min").get<double>();
    stats.max = j.at("max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed stats: ") + e.what());
  }
  stats.validate();
  return stats;
}

void write_stats_file(const std::filesystem::path& path, const StatsPair& stats) {
  nlohmann::json j{{"pitch", stats_to_json(stats.pitch)},
                   {"energy", stats_to_json(stats.energy)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

StatsPair read_stats_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return {stats_from_json(j.at("pitch"), ProsodyKind::kPitch),
          stats_from_json(j.at("energy"), ProsodyKind::kEnergy)};
}

}  // namespace sketchvoice
