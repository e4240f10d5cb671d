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

#include "sketchvoice/evaluation.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sketchvoice/errors.h"

namespace sketchvoice {

double rmse_contour(const ProsodyContour& synth, const ProsodyContour& ref) {
  if (synth.size() != ref.size()) {
    throw InvalidArgument("contour lengths differ: " + std::to_string(synth.size()) + " vs " +
                          std::to_string(ref.size()));
  }
  if (synth.size() == 0) throw InvalidArgument("empty contours");
  double acc = 0.0;
  for (std::size_t i = 0; i < synth.size(); ++i) {
    const double d = synth.values[i] - ref.values[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(synth.size()));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("series lengths differ");
  if (a.empty()) throw InvalidArgument("empty series");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  const double denom = std::sqrt(saa * sbb);
  if (!(denom > 1e-12 * std::max(1.0, std::sqrt(saa) + std::sqrt(sbb)))) return 0.0;
  return std::clamp(sab / denom, -1.0, 1.0);
}

double sketch_adherence(const ProsodySketch& sketch, const ProsodyContour& realized) {
  if (sketch.size() != realized.size()) {
    throw InvalidArgument("sketch has " + std::to_string(sketch.size()) +
                          " values, realised contour " + std::to_string(realized.size()));
  }
  const ProsodySketch trend = smooth_to_sketch(realized);
  return pearson(sketch.values, trend.values);
}

ProsodySketch emphasis_sketch(const PhonemeSequence& phonemes, int word_index, double peak,
                              double base) {
  if (word_index < 0 || word_index >= static_cast<int>(phonemes.words.size())) {
    throw InvalidArgument("word index " + std::to_string(word_index) + " out of range (" +
                          std::to_string(phonemes.words.size()) + " words)");
  }
  ProsodySketch s{std::vector<double>(phonemes.size(), base), ProsodyKind::kPitch};
  const WordSpan& w = phonemes.words[static_cast<std::size_t>(word_index)];
  for (int m = w.begin; m < w.end; ++m) s.values[static_cast<std::size_t>(m)] = peak;
  return s;
}

std::string to_string(ProbeStatus status) {
  switch (status) {
    case ProbeStatus::kPass: return "pass";
    case ProbeStatus::kFail: return "fail";
    case ProbeStatus::kNoPeak: return "no-peak";
  }
  return "unknown";
}

nlohmann::json ProbeResult::to_json() const {
  return {{"status", to_string(status)},
          {"word_index", word_index},
          {"word_span", {word_begin, word_end}},
          {"argmax", argmax},
          {"adherence", adherence},
          {"sketch", sketch.values},
          {"realized_pitch", realized_pitch.values},
          {"phonemes", phonemes}};
}

namespace {

// True when the maximum is attained on exactly one contiguous run and the
// sketch is not flat.
bool has_single_peak(const ProsodySketch& s) {
  if (s.values.empty()) return false;
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  if (*hi - *lo <= 1e-9) return false;
  int runs = 0;
  bool inside = false;
  for (double v : s.values) {
    const bool at_max = *hi - v <= 1e-9;
    if (at_max && !inside) ++runs;
    inside = at_max;
  }
  return runs == 1;
}

}  // namespace

ProbeResult emphasis_probe(const Synthesizer& synth, const std::string& text, int word_index,
                           std::uint64_t seed) {
  const PhonemeSequence seq = synth.phonemize(text);
  return emphasis_probe(synth, text, word_index, emphasis_sketch(seq, word_index), seed);
}

ProbeResult emphasis_probe(const Synthesizer& synth, const std::string& text, int word_index,
                           const ProsodySketch& sketch, std::uint64_t seed) {
  const PhonemeSequence seq = synth.phonemize(text);
  if (word_index < 0 || word_index >= static_cast<int>(seq.words.size())) {
    throw InvalidArgument("word index " + std::to_string(word_index) + " out of range (" +
                          std::to_string(seq.words.size()) + " words)");
  }
  if (sketch.size() != seq.size()) {
    throw InvalidArgument("probe sketch does not match the phoneme count");
  }
  ProbeResult r;
  r.word_index = word_index;
  r.word_begin = seq.words[static_cast<std::size_t>(word_index)].begin;
  r.word_end = seq.words[static_cast<std::size_t>(word_index)].end;
  r.sketch = sketch;
  r.phonemes = seq.symbols;
  if (!has_single_peak(sketch)) return r;

  SynthesisRequest request;
  request.text = text;
  request.sketches = route_user_sketch(sketch);
  request.seed = seed;
  const SynthesisResult out = synth.synthesize(request);
  r.realized_pitch = out.realized_pitch;
  const auto& v = out.realized_pitch.values;
  r.argmax = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  r.status = r.argmax >= r.word_begin && r.argmax < r.word_end ? ProbeStatus::kPass
                                                               : ProbeStatus::kFail;
  r.adherence = sketch_adherence(sketch, out.realized_pitch);
  return r;
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& u : utterances) {
    per.push_back({{"id", u.id},
                   {"pitch_rmse_hz", u.pitch_rmse_hz},
                   {"energy_rmse_db", u.energy_rmse_db},
                   {"pitch_adherence", u.pitch_adherence},
                   {"energy_adherence", u.energy_adherence},
                   {"baseline_pitch_rmse_hz", u.baseline_pitch_rmse_hz},
                   {"baseline_energy_rmse_db", u.baseline_energy_rmse_db},
                   {"realized_pitch", u.realized_pitch.values},
                   {"reference_pitch", u.reference_pitch.values}});
  }
  return {{"utterances", per},
          {"aggregate",
           {{"count", utterances.size()},
            {"pitch_rmse_hz", mean_pitch_rmse_hz},
            {"energy_rmse_db", mean_energy_rmse_db},
            {"pitch_adherence", mean_pitch_adherence},
            {"energy_adherence", mean_energy_adherence},
            {"baseline_pitch_rmse_hz", mean_baseline_pitch_rmse_hz},
            {"baseline_energy_rmse_db", mean_baseline_energy_rmse_db}}}};
}

EvaluationReport evaluate_records(const Synthesizer& synth,
                                  const std::vector<const CacheRecord*>& records,
                                  const EvaluationOptions& options) {
  EvaluationReport report;
  for (const CacheRecord* rec : records) {
    SynthesisRequest request;
    request.text = rec->transcript;
    request.sketches = SketchPair{rec->pitch_sketch, rec->energy_sketch};
    request.seed = options.seed;
    request.steps = options.steps;
    if (synth.phonemize(rec->transcript).symbols != rec->phonemes) {
      throw InvalidArgument(rec->id + ": transcript phonemes differ from the alignment");
    }
    const SynthesisResult out = synth.synthesize(request);
    UtteranceReport u;
    u.id = rec->id;
    u.pitch_rmse_hz = rmse_contour(out.realized_pitch, rec->pitch);
    u.energy_rmse_db = rmse_contour(out.realized_energy, rec->loudness);
    u.pitch_adherence = sketch_adherence(rec->pitch_sketch, out.realized_pitch);
    u.energy_adherence = sketch_adherence(rec->energy_sketch, out.realized_energy);
    u.realized_pitch = out.realized_pitch;
    u.reference_pitch = rec->pitch;
    u.pitch_sketch = rec->pitch_sketch;
    if (options.baseline) {
      request.sketches.reset();
      const SynthesisResult base = synth.synthesize(request);
      u.baseline_pitch_rmse_hz = rmse_contour(base.realized_pitch, rec->pitch);
      u.baseline_energy_rmse_db = rmse_contour(base.realized_energy, rec->loudness);
    }
    report.utterances.push_back(std::move(u));
  }
  const double n = std::max<std::size_t>(1, report.utterances.size());
  for (const auto& u : report.utterances) {
    report.mean_pitch_rmse_hz += u.pitch_rmse_hz / n;
    report.mean_energy_rmse_db += u.energy_rmse_db / n;
    report.mean_pitch_adherence += u.pitch_adherence / n;
    report.mean_energy_adherence += u.energy_adherence / n;
    report.mean_baseline_pitch_rmse_hz += u.baseline_pitch_rmse_hz / n;
    report.mean_baseline_energy_rmse_db += u.baseline_energy_rmse_db / n;
  }
  return report;
}

std::string contour_plot_svg(const ProsodySketch& sketch, const ProsodyContour& realized,
                             const std::vector<std::string>& phonemes, const std::string& title) {
  const std::size_t m = sketch.size();
  if (realized.size() != m || phonemes.size() != m || m == 0) {
    throw InvalidArgument("plot inputs must share one non-zero length");
  }
  const double width = 40.0 * m + 60.0, height = 260.0, top = 30.0, plot_h = 180.0;
  const std::vector<double> r = min_max_normalize(realized.values);
  auto x = [](std::size_t i) { return 40.0 + 40.0 * i + 20.0; };
  auto y = [&](double v) { return top + plot_h * (1.0 - v); };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  svg << "<text x=\"10\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << title
      << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < m; ++i) svg << x(i) << "," << y(sketch.values[i]) << " ";
  svg << "\"/>\n";
  for (std::size_t i = 0; i < m; ++i) {
    svg << "<circle cx=\"" << x(i) << "\" cy=\"" << y(r[i]) << "\" r=\"4\" fill=\"#c0392b\"/>\n";
    svg << "<text x=\"" << x(i) << "\" y=\"" << top + plot_h + 25
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
        << phonemes[i] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sketchvoice
