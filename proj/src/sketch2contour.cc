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

#include "sketchvoice/sketch2contour.h"

#include <algorithm>
#include <cmath>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"

namespace sketchvoice {

SketchPair SketchPair::absent(std::size_t length) {
  return {ProsodySketch::absent(ProsodyKind::kPitch, length),
          ProsodySketch::absent(ProsodyKind::kEnergy, length)};
}

void SketchPair::validate() const {
  if (pitch.size() != energy.size()) {
    throw InvalidArgument("pitch and energy sketches differ in length");
  }
  for (const ProsodySketch* s : {&pitch, &energy}) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (!(s->values[i] >= 0.0 && s->values[i] <= 1.0)) {
        throw InvalidArgument(to_string(s->kind) + "_sketch[" + std::to_string(i) +
                              "] must be in [0, 1]");
      }
    }
  }
}

void UserPolyline::validate() const {
  if (points.size() < 2) {
    throw InvalidArgument("points: a polyline needs at least two points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidArgument("points[" + std::to_string(i) + "].x must be in [0, 1]");
    }
    if (!(y >= 0.0 && y <= 1.0)) {
      throw InvalidArgument("points[" + std::to_string(i) + "].y must be in [0, 1]");
    }
    if (i > 0 && !(x > points[i - 1].first)) {
      throw InvalidArgument("points[" + std::to_string(i) +
                            "].x must be strictly greater than the previous x");
    }
  }
}

UserPolyline polyline_from_json(const nlohmann::json& j) {
  UserPolyline p;
  if (!j.is_object()) throw InvalidArgument("sketch: expected an object");
  if (j.contains("kind")) {
    if (!j.at("kind").is_string()) throw InvalidArgument("kind: expected a string");
    p.kind = prosody_kind_from_string(j.at("kind").get<std::string>());
  }
  if (!j.contains("points") || !j.at("points").is_array()) {
    throw InvalidArgument("points: expected an array of [x, y] pairs");
  }
  const auto& pts = j.at("points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& pt = pts[i];
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw InvalidArgument("points[" + std::to_string(i) + "]: expected [x, y]");
    }
    p.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
  }
  p.validate();
  return p;
}

nlohmann::json polyline_to_json(const UserPolyline& polyline) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [x, y] : polyline.points) pts.push_back({x, y});
  return {{"kind", to_string(polyline.kind)}, {"points", pts}};
}

ProsodySketch resample_user_sketch(const UserPolyline& polyline, int length) {
  polyline.validate();
  if (length < 1) throw InvalidArgument("sketch length must be at least 1");
  const auto& pts = polyline.points;
  ProsodySketch out{std::vector<double>(static_cast<std::size_t>(length)),
                    polyline.kind};
  std::size_t seg = 0;
  for (int m = 0; m < length; ++m) {
    const double x = (m + 0.5) / length;
    double y;
    if (x <= pts.front().first) {
      y = pts.front().second;
    } else if (x >= pts.back().first) {
      y = pts.back().second;
    } else {
      while (pts[seg + 1].first < x) ++seg;
      const auto [x0, y0] = pts[seg];
      const auto [x1, y1] = pts[seg + 1];
      y = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    out.values[m] = std::clamp(y, 0.0, 1.0);
  }
  return out;
}

SketchPair route_user_sketch(const ProsodySketch& sketch) {
  SketchPair pair = SketchPair::absent(sketch.size());
  if (sketch.kind == ProsodyKind::kEnergy) {
    pair.energy = sketch;
  } else {
    pair.pitch = sketch;
  }
  return pair;
}

SketchPair sketch_dropout(const SketchPair& sketches, double p, nn::Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dropout p must be in [0, 1]");
  SketchPair out = sketches;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= p) return out;
  if (unit(rng) < 0.5) {
    out.pitch = ProsodySketch::absent(ProsodyKind::kPitch, sketches.size());
  } else {
    out.energy = ProsodySketch::absent(ProsodyKind::kEnergy, sketches.size());
  }
  return out;
}

nn::Tensor sketch_column(const ProsodySketch& sketch) {
  std::vector<float> v(sketch.values.begin(), sketch.values.end());
  const int n = static_cast<int>(v.size());
  return nn::Tensor::from({n, 1}, std::move(v));
}

SketchToContour::SketchToContour(const ModelConfig& config, nn::Rng& rng)
    : pitch_in_(1, config.mel_bins(), rng),
      energy_in_(1, config.mel_bins(), rng),
      head_(config.mel_bins(), 2, rng) {
  add_module("pitch_in", &pitch_in_);
  add_module("energy_in", &energy_in_);
  for (int i = 0; i < config.predictor_layers; ++i) {
    blocks_.push_back(std::make_unique<nn::ConvTransformerBlock>(
        config.mel_bins(), config.predictor_heads, config.predictor_filter,
        config.predictor_kernel, rng));
    add_module("block" + std::to_string(i), blocks_.back().get());
  }
  add_module("head", &head_);
}

ContourPrediction SketchToContour::forward(const TextEncoding& text,
                                           const SketchPair& sketches) const {
  sketches.validate();
  if (static_cast<int>(sketches.size()) != text.length()) {
    throw InvalidArgument("sketch length " + std::to_string(sketches.size()) +
                          " does not match phoneme count " +
                          std::to_string(text.length()));
  }
  nn::Tensor h = nn::add(text.projected,
                         nn::add(pitch_in_.forward(sketch_column(sketches.pitch)),
                                 energy_in_.forward(sketch_column(sketches.energy))));
  for (const auto& block : blocks_) h = block->forward(h);
  nn::Tensor out = head_.forward(h);
  const int m = out.dim(0);
  return {nn::reshape(nn::slice_cols(out, 0, 1), {m}),
          nn::reshape(nn::slice_cols(out, 1, 2), {m})};
}

}  // namespace sketchvoice
