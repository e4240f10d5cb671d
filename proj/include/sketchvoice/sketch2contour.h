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

#ifndef SKETCHVOICE_SKETCH2CONTOUR_H_
#define SKETCHVOICE_SKETCH2CONTOUR_H_

#include <memory>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sketchvoice/model_config.h"
#include "sketchvoice/nn/module.h"
#include "sketchvoice/prosody.h"
#include "sketchvoice/text_frontend.h"

namespace sketchvoice {

// Pitch and energy sketches for one utterance. An all-zero member is the
// "absent" sentinel.
struct SketchPair {
  ProsodySketch pitch;
  ProsodySketch energy;

  static SketchPair absent(std::size_t length);
  std::size_t size() const { return pitch.size(); }
  // Throws InvalidArgument if the members differ in length.
  void validate() const;
};

// Free-hand drawing in the unit square.
struct UserPolyline {
  std::vector<std::pair<double, double>> points;
  ProsodyKind kind = ProsodyKind::kPitch;

  // Throws InvalidArgument naming the offending field: fewer than two
  // points, coordinates outside [0, 1], or x not strictly increasing.
  void validate() const;
};

// Wire format {"kind": "pitch", "points": [[x, y], ...]}; validates.
UserPolyline polyline_from_json(const nlohmann::json& j);
nlohmann::json polyline_to_json(const UserPolyline& polyline);

// Piecewise-linear interpolation at x = (m + 0.5) / M, flat beyond the end
// points.
ProsodySketch resample_user_sketch(const UserPolyline& polyline, int length);

// A single user sketch is the pitch sketch unless it says otherwise; the
// other member is absent.
SketchPair route_user_sketch(const ProsodySketch& sketch);

// With probability p, replaces exactly one of the two sketches (fair coin)
// by the absent sentinel. Never both.
SketchPair sketch_dropout(const SketchPair& sketches, double p, nn::Rng& rng);

// Normalised-space contour predictions, each [M].
struct ContourPrediction {
  nn::Tensor pitch;
  nn::Tensor energy;
};

// Restores detailed contours from text and sketches: projected text plus a
// linear embedding of each sketch value, a short stack of convolutional
// Transformer blocks, and two scalar heads.
class SketchToContour : public nn::Module {
 public:
  SketchToContour(const ModelConfig& config, nn::Rng& rng);

  // Throws InvalidArgument if the sketches do not match the text length.
  ContourPrediction forward(const TextEncoding& text,
                            const SketchPair& sketches) const;

 private:
  nn::Linear pitch_in_;
  nn::Linear energy_in_;
  std::vector<std::unique_ptr<nn::ConvTransformerBlock>> blocks_;
  nn::Linear head_;
};

// Column tensor [M, 1] from sketch values.
nn::Tensor sketch_column(const ProsodySketch& sketch);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_SKETCH2CONTOUR_H_
