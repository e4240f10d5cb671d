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

#include <filesystem>
#include <memory>
#include <vector>

#include "doctest.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/evaluation.h"
#include "sketchvoice/synthesis.h"

using namespace sketchvoice;

namespace {

ModelConfig tiny() {
  ModelConfig c = ModelConfig::desk();
  c.text_dim = 16;
  c.text_layers = 1;
  c.text_filter = 32;
  c.duration_filter = 16;
  c.predictor_layers = 1;
  c.predictor_filter = 32;
  c.vae_channels = 8;
  c.unet_channels = 16;
  c.unet_time_dim = 16;
  c.sampling_steps = 4;
  return c;
}

std::shared_ptr<Model> tiny_model(std::uint64_t seed = 5) {
  auto m = std::make_shared<Model>(tiny(), seed);
  m->stage = "ldm";
  m->contour_stats.pitch = {200.0, 40.0, 80.0, 400.0, ProsodyKind::kPitch};
  m->contour_stats.energy = {-30.0, 10.0, -80.0, -5.0, ProsodyKind::kEnergy};
  return m;
}

Synthesizer make_synth(std::shared_ptr<Model> m) {
  return Synthesizer(m, std::make_shared<GriffinLimVocoder>(m->config().frames, 4));
}

const char* kText = "She bought a red car.";

}  // namespace

TEST_CASE("synthesis result shapes") {
  const Synthesizer s = make_synth(tiny_model());
  SynthesisRequest req;
  req.text = kText;
  const SynthesisResult r = s.synthesize(req);
  const std::size_t m = r.phonemes.size();
  CHECK(m > 0);
  CHECK(r.durations.frames_per_phoneme.size() == m);
  CHECK(r.durations.total_frames >= kMinimumFrames);
  CHECK(r.mel.rows() == r.durations.total_frames);
  CHECK(r.mel.cols() == 80);
  CHECK(r.audio.size() == static_cast<std::size_t>(r.durations.total_frames) * 256);
  CHECK(r.realized_pitch.size() == m);
  CHECK(r.realized_energy.size() == m);
  CHECK(r.predicted_pitch.size() == m);
  CHECK(r.sketches.pitch.is_absent());
}

TEST_CASE("fixed seed gives identical audio bytes") {
  const Synthesizer s = make_synth(tiny_model());
  SynthesisRequest req;
  req.text = kText;
  req.seed = 42;
  const PhonemeSequence seq = s.phonemize(kText);
  req.sketches = route_user_sketch(emphasis_sketch(seq, 3));
  const SynthesisResult a = s.synthesize(req);
  const SynthesisResult b = s.synthesize(req);
  CHECK(encode_wav(a.audio, 22050) == encode_wav(b.audio, 22050));
  CHECK(a.realized_pitch.values == b.realized_pitch.values);
  req.seed = 43;
  CHECK(encode_wav(s.synthesize(req).audio, 22050) != encode_wav(a.audio, 22050));
  req.sampler = SamplerKind::kAncestral;
  CHECK(s.synthesize(req).audio == s.synthesize(req).audio);
}

TEST_CASE("duration override and request errors") {
  const Synthesizer s = make_synth(tiny_model());
  const std::size_t m = s.phonemize(kText).size();
  SynthesisRequest req;
  req.text = kText;
  req.durations = std::vector<int>(m, 3);
  const SynthesisResult r = s.synthesize(req);
  CHECK(r.durations.total_frames == static_cast<int>(3 * m));
  CHECK(r.mel.rows() == static_cast<int>(3 * m));

  req.durations = std::vector<int>(m + 1, 3);
  CHECK_THROWS_AS(s.synthesize(req), InvalidArgument);
  req.durations.reset();
  req.sketches = SketchPair::absent(m + 2);
  CHECK_THROWS_AS(s.synthesize(req), InvalidArgument);
  req.sketches = SketchPair::absent(m);
  req.sketches->pitch.values[0] = 1.5;
  CHECK_THROWS_AS(s.synthesize(req), InvalidArgument);
}

TEST_CASE("synthesizer refuses a partly trained model") {
  auto m = tiny_model();
  m->stage = "vae";
  CHECK_THROWS_AS(make_synth(m), ConfigError);
  auto ok = tiny_model();
  FrameConfig other;
  other.sample_rate = 16000;
  CHECK_THROWS_AS(Synthesizer(ok, std::make_shared<GriffinLimVocoder>(other, 4)), ConfigError);
}

TEST_CASE("realized contour handles zero durations") {
  FrameSeries f;
  f.kind = ProsodyKind::kPitch;
  f.values = {100, 100, 0, 0, 200, 200};
  const std::vector<int> d = {2, 0, 2, 2};
  const ProsodyContour c = realized_contour(f, d);
  REQUIRE(c.size() == 4u);
  CHECK(c.values[0] == doctest::Approx(100.0));
  CHECK(c.values[3] == doctest::Approx(200.0));
  // the zero-length phoneme and the unvoiced one sit on the line between
  CHECK(c.values[1] == doctest::Approx(100.0 + 100.0 / 3.0));
  CHECK(c.values[2] == doctest::Approx(100.0 + 200.0 / 3.0));
}

TEST_CASE("checkpoint round trip preserves synthesis") {
  auto m = tiny_model(9);
  const auto path = std::filesystem::temp_directory_path() / "sketchvoice_synthesis_test.skva";
  m->save(path);
  std::shared_ptr<Model> back = Model::load(path);
  std::filesystem::remove(path);
  CHECK(back->stage == "ldm");
  CHECK(back->contour_stats.pitch.mean == 200.0);
  CHECK(parameter_hash(back->denoiser) == parameter_hash(m->denoiser));
  SynthesisRequest req;
  req.text = kText;
  CHECK(make_synth(m).synthesize(req).audio == make_synth(back).synthesize(req).audio);
}

TEST_CASE("probe without a single peak skips synthesis") {
  const Synthesizer s = make_synth(tiny_model());
  const std::string text = "I didn't say you stole the money.";
  const std::size_t m = s.phonemize(text).size();
  const ProbeResult flat = emphasis_probe(s, text, 1, ProsodySketch{std::vector<double>(m, 0.5)});
  CHECK(flat.status == ProbeStatus::kNoPeak);
  CHECK(flat.realized_pitch.size() == 0u);
  std::vector<double> two(m, 0.1);
  two[0] = 1.0;
  two[m - 1] = 1.0;
  CHECK(emphasis_probe(s, text, 1, ProsodySketch{two}).status == ProbeStatus::kNoPeak);
  const ProbeResult r = emphasis_probe(s, text, 2);
  CHECK(r.status != ProbeStatus::kNoPeak);
  CHECK(r.realized_pitch.size() == m);
  CHECK(r.to_json().at("status").get<std::string>() == to_string(r.status));
  CHECK_THROWS_AS(emphasis_probe(s, text, 9), InvalidArgument);
}
