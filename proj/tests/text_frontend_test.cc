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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"
#include "sketchvoice/text_frontend.h"

using namespace sketchvoice;

namespace {

bool all_finite(const nn::Tensor& t) {
  for (float v : t.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

PhonemeSequence seven_phonemes() {
  return sequence_from_symbols({"HH", "AH0", "L", "OW1", "sp", "W", "ER1"});
}

}  // namespace

TEST_CASE("hello uses the dictionary pronunciation") {
  const auto p = phonemize("hello");
  CHECK(p.symbols == std::vector<std::string>{"HH", "AH0", "L", "OW1"});
  REQUIRE(p.words.size() == 1);
  CHECK(p.words[0].begin == 0);
  CHECK(p.words[0].end == 4);
}

TEST_CASE("phonemize edge cases") {
  CHECK_FALSE(phonemize("a").symbols.empty());
  CHECK(phonemize("Hello, world!").symbols == phonemize("Hello, world!").symbols);
  CHECK_THROWS_AS(phonemize(""), InvalidArgument);
  CHECK_THROWS_AS(phonemize("?!,"), InvalidArgument);
  // Out-of-dictionary words still get phonemes from the rules.
  const auto oov = phonemize("zorblax");
  CHECK_FALSE(oov.symbols.empty());
  for (const auto& s : oov.symbols) CHECK(PhonemeInventory::instance().contains(s));
  const auto pause = phonemize("yes, no");
  CHECK(std::count(pause.symbols.begin(), pause.symbols.end(), "sp") == 1);
  CHECK(pause.words.size() == 2);
}

TEST_CASE("inventory round trip and unknown symbols") {
  const auto& inv = PhonemeInventory::instance();
  for (int i = 0; i < inv.size(); ++i) CHECK(inv.id(inv.symbol(i)) == i);
  CHECK_THROWS_AS(inv.id("QQ9"), VocabularyError);
  CHECK_THROWS_AS(sequence_from_symbols({"HH", "XX"}), VocabularyError);
}

TEST_CASE("text encoder shapes with the full-size preset") {
  nn::Rng rng(1);
  const ModelConfig config = ModelConfig::paper();
  TextEncoder encoder(config, rng);
  nn::NoGradGuard guard;
  const auto enc = encoder.forward(seven_phonemes());
  CHECK(enc.embedding.shape() == nn::Shape{7, 256});
  CHECK(enc.projected.shape() == nn::Shape{7, 80});
  CHECK(all_finite(enc.embedding));
  CHECK(all_finite(enc.projected));
}

TEST_CASE("text encoder is order sensitive and deterministic") {
  nn::Rng rng(2);
  TextEncoder encoder(ModelConfig::desk(), rng);
  nn::NoGradGuard guard;
  const auto a = encoder.forward(seven_phonemes());
  const auto b = encoder.forward(seven_phonemes());
  CHECK(a.embedding.values() == b.embedding.values());
  auto swapped = seven_phonemes();
  std::swap(swapped.symbols[0], swapped.symbols[1]);
  const auto c = encoder.forward(swapped);
  double diff = 0.0;
  for (int i = 0; i < c.embedding.size(); ++i) {
    diff += std::abs(c.embedding.data()[i] - a.embedding.data()[i]);
  }
  CHECK(diff > 1e-3);
  CHECK_THROWS_AS(encoder.forward(std::vector<int>{}), InvalidArgument);
  CHECK_THROWS_AS(encoder.forward(std::vector<int>{0, 9999}), VocabularyError);
}

TEST_CASE("durations from log values") {
  const auto seq = sequence_from_symbols({"sil", "HH", "AH0", "sp"});
  const std::vector<float> log_d = {std::log(3.0f), -5.0f, std::log(4.2f), -5.0f};
  const auto d = durations_from_log(log_d, seq);
  CHECK(d.frames_per_phoneme == std::vector<int>{3, 1, 4, 0});
  CHECK(d.total_frames == 8);

  // Adding ln 2 to every log duration doubles the total up to rounding.
  std::vector<float> base = {std::log(5.0f), std::log(7.0f), std::log(3.0f), std::log(9.0f)};
  std::vector<float> shifted = base;
  for (auto& v : shifted) v += static_cast<float>(std::numbers::ln2);
  const auto seq4 = sequence_from_symbols({"HH", "AH0", "L", "OW1"});
  CHECK(durations_from_log(shifted, seq4).total_frames ==
        2 * durations_from_log(base, seq4).total_frames);
  CHECK_THROWS_AS(durations_from_log(std::vector<float>{0.0f, 0.0f}, seq), InvalidArgument);
}

TEST_CASE("predicted durations respect the lower bound") {
  nn::Rng rng(3);
  const ModelConfig config = ModelConfig::desk();
  TextEncoder encoder(config, rng);
  DurationPredictor predictor(config, rng);
  const auto seq = phonemize("I didn't say you stole the money.");
  nn::NoGradGuard guard;
  const auto enc = encoder.forward(seq);
  const auto d = predict_durations(predictor, enc, seq);
  REQUIRE(d.frames_per_phoneme.size() == seq.size());
  for (std::size_t m = 0; m < seq.size(); ++m) {
    if (!PhonemeInventory::is_pause(seq.symbols[m])) CHECK(d.frames_per_phoneme[m] >= 1);
  }
}

TEST_CASE("duration predictor does not backpropagate into the encoder") {
  nn::Rng rng(4);
  const ModelConfig config = ModelConfig::desk();
  TextEncoder encoder(config, rng);
  DurationPredictor predictor(config, rng);
  const auto enc = encoder.forward(seven_phonemes());
  nn::sum(predictor.forward(enc)).backward();
  for (const auto& p : encoder.parameters()) CHECK_FALSE(p.has_grad());
  bool any = false;
  for (const auto& p : predictor.parameters()) any = any || p.has_grad();
  CHECK(any);
}

TEST_CASE("length regulation") {
  const auto x = nn::Tensor::from({3, 2}, {1, 10, 2, 20, 3, 30});
  const auto y = length_regulate(x, DurationAlignment::from_frames({2, 1, 3}));
  CHECK(y.shape() == nn::Shape{6, 2});
  CHECK(y.values() == std::vector<float>{1, 10, 1, 10, 2, 20, 3, 30, 3, 30, 3, 30});

  const auto id = length_regulate(x, DurationAlignment::from_frames({1, 1, 1}));
  CHECK(id.values() == x.values());

  const auto skip = length_regulate(x, DurationAlignment::from_frames({0, 2, 0}));
  CHECK(skip.values() == std::vector<float>{2, 20, 2, 20});

  CHECK_THROWS_WITH_AS(length_regulate(x, DurationAlignment::from_frames({0, 0, 0})),
                       "empty expansion", InvalidArgument);
  CHECK_THROWS_AS(length_regulate(x, DurationAlignment::from_frames({1, 1})),
                  InvalidArgument);
}

TEST_CASE("length regulation preserves column sums weighted by duration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> value(-1.0f, 1.0f);
  std::uniform_int_distribution<int> dur(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 9, c = 3;
    std::vector<float> v(static_cast<std::size_t>(m * c));
    for (auto& e : v) e = value(rng);
    std::vector<int> d(static_cast<std::size_t>(m));
    for (auto& e : d) e = dur(rng);
    d[0] += 1;
    const auto x = nn::Tensor::from({m, c}, v);
    const auto y = length_regulate(x, DurationAlignment::from_frames(d));
    for (int j = 0; j < c; ++j) {
      double expect = 0.0, got = 0.0;
      for (int i = 0; i < m; ++i) expect += d[i] * v[i * c + j];
      for (int t = 0; t < y.dim(0); ++t) got += y.data()[t * c + j];
      CHECK(got == doctest::Approx(expect).epsilon(1e-5));
    }
  }
}

TEST_CASE("alignment file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "sv_align_test.json";
  write_alignment_file(path, {{"HH", "AH0"}, {3, 5}});
  const auto a = read_alignment_file(path);
  CHECK(a.phonemes == std::vector<std::string>{"HH", "AH0"});
  CHECK(a.frames == std::vector<int>{3, 5});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_alignment_file(path), IoError);
}
