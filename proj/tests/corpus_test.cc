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
#include <numeric>
#include <set>

#include "doctest.h"
#include "sketchvoice/corpus.h"
#include "sketchvoice/evaluation.h"
#include "sketchvoice/phonemes.h"
#include "sketchvoice/synthesis.h"

using namespace sketchvoice;

namespace {

const std::vector<CorpusClip>& corpus() {
  static const std::vector<CorpusClip> clips = generate_micro_corpus();
  return clips;
}

}  // namespace

TEST_CASE("micro corpus layout") {
  const auto& clips = corpus();
  REQUIRE(clips.size() == 20u);
  std::set<std::string> ids;
  int train = 0;
  for (const auto& c : clips) {
    ids.insert(c.id);
    train += c.split == "train";
    const int frames = std::accumulate(c.alignment.frames.begin(), c.alignment.frames.end(), 0);
    CHECK(c.audio.size() == static_cast<std::size_t>(frames) * 256);
    CHECK(c.f0.size() == static_cast<std::size_t>(frames));
    CHECK(c.alignment.phonemes.size() == c.alignment.frames.size());
    CHECK(c.alignment.phonemes == phonemize(c.text).symbols);
    float peak = 0.0f;
    for (float s : c.audio) peak = std::max(peak, std::abs(s));
    CHECK(peak <= 0.7f + 1e-6f);
    CHECK(peak > 0.1f);
  }
  CHECK(ids.size() == clips.size());
  CHECK(train == 16);
  CHECK(clips.front().text == "I didn't say you stole the money.");
}

TEST_CASE("rendering is deterministic") {
  const CorpusOptions opt;
  const CorpusClip a = render_clip("We will meet at noon today.", 2, opt, 3);
  const CorpusClip b = render_clip("We will meet at noon today.", 2, opt, 3);
  const CorpusClip c = render_clip("We will meet at noon today.", 2, opt, 4);
  CHECK(a.audio == b.audio);
  CHECK(a.audio != c.audio);
}

TEST_CASE("emphasised word carries the source pitch peak and extra length") {
  for (const auto& c : corpus()) {
    const PhonemeSequence seq = phonemize(c.text);
    FrameSeries truth;
    truth.values = c.f0;
    const ProsodyContour p = realized_contour(truth, c.alignment.frames);
    const auto top = std::max_element(p.values.begin(), p.values.end()) - p.values.begin();
    const WordSpan& w = seq.words[static_cast<std::size_t>(c.emphasized_word)];
    CHECK_MESSAGE((top >= w.begin && top < w.end), c.id);
  }
  // the same sentence is longer when a word is emphasised than its
  // neutral phoneme timing alone would give
  const auto& s = micro_corpus_sentences()[0];
  const CorpusOptions opt;
  const CorpusClip a = render_clip(s.text, s.emphasis_words[0], opt, 0);
  const CorpusClip b = render_clip(s.text, s.emphasis_words[3], opt, 0);
  const WordSpan w = phonemize(s.text).words[static_cast<std::size_t>(s.emphasis_words[0])];
  int in_a = 0, in_b = 0;
  for (int m = w.begin; m < w.end; ++m) {
    in_a += a.alignment.frames[m];
    in_b += b.alignment.frames[m];
  }
  CHECK(in_a > in_b);
}

TEST_CASE("pitch tracker follows the source pitch of clean clips") {
  double total = 0.0;
  int n = 0;
  for (const auto& c : corpus()) {
    FrameSeries truth;
    truth.values = c.f0;
    const ProsodyContour ref = realized_contour(truth, c.alignment.frames);
    const ProsodyContour got = realized_contour(extract_f0(c.audio, FrameConfig{}), c.alignment.frames);
    total += rmse_contour(got, ref);
    ++n;
  }
  MESSAGE("mean phoneme pitch error " << total / n << " Hz");
  CHECK(total / n < 10.0);
}
