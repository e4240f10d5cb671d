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

#ifndef SKETCHVOICE_CORPUS_H_
#define SKETCHVOICE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sketchvoice/audio.h"
#include "sketchvoice/text_frontend.h"

namespace sketchvoice {

// Source-filter rendering of sentences with one emphasised word each. The
// emphasised word gets a pitch peak, extra loudness and lengthening, so the
// same text appears with several distinct prosodies.
struct CorpusOptions {
  FrameConfig frames;
  std::uint64_t seed = 20260601;
  // Number of held-out re-renderings placed in the test split.
  int test_clips = 4;
};

struct CorpusSentence {
  std::string text;
  std::vector<int> emphasis_words;  // word indices, one clip each
};

// Four sentences with four emphasis variants each; the first is the
// "I didn't say you stole the money" probe sentence.
const std::vector<CorpusSentence>& micro_corpus_sentences();

struct CorpusClip {
  std::string id;
  std::string text;
  int emphasized_word = 0;
  std::string split;
  std::vector<float> audio;
  AlignmentFile alignment;
  // Source pitch per frame (Hz), 0 where the voice source is off.
  std::vector<double> f0;
};

// Renders a single clip. `variation` perturbs noise and micro-prosody.
CorpusClip render_clip(const std::string& text, int emphasized_word,
                       const CorpusOptions& options, std::uint64_t variation);

std::vector<CorpusClip> generate_micro_corpus(const CorpusOptions& options = {});

// Writes wavs/, alignments/ and manifest.jsonl under `dir`; returns the
// manifest path.
std::filesystem::path write_micro_corpus(const std::filesystem::path& dir,
                                         const CorpusOptions& options = {});

}  // namespace sketchvoice

#endif  // SKETCHVOICE_CORPUS_H_
