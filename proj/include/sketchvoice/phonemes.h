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

#ifndef SKETCHVOICE_PHONEMES_H_
#define SKETCHVOICE_PHONEMES_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sketchvoice {

inline constexpr std::string_view kSilence = "sil";
inline constexpr std::string_view kPause = "sp";

// ARPAbet with stress markers plus the silence and pause tokens. Ids are
// stable: they index embedding tables in saved checkpoints.
class PhonemeInventory {
 public:
  static const PhonemeInventory& instance();

  int size() const { return static_cast<int>(symbols_.size()); }
  bool contains(std::string_view symbol) const;
  // Throws VocabularyError for unknown symbols.
  int id(std::string_view symbol) const;
  const std::string& symbol(int id) const;

  static bool is_pause(std::string_view symbol);
  static bool is_vowel(std::string_view symbol);

 private:
  PhonemeInventory();
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

struct WordSpan {
  std::string word;
  int begin = 0;  // first phoneme index
  int end = 0;    // one past the last phoneme index
};

struct PhonemeSequence {
  std::vector<std::string> symbols;
  std::string source_text;
  // Phoneme ranges of the spoken words, in order; pauses belong to no word.
  std::vector<WordSpan> words;

  std::size_t size() const { return symbols.size(); }
  std::vector<int> ids() const;
};

// Pronunciation dictionary in CMUdict format ("word PH PH ..."), first
// variant wins.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon load(const std::filesystem::path& path);
  // CMUdict shipped with the project, or $SKETCHVOICE_CMUDICT when set.
  // Empty when neither is readable; lookups then fall back to rules.
  static const Lexicon& default_lexicon();

  const std::vector<std::string>* find(const std::string& word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

// Letter-to-sound rules for out-of-vocabulary words.
std::vector<std::string> letter_to_sound(const std::string& word);

// Deterministic grapheme-to-phoneme conversion: dictionary lookup with rule
// fallback, punctuation mapped to pause tokens. Throws InvalidArgument when
// the text contains nothing pronounceable.
PhonemeSequence phonemize(const std::string& text,
                          const Lexicon& lexicon = Lexicon::default_lexicon());

// Builds a sequence from explicit symbols (alignment files); words unknown.
PhonemeSequence sequence_from_symbols(const std::vector<std::string>& symbols,
                                      const std::string& source_text = "");

}  // namespace sketchvoice

#endif  // SKETCHVOICE_PHONEMES_H_
