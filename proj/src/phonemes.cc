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

#include "sketchvoice/phonemes.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {

constexpr std::array<std::string_view, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
constexpr std::array<std::string_view, 24> kConsonants = {
    "B",  "CH", "D", "DH", "F", "G",  "HH", "JH", "K", "L", "M",  "N",
    "NG", "P",  "R", "S",  "SH", "T", "TH", "V",  "W", "Y", "Z", "ZH"};

const std::array<std::string_view, 10> kDigits = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};

bool is_pause_punctuation(char c) {
  return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' ||
         c == '?' || c == '(' || c == ')' || c == '"';
}

}  // namespace

PhonemeInventory::PhonemeInventory() {
  symbols_.emplace_back(kSilence);
  symbols_.emplace_back(kPause);
  for (auto c : kConsonants) symbols_.emplace_back(c);
  for (auto v : kVowels) {
    for (char stress : {'0', '1', '2'}) symbols_.push_back(std::string(v) + stress);
  }
  for (int i = 0; i < size(); ++i) ids_[symbols_[i]] = i;
}

const PhonemeInventory& PhonemeInventory::instance() {
  static const PhonemeInventory inventory;
  return inventory;
}

bool PhonemeInventory::contains(std::string_view symbol) const {
  return ids_.count(std::string(symbol)) > 0;
}

int PhonemeInventory::id(std::string_view symbol) const {
  const auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) {
    throw VocabularyError("unknown phoneme '" + std::string(symbol) + "'");
  }
  return it->second;
}

const std::string& PhonemeInventory::symbol(int id) const {
  if (id < 0 || id >= size()) {
    throw VocabularyError("phoneme id " + std::to_string(id) + " out of range");
  }
  return symbols_[id];
}

bool PhonemeInventory::is_pause(std::string_view symbol) {
  return symbol == kSilence || symbol == kPause;
}

bool PhonemeInventory::is_vowel(std::string_view symbol) {
  if (symbol.size() < 3) return false;
  const std::string_view base = symbol.substr(0, symbol.size() - 1);
  return std::find(kVowels.begin(), kVowels.end(), base) != kVowels.end();
}

std::vector<int> PhonemeSequence::ids() const {
  const auto& inventory = PhonemeInventory::instance();
  std::vector<int> out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) out.push_back(inventory.id(s));
  return out;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon " + path.string());
  Lexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find(" #"); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word) || word.empty() || word[0] == ';') continue;
    if (const auto paren = word.find('('); paren != std::string::npos) {
      word.resize(paren);
    }
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lexicon.entries_.count(word)) continue;
    std::vector<std::string> phones;
    std::string phone;
    while (fields >> phone) {
      // CMUdict marks consonants without stress; vowels may lack it too.
      if (PhonemeInventory::instance().contains(phone)) {
        phones.push_back(phone);
      } else if (PhonemeInventory::instance().contains(phone + "0")) {
        phones.push_back(phone + "0");
      }
    }
    if (!phones.empty()) lexicon.entries_.emplace(word, std::move(phones));
  }
  return lexicon;
}

const Lexicon& Lexicon::default_lexicon() {
  static const Lexicon lexicon = [] {
    std::filesystem::path path;
    if (const char* env = std::getenv("SKETCHVOICE_CMUDICT")) {
      path = env;
    } else {
      path = std::filesystem::path(SKETCHVOICE_DATA_DIR) / "cmudict" / "cmudict.dict";
    }
    try {
      return Lexicon::load(path);
    } catch (const IoError&) {
      return Lexicon();
    }
  }();
  return lexicon;
}

const std::vector<std::string>* Lexicon::find(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> letter_to_sound(const std::string& word) {
  static const std::vector<std::pair<std::string_view, std::vector<std::string_view>>>
      kRules = {
          {"tch", {"CH"}}, {"sch", {"S", "K"}}, {"ch", {"CH"}}, {"sh", {"SH"}},
          {"th", {"TH"}},  {"ng", {"NG"}},      {"ph", {"F"}},  {"ck", {"K"}},
          {"wh", {"W"}},   {"qu", {"K", "W"}},  {"ee", {"IY"}}, {"ea", {"IY"}},
          {"oo", {"UW"}},  {"ou", {"AW"}},      {"ow", {"OW"}}, {"ai", {"EY"}},
          {"ay", {"EY"}},  {"oi", {"OY"}},      {"oy", {"OY"}}, {"au", {"AO"}},
          {"aw", {"AO"}},  {"igh", {"AY"}},     {"a", {"AE"}},  {"e", {"EH"}},
          {"i", {"IH"}},   {"o", {"AA"}},       {"u", {"AH"}},  {"y", {"IY"}},
          {"b", {"B"}},    {"c", {"K"}},        {"d", {"D"}},   {"f", {"F"}},
          {"g", {"G"}},    {"h", {"HH"}},       {"j", {"JH"}},  {"k", {"K"}},
          {"l", {"L"}},    {"m", {"M"}},        {"n", {"N"}},   {"p", {"P"}},
          {"q", {"K"}},    {"r", {"R"}},        {"s", {"S"}},   {"t", {"T"}},
          {"v", {"V"}},    {"w", {"W"}},        {"x", {"K", "S"}}, {"z", {"Z"}},
      };
  std::vector<std::string> out;
  bool stressed = false;
  std::size_t at = 0;
  while (at < word.size()) {
    // A word-final silent 'e' after a consonant is dropped.
    if (word[at] == 'e' && at + 1 == word.size() && at > 0 && !out.empty() &&
        !PhonemeInventory::is_vowel(out.back())) {
      break;
    }
    bool matched = false;
    for (const auto& [pattern, phones] : kRules) {
      if (word.compare(at, pattern.size(), pattern) != 0) continue;
      for (auto p : phones) {
        std::string phone(p);
        if (PhonemeInventory::instance().contains(phone + "1")) {
          // 'y' at the start of a word is the glide, not the vowel.
          if (pattern == "y" && at == 0) {
            phone = "Y";
          } else {
            phone += stressed ? "0" : "1";
            stressed = true;
          }
        }
        out.push_back(std::move(phone));
      }
      at += pattern.size();
      matched = true;
      break;
    }
    if (!matched) ++at;
  }
  return out;
}

PhonemeSequence phonemize(const std::string& text, const Lexicon& lexicon) {
  if (text.empty()) throw InvalidArgument("text is empty");
  PhonemeSequence seq;
  seq.source_text = text;
  auto push_pause = [&seq] {
    if (!seq.symbols.empty() && seq.symbols.back() != kPause) {
      seq.symbols.emplace_back(kPause);
    }
  };
  auto push_word = [&](const std::string& word) {
    std::vector<std::string> phones;
    if (const auto* entry = lexicon.find(word)) {
      phones = *entry;
    } else {
      std::string letters;
      for (char c : word) {
        if (c != '\'') letters.push_back(c);
      }
      phones = letter_to_sound(letters);
    }
    if (phones.empty()) return;
    WordSpan span{word, static_cast<int>(seq.symbols.size()), 0};
    seq.symbols.insert(seq.symbols.end(), phones.begin(), phones.end());
    span.end = static_cast<int>(seq.symbols.size());
    seq.words.push_back(std::move(span));
  };

  std::string word;
  auto flush = [&] {
    if (!word.empty()) push_word(word);
    word.clear();
  };
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalpha(c) || (c == '\'' && !word.empty())) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isdigit(c)) {
      flush();
      push_word(std::string(kDigits[c - '0']));
    } else {
      flush();
      if (is_pause_punctuation(raw)) push_pause();
    }
  }
  flush();
  if (seq.words.empty()) {
    throw InvalidArgument("text has no pronounceable content: '" + text + "'");
  }
  return seq;
}

PhonemeSequence sequence_from_symbols(const std::vector<std::string>& symbols,
                                      const std::string& source_text) {
  if (symbols.empty()) throw InvalidArgument("empty phoneme sequence");
  const auto& inventory = PhonemeInventory::instance();
  for (const auto& s : symbols) inventory.id(s);
  PhonemeSequence seq;
  seq.symbols = symbols;
  seq.source_text = source_text;
  return seq;
}

}  // namespace sketchvoice
