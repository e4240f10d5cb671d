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

#include "sketchvoice/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include "json.hpp"
#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {

constexpr double kPi = std::numbers::pi;

struct Articulation {
  double f1 = 500, f2 = 1500, f3 = 2500;
  double voice = 0.0;         // harmonic gain
  double noise = 0.0;         // band noise gain
  double noise_hz = 4000.0;
  bool stop = false;          // closure followed by a burst
  int frames = 6;
};

Articulation vowel(double f1, double f2, double f3) {
  Articulation a;
  a.f1 = f1;
  a.f2 = f2;
  a.f3 = f3;
  a.voice = 1.0;
  a.frames = 9;
  return a;
}

Articulation voiced(double f1, double f2, double f3, double gain) {
  Articulation a = vowel(f1, f2, f3);
  a.voice = gain;
  a.frames = 6;
  return a;
}

Articulation fricative(double hz, double gain, double voice = 0.0) {
  Articulation a;
  a.f1 = 300;
  a.f2 = 1500;
  a.f3 = 2500;
  a.noise = gain;
  a.noise_hz = hz;
  a.voice = voice;
  a.frames = 7;
  return a;
}

Articulation stop(double hz, bool voiced_stop) {
  Articulation a = fricative(hz, 0.25, voiced_stop ? 0.06 : 0.0);
  a.stop = true;
  a.frames = 6;
  return a;
}

const std::map<std::string, Articulation>& articulations() {
  static const std::map<std::string, Articulation> table = {
      {"AA", vowel(730, 1090, 2440)}, {"AE", vowel(660, 1720, 2410)},
      {"AH", vowel(640, 1190, 2390)}, {"AO", vowel(570, 840, 2410)},
      {"AW", vowel(700, 1200, 2500)}, {"AY", vowel(700, 1500, 2550)},
      {"EH", vowel(530, 1840, 2480)}, {"ER", vowel(490, 1350, 1690)},
      {"EY", vowel(480, 2000, 2600)}, {"IH", vowel(390, 1990, 2550)},
      {"IY", vowel(270, 2290, 3010)}, {"OW", vowel(500, 900, 2400)},
      {"OY", vowel(550, 1000, 2400)}, {"UH", vowel(440, 1020, 2240)},
      {"UW", vowel(300, 870, 2240)},
      {"M", voiced(280, 1100, 2400, 0.45)}, {"N", voiced(280, 1500, 2600, 0.45)},
      {"NG", voiced(280, 2000, 2700, 0.45)}, {"L", voiced(360, 1300, 2900, 0.65)},
      {"R", voiced(420, 1300, 1600, 0.65)}, {"W", voiced(300, 700, 2200, 0.6)},
      {"Y", voiced(280, 2200, 2900, 0.6)},
      {"V", fricative(4000, 0.12, 0.3)}, {"DH", fricative(4500, 0.1, 0.3)},
      {"Z", fricative(5500, 0.2, 0.3)}, {"ZH", fricative(3000, 0.2, 0.3)},
      {"F", fricative(5000, 0.12)}, {"TH", fricative(5000, 0.1)},
      {"S", fricative(6000, 0.3)}, {"SH", fricative(3000, 0.3)},
      {"HH", fricative(1500, 0.12)}, {"CH", fricative(3500, 0.3)},
      {"JH", fricative(3000, 0.25, 0.25)},
      {"P", stop(1000, false)}, {"T", stop(4500, false)}, {"K", stop(2500, false)},
      {"B", stop(1000, true)}, {"D", stop(4000, true)}, {"G", stop(2500, true)},
  };
  return table;
}

std::string base_symbol(const std::string& symbol) {
  if (!symbol.empty() && std::isdigit(static_cast<unsigned char>(symbol.back()))) {
    return symbol.substr(0, symbol.size() - 1);
  }
  return symbol;
}

struct FrameParams {
  double f0, voice, noise, noise_hz, f1, f2, f3;
};

// Band-pass biquad with centre frequency updated per frame.
class BandNoise {
 public:
  BandNoise(int rate, std::uint64_t seed) : rate_(rate), rng_(seed) {}
  double next(double centre_hz) {
    if (centre_hz != centre_) set_centre(centre_hz);
    const double x = dist_(rng_);
    const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  void set_centre(double hz) {
    centre_ = hz;
    const double w = 2.0 * kPi * std::min(hz, 0.45 * rate_) / rate_;
    const double alpha = std::sin(w) / (2.0 * 1.5);
    const double a0 = 1.0 + alpha;
    b0_ = alpha / a0;
    b2_ = -alpha / a0;
    a1_ = -2.0 * std::cos(w) / a0;
    a2_ = (1.0 - alpha) / a0;
  }

  int rate_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
  double centre_ = -1.0;
  double b0_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

double envelope(double f, const FrameParams& p) {
  auto peak = [f](double centre, double width) {
    const double u = (f - centre) / width;
    return 1.0 / (1.0 + u * u);
  };
  const double tilt = 1.0 / (1.0 + f / 400.0);
  return tilt * (peak(p.f1, 90.0) + 0.7 * peak(p.f2, 120.0) + 0.4 * peak(p.f3, 160.0) + 0.02);
}

}  // namespace

const std::vector<CorpusSentence>& micro_corpus_sentences() {
  static const std::vector<CorpusSentence> sentences = {
      {"I didn't say you stole the money.", {0, 2, 4, 6}},
      {"She bought a red car yesterday.", {0, 1, 3, 5}},
      {"We will meet at noon today.", {0, 2, 4, 5}},
      {"Nobody told him about the plan.", {0, 1, 2, 5}},
  };
  return sentences;
}

CorpusClip render_clip(const std::string& text, int emphasized_word,
                       const CorpusOptions& options, std::uint64_t variation) {
  const PhonemeSequence seq = phonemize(text);
  if (emphasized_word < 0 || emphasized_word >= static_cast<int>(seq.words.size())) {
    throw InvalidArgument("emphasised word index out of range");
  }
  const WordSpan& focus = seq.words[static_cast<std::size_t>(emphasized_word)];
  std::mt19937_64 rng(options.seed * 7919 + variation);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);

  // Durations.
  std::vector<int> frames(seq.size());
  for (std::size_t m = 0; m < seq.size(); ++m) {
    const std::string& s = seq.symbols[m];
    double d;
    if (PhonemeInventory::is_pause(s)) {
      d = 10;
    } else {
      const auto it = articulations().find(base_symbol(s));
      if (it == articulations().end()) throw VocabularyError("no articulation for " + s);
      d = it->second.frames;
      if (s.back() == '1') d += 1;
      if (s.back() == '0') d -= 2;
    }
    if (static_cast<int>(m) >= focus.begin && static_cast<int>(m) < focus.end) d *= 1.4;
    frames[m] = std::max(1, static_cast<int>(std::lround(d + 0.4 * jitter(rng))));
  }
  int total = 0;
  for (int f : frames) total += f;

  // Frame-level targets.
  int focus_first = 0, focus_last = 0, focus_vowel = -1;
  {
    int t = 0;
    for (int m = 0; m < static_cast<int>(seq.size()); ++m) {
      if (m == focus.begin) focus_first = t;
      if (m >= focus.begin && m < focus.end && focus_vowel < 0 &&
          PhonemeInventory::is_vowel(seq.symbols[m])) {
        focus_vowel = t + frames[m] / 2;
      }
      t += frames[m];
      if (m == focus.end - 1) focus_last = t;
    }
    if (focus_vowel < 0) focus_vowel = (focus_first + focus_last) / 2;
  }
  const double base_hz = 180.0 * (1.0 + 0.02 * jitter(rng));
  const double peak_hz = 125.0 * (1.0 + 0.03 * jitter(rng));
  const double half_width = std::max(4.0, (focus_last - focus_first) / 2.0 + 2.0);

  std::vector<FrameParams> params(static_cast<std::size_t>(total));
  {
    int t = 0;
    for (std::size_t m = 0; m < seq.size(); ++m) {
      const std::string& s = seq.symbols[m];
      const bool pause = PhonemeInventory::is_pause(s);
      Articulation a;
      if (!pause) a = articulations().at(base_symbol(s));
      const bool in_focus = static_cast<int>(m) >= focus.begin && static_cast<int>(m) < focus.end;
      const double loud = in_focus ? 1.8 : 1.0;
      for (int k = 0; k < frames[m]; ++k, ++t) {
        const double pos = static_cast<double>(t) / total;
        const double u = (t - focus_vowel) / half_width;
        const double bump = std::abs(u) < 1.0 ? 0.5 * (1.0 + std::cos(kPi * u)) : 0.0;
        FrameParams& p = params[static_cast<std::size_t>(t)];
        p.f0 = base_hz - 35.0 * pos + peak_hz * bump;
        p.f1 = a.f1;
        p.f2 = a.f2;
        p.f3 = a.f3;
        const double decl = 1.0 - 0.3 * pos;
        p.voice = pause ? 0.0 : a.voice * loud * decl;
        p.noise = pause ? 0.0 : a.noise * loud * decl;
        p.noise_hz = a.noise_hz;
        if (a.stop) {
          // Closure for the first 60% of the segment, then the burst.
          const bool closure = k < (frames[m] * 3) / 5;
          p.noise = closure ? 0.0 : p.noise;
        }
      }
    }
  }

  const FrameConfig& cfg = options.frames;
  const int hop = cfg.hop_size, rate = cfg.sample_rate;
  std::vector<float> audio(static_cast<std::size_t>(total) * hop);
  BandNoise noise(rate, options.seed ^ (variation * 0x9e3779b97f4a7c15ull));
  std::normal_distribution<double> floor_noise(0.0, 3e-5);
  constexpr int kMaxHarmonics = 64;
  std::vector<double> phase(kMaxHarmonics, 0.0);
  FrameParams cur{};
  for (std::size_t n = 0; n < audio.size(); ++n) {
    // Linear interpolation between frame centres.
    const double pos = (static_cast<double>(n) + 0.5) / hop - 0.5;
    const int i0 = std::clamp(static_cast<int>(std::floor(pos)), 0, total - 1);
    const int i1 = std::min(i0 + 1, total - 1);
    const double w = std::clamp(pos - i0, 0.0, 1.0);
    const FrameParams& a = params[static_cast<std::size_t>(i0)];
    const FrameParams& b = params[static_cast<std::size_t>(i1)];
    auto mix = [w](double x, double y) { return x + w * (y - x); };
    cur.f0 = mix(a.f0, b.f0);
    cur.voice = mix(a.voice, b.voice);
    cur.noise = mix(a.noise, b.noise);
    cur.noise_hz = a.noise_hz;
    cur.f1 = mix(a.f1, b.f1);
    cur.f2 = mix(a.f2, b.f2);
    cur.f3 = mix(a.f3, b.f3);
    double sample = 0.0;
    for (int h = 1; h <= kMaxHarmonics; ++h) {
      const double f = h * cur.f0;
      phase[h - 1] = std::fmod(phase[h - 1] + 2.0 * kPi * f / rate, 2.0 * kPi);
      if (f > 7500.0 || cur.voice <= 0.0) continue;
      sample += envelope(f, cur) * std::sin(phase[h - 1]);
    }
    sample *= 0.12 * cur.voice;
    sample += 0.02 * cur.noise * noise.next(cur.noise_hz);
    audio[n] = static_cast<float>(sample + floor_noise(rng));
  }
  float peak = 0.0f;
  for (float s : audio) peak = std::max(peak, std::abs(s));
  if (peak > 0.7f) {
    for (float& s : audio) s *= 0.7f / peak;
  }

  CorpusClip clip;
  clip.text = text;
  clip.emphasized_word = emphasized_word;
  clip.audio = std::move(audio);
  clip.alignment.phonemes = seq.symbols;
  clip.alignment.frames = frames;
  clip.f0.reserve(params.size());
  for (const FrameParams& p : params) clip.f0.push_back(p.voice > 0.0 ? p.f0 : 0.0);
  return clip;
}

std::vector<CorpusClip> generate_micro_corpus(const CorpusOptions& options) {
  std::vector<CorpusClip> clips;
  const auto& sentences = micro_corpus_sentences();
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (int word : sentences[s].emphasis_words) {
      CorpusClip clip = render_clip(sentences[s].text, word, options, clips.size());
      clip.id = "s" + std::to_string(s) + "_w" + std::to_string(word);
      clip.split = "train";
      clips.push_back(std::move(clip));
    }
  }
  for (int i = 0; i < options.test_clips; ++i) {
    const auto& sentence = sentences[static_cast<std::size_t>(i) % sentences.size()];
    const int word = sentence.emphasis_words[static_cast<std::size_t>(i) %
                                             sentence.emphasis_words.size()];
    CorpusClip clip = render_clip(sentence.text, word, options, 1000 + i);
    clip.id = "test" + std::to_string(i) + "_s" + std::to_string(i % sentences.size()) +
              "_w" + std::to_string(word);
    clip.split = "test";
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::filesystem::path write_micro_corpus(const std::filesystem::path& dir,
                                         const CorpusOptions& options) {
  std::filesystem::create_directories(dir / "wavs");
  std::filesystem::create_directories(dir / "alignments");
  const auto manifest = dir / "manifest.jsonl";
  std::ofstream out(manifest);
  if (!out) throw IoError("cannot write " + manifest.string());
  for (const CorpusClip& clip : generate_micro_corpus(options)) {
    const std::string wav = "wavs/" + clip.id + ".wav";
    const std::string align = "alignments/" + clip.id + ".json";
    write_wav(dir / wav, clip.audio, options.frames.sample_rate);
    write_alignment_file(dir / align, clip.alignment);
    out << nlohmann::json{{"id", clip.id},
                          {"audio_path", wav},
                          {"transcript", clip.text},
                          {"alignment_path", align},
                          {"split", clip.split},
                          {"emphasized_word", clip.emphasized_word}}
               .dump()
        << "\n";
  }
  return manifest;
}

}  // namespace sketchvoice
