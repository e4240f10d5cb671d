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

#include "sketchvoice/dataset.h"

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "sketchvoice/archive.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/phonemes.h"
#include "sketchvoice/text_frontend.h"

namespace sketchvoice {

namespace {

constexpr const char* kCacheFormat = "sketchvoice-cache-3";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json frames_json(const FrameConfig& f) {
  return {{"sample_rate", f.sample_rate}, {"window_size", f.window_size},
          {"hop_size", f.hop_size},       {"fft_size", f.fft_size},
          {"mel_bins", f.mel_bins},       {"mel_fmin", f.mel_fmin},
          {"mel_fmax", f.mel_fmax}};
}

FrameConfig frames_from_json(const nlohmann::json& j) {
  FrameConfig f;
  f.sample_rate = j.at("sample_rate").get<int>();
  f.window_size = j.at("window_size").get<int>();
  f.hop_size = j.at("hop_size").get<int>();
  f.fft_size = j.at("fft_size").get<int>();
  f.mel_bins = j.at("mel_bins").get<int>();
  f.mel_fmin = j.at("mel_fmin").get<double>();
  f.mel_fmax = j.at("mel_fmax").get<double>();
  return f;
}

std::string content_hash(const ManifestEntry& entry, const FrameConfig& frames) {
  std::string blob = kCacheFormat;
  blob += '\0' + entry.transcript + '\0' + entry.split + '\0' + frames_json(frames).dump() + '\0';
  blob += read_file(entry.audio_path);
  blob += '\0';
  blob += read_file(entry.alignment_path);
  return sha256_hex(blob.data(), blob.size());
}

std::filesystem::path record_path(const std::filesystem::path& dir, const std::string& id) {
  return dir / (id + ".skva");
}

}  // namespace

DatasetManifest DatasetManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  const auto base = path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    ManifestEntry e;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      e.audio_path = j.at("audio_path").get<std::string>();
      e.transcript = j.at("transcript").get<std::string>();
      e.alignment_path = j.at("alignment_path").get<std::string>();
      if (j.contains("split")) e.split = j.at("split").get<std::string>();
      e.id = j.contains("id") ? j.at("id").get<std::string>()
                              : e.audio_path.stem().string();
      for (const char* key : {"id", "audio_path", "transcript", "alignment_path", "split"}) {
        j.erase(key);
      }
      e.extra = std::move(j);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
    if (e.split != "train" && e.split != "val" && e.split != "test") {
      throw ConfigError(where + ": unknown split '" + e.split + "'");
    }
    if (e.id.empty() || e.id.find('/') != std::string::npos) {
      throw ConfigError(where + ": invalid id '" + e.id + "'");
    }
    if (!ids.insert(e.id).second) throw ConfigError(where + ": duplicate id '" + e.id + "'");
    if (e.audio_path.is_relative()) e.audio_path = base / e.audio_path;
    if (e.alignment_path.is_relative()) e.alignment_path = base / e.alignment_path;
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.empty()) throw ConfigError(path.string() + ": empty manifest");
  return manifest;
}

std::vector<const ManifestEntry*> DatasetManifest::split(const std::string& name) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.split == name) out.push_back(&e);
  }
  return out;
}

// ---------------------------------------------------------------------------

void CacheRecord::save(const std::filesystem::path& path) const {
  Archive a;
  a.meta() = {{"format", kCacheFormat},
              {"id", id},
              {"split", split},
              {"transcript", transcript},
              {"content_hash", content_hash},
              {"extra", extra},
              {"phonemes", phonemes},
              {"durations", durations},
              {"frames", frames_json(f0.config)},
              {"pitch", pitch.values},
              {"energy", loudness.values},
              {"pitch_sketch", pitch_sketch.values},
              {"energy_sketch", energy_sketch.values}};
  a.put("mel", {static_cast<int>(mel.rows()), static_cast<int>(mel.cols())},
        std::vector<float>(mel.data(), mel.data() + mel.size()));
  a.put("f0", {static_cast<int>(f0.values.size())},
        std::vector<float>(f0.values.begin(), f0.values.end()));
  a.put("energy_frames", {static_cast<int>(energy.values.size())},
        std::vector<float>(energy.values.begin(), energy.values.end()));
  a.write(path);
}

CacheRecord CacheRecord::load(const std::filesystem::path& path) {
  const Archive a = Archive::read(path);
  const auto& m = a.meta();
  if (m.value("format", "") != kCacheFormat) {
    throw IoError(path.string() + " is not a cache record of this version");
  }
  CacheRecord r;
  try {
    r.id = m.at("id").get<std::string>();
    r.split = m.at("split").get<std::string>();
    r.transcript = m.at("transcript").get<std::string>();
    r.content_hash = m.at("content_hash").get<std::string>();
    r.extra = m.at("extra");
    r.phonemes = m.at("phonemes").get<std::vector<std::string>>();
    r.durations = m.at("durations").get<std::vector<int>>();
    const FrameConfig frames = frames_from_json(m.at("frames"));
    r.pitch = {m.at("pitch").get<std::vector<double>>(), ProsodyKind::kPitch};
    r.loudness = {m.at("energy").get<std::vector<double>>(), ProsodyKind::kEnergy};
    r.pitch_sketch = {m.at("pitch_sketch").get<std::vector<double>>(), ProsodyKind::kPitch};
    r.energy_sketch = {m.at("energy_sketch").get<std::vector<double>>(), ProsodyKind::kEnergy};
    const nn::Tensor& mel = a.get("mel");
    r.mel = Eigen::Map<const Matrix>(mel.data().data(), mel.dim(0), mel.dim(1));
    const auto& f0 = a.get("f0").values();
    const auto& en = a.get("energy_frames").values();
    r.f0 = {std::vector<double>(f0.begin(), f0.end()), ProsodyKind::kPitch, frames};
    r.energy = {std::vector<double>(en.begin(), en.end()), ProsodyKind::kEnergy, frames};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return r;
}

CacheRecord prepare_record(const ManifestEntry& entry, const FrameConfig& frames) {
  int rate = 0;
  const std::vector<float> audio = read_wav(entry.audio_path, &rate);
  if (rate != frames.sample_rate) {
    throw IoError(entry.audio_path.string() + ": sample rate " + std::to_string(rate) +
                  " differs from " + std::to_string(frames.sample_rate));
  }
  const AlignmentFile alignment = read_alignment_file(entry.alignment_path);
  for (const auto& s : alignment.phonemes) PhonemeInventory::instance().id(s);
  int total = 0;
  for (int d : alignment.frames) {
    if (d < 1) throw AlignmentError("alignment has a phoneme with no frames");
    total += d;
  }
  const Matrix mel = log_mel_spectrogram(audio, frames);
  if (total > mel.rows()) {
    throw AlignmentError("alignment covers " + std::to_string(total) + " frames but audio has " +
                         std::to_string(mel.rows()));
  }
  CacheRecord r;
  r.id = entry.id;
  r.split = entry.split;
  r.transcript = entry.transcript;
  r.extra = entry.extra;
  r.phonemes = alignment.phonemes;
  r.durations = alignment.frames;
  r.mel = mel.topRows(total);
  r.f0 = extract_f0(audio, frames);
  r.energy = extract_energy(audio, frames);
  r.pitch = pool_to_phoneme(r.f0, r.durations);
  interpolate_unvoiced(r.pitch);
  r.loudness = pool_to_phoneme(r.energy, r.durations);
  r.pitch_sketch = smooth_to_sketch(r.pitch);
  r.energy_sketch = smooth_to_sketch(r.loudness);
  return r;
}

IngestReport ingest_dataset(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& cache_dir,
                            const IngestOptions& options) {
  const DatasetManifest manifest = DatasetManifest::read(manifest_path);
  std::filesystem::create_directories(cache_dir);
  auto warn = options.warn ? options.warn
                           : [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };
  IngestReport report;
  nlohmann::json index = nlohmann::json::array();
  std::vector<ProsodyContour> train_pitch, train_energy;
  for (const ManifestEntry& entry : manifest.entries) {
    std::string reason;
    std::optional<CacheRecord> record;
    try {
      if (!std::filesystem::exists(entry.alignment_path)) {
        throw AlignmentError("missing alignment " + entry.alignment_path.string());
      }
      const std::string hash = content_hash(entry, options.frames);
      const auto path = record_path(cache_dir, entry.id);
      if (std::filesystem::exists(path)) {
        try {
          CacheRecord cached = CacheRecord::load(path);
          if (cached.content_hash == hash) {
            record = std::move(cached);
            ++report.reused;
          }
        } catch (const Error&) {
          // Unreadable record: rebuild it below.
        }
      }
      if (!record) {
        CacheRecord fresh = prepare_record(entry, options.frames);
        fresh.content_hash = hash;
        fresh.save(path);
        record = std::move(fresh);
        ++report.processed;
      }
    } catch (const std::exception& e) {
      reason = e.what();
    }
    if (!record) {
      warn("skipping " + entry.id + ": " + reason);
      report.skipped.emplace_back(entry.id, reason);
      continue;
    }
    index.push_back({{"id", entry.id}, {"split", entry.split},
                     {"file", record_path(cache_dir, entry.id).filename().string()}});
    if (entry.split == "train") {
      train_pitch.push_back(record->pitch);
      train_energy.push_back(record->loudness);
    }
  }
  const double skipped = static_cast<double>(report.skipped.size()) /
                         static_cast<double>(manifest.entries.size());
  if (skipped > options.max_skip_fraction) {
    throw IoError("ingest aborted: " + std::to_string(report.skipped.size()) + " of " +
                  std::to_string(manifest.entries.size()) + " entries failed");
  }
  if (train_pitch.empty()) throw IoError("ingest aborted: no usable train entries");
  report.stats.pitch = compute_stats(train_pitch, ProsodyKind::kPitch);
  report.stats.energy = compute_stats(train_energy, ProsodyKind::kEnergy);
  write_stats_file(cache_dir / "stats.json", report.stats);
  std::ofstream out(cache_dir / "index.json");
  if (!out) throw IoError("cannot write cache index");
  out << nlohmann::json{{"format", kCacheFormat},
                        {"frames", frames_json(options.frames)},
                        {"records", index}}
             .dump(1)
      << "\n";
  return report;
}

FeatureCache FeatureCache::load(const std::filesystem::path& cache_dir) {
  std::ifstream in(cache_dir / "index.json");
  if (!in) throw IoError("no feature cache at " + cache_dir.string() + " (run ingest first)");
  FeatureCache cache;
  try {
    const auto index = nlohmann::json::parse(in);
    if (index.at("format").get<std::string>() != kCacheFormat) {
      throw IoError("cache format mismatch; re-run ingest");
    }
    cache.frames = frames_from_json(index.at("frames"));
    for (const auto& r : index.at("records")) {
      cache.records.push_back(CacheRecord::load(cache_dir / r.at("file").get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cache index: " + std::string(e.what()));
  }
  cache.stats = read_stats_file(cache_dir / "stats.json");
  return cache;
}

std::vector<const CacheRecord*> FeatureCache::split(const std::string& name) const {
  std::vector<const CacheRecord*> out;
  for (const auto& r : records) {
    if (r.split == name) out.push_back(&r);
  }
  return out;
}

}  // namespace sketchvoice
