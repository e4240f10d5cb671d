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

#ifndef SKETCHVOICE_DATASET_H_
#define SKETCHVOICE_DATASET_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/audio.h"
#include "sketchvoice/prosody.h"

namespace sketchvoice {

// One JSON line per utterance. Relative paths resolve against the manifest
// directory. Unknown keys are kept in `extra`.
struct ManifestEntry {
  std::string id;
  std::filesystem::path audio_path;
  std::string transcript;
  std::filesystem::path alignment_path;
  std::string split = "train";  // train | val | test
  nlohmann::json extra = nlohmann::json::object();
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  // Throws ConfigError on malformed lines, duplicate ids or unknown splits.
  static DatasetManifest read(const std::filesystem::path& path);
  std::vector<const ManifestEntry*> split(const std::string& name) const;
};

// Everything training and evaluation need for one utterance.
struct CacheRecord {
  std::string id;
  std::string split;
  std::string transcript;
  std::string content_hash;
  nlohmann::json extra = nlohmann::json::object();
  std::vector<std::string> phonemes;
  std::vector<int> durations;  // frames per phoneme, sums to mel rows
  Matrix mel;                  // T x F log-mel
  FrameSeries f0;
  FrameSeries energy;
  ProsodyContour pitch;        // Hz per phoneme, unvoiced interpolated
  ProsodyContour loudness;     // dB per phoneme
  ProsodySketch pitch_sketch;
  ProsodySketch energy_sketch;

  void save(const std::filesystem::path& path) const;
  static CacheRecord load(const std::filesystem::path& path);
};

// Feature extraction for one utterance; throws on unreadable or
// inconsistent input.
CacheRecord prepare_record(const ManifestEntry& entry, const FrameConfig& frames);

struct IngestOptions {
  FrameConfig frames;
  // Abort when more than this fraction of entries is skipped.
  double max_skip_fraction = 0.10;
  std::function<void(const std::string&)> warn;
};

struct IngestReport {
  int processed = 0;
  int reused = 0;
  std::vector<std::pair<std::string, std::string>> skipped;  // id, reason
  StatsPair stats;
};

// Writes <cache>/<id>.skva per utterance plus <cache>/index.json and
// <cache>/stats.json. Records whose content hash is unchanged are reused.
// Throws IoError when too many entries fail.
IngestReport ingest_dataset(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& cache_dir,
                            const IngestOptions& options = {});

struct FeatureCache {
  FrameConfig frames;
  StatsPair stats;
  std::vector<CacheRecord> records;

  static FeatureCache load(const std::filesystem::path& cache_dir);
  std::vector<const CacheRecord*> split(const std::string& name) const;
};

}  // namespace sketchvoice

#endif  // SKETCHVOICE_DATASET_H_
