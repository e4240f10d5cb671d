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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& root() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sketchvoice_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the tool with `args`, output discarded; returns the exit status.
int run(const std::string& args) {
  const std::string cmd = std::string("\"") + SKETCHVOICE_CLI + "\" " + args + " > \"" +
                          (root() / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string path(const std::string& name) { return "\"" + (root() / name).string() + "\""; }

// corpus -> cache -> vae -> ldm with a handful of steps.
void pipeline() {
  static bool done = false;
  if (done) return;
  REQUIRE(run("make-corpus --out " + path("corpus")) == 0);
  REQUIRE(run("ingest --manifest " + path("corpus/manifest.jsonl") + " --cache " + path("cache")) == 0);
  REQUIRE(run("train-vae --cache " + path("cache") + " --out " + path("vae.skva") +
              " --set steps=3 --set batch_size=2") == 0);
  REQUIRE(run("train-ldm --cache " + path("cache") + " --vae " + path("vae.skva") + " --out " +
              path("ldm.skva") + " --set steps=3 --set batch_size=2") == 0);
  done = true;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("synthesize --text hi") == 2);
  CHECK(run("ingest --manifest x --cache y --frobnicate") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("synthesize --help") == 0);
}

TEST_CASE("runtime failures exit 1 with a message") {
  pipeline();
  CHECK(run("train-vae --cache " + path("cache") + " --out " + path("x.skva") + " --set bogus=1") ==
        1);
  CHECK(slurp(root() / "last.log").find("bogus") != std::string::npos);
  CHECK(run("synthesize --model " + path("ldm.skva") + " --text hi --out " + path("x.wav") +
            " --polyline '{\"points\": [[0, 0], [0.6, 1], [0.4, 0]]}'") == 1);
  CHECK(slurp(root() / "last.log").find("points[2].x") != std::string::npos);
  CHECK(run("evaluate --model " + path("vae.skva") + " --cache " + path("cache")) == 1);
}

TEST_CASE("same seed twice gives byte-identical wavs") {
  pipeline();
  const std::string base = "synthesize --model " + path("ldm.skva") + " --text hello --seed 7 --steps 3";
  REQUIRE(run(base + " --out " + path("h1.wav")) == 0);
  REQUIRE(run(base + " --out " + path("h2.wav")) == 0);
  const std::string a = slurp(root() / "h1.wav");
  CHECK(a.size() > 44);
  CHECK(a == slurp(root() / "h2.wav"));
}

TEST_CASE("extracted sketch drives synthesis and the report has adherence") {
  pipeline();
  REQUIRE(run("extract-sketch --audio " + path("corpus/wavs/s0_w4.wav") + " --alignment " +
              path("corpus/alignments/s0_w4.json") + " --out " + path("s.json")) == 0);
  REQUIRE(run("synthesize --model " + path("ldm.skva") +
              " --text \"I didn't say you stole the money.\" --sketch " + path("s.json") +
              " --steps 3 --out " + path("s.wav") + " --report " + path("s_report.json")) == 0);
  const json r = json::parse(slurp(root() / "s_report.json"));
  const std::size_t m = r.at("phonemes").size();
  CHECK(r.at("pitch_sketch").size() == m);
  CHECK(r.at("realized_pitch_hz").size() == m);
  CHECK(r.contains("pitch_adherence"));
  CHECK(fs::file_size(root() / "s.wav") > 44);
}

TEST_CASE("evaluate writes RMSE fields") {
  pipeline();
  REQUIRE(run("evaluate --model " + path("ldm.skva") + " --cache " + path("cache") +
              " --steps 2 --gl-iterations 4 --out " + path("eval.json")) == 0);
  const json r = json::parse(slurp(root() / "eval.json"));
  const json& agg = r.at("aggregate");
  CHECK(agg.at("count") == 4);
  CHECK(agg.at("pitch_rmse_hz").get<double>() >= 0.0);
  CHECK(agg.at("energy_rmse_db").get<double>() >= 0.0);
  CHECK(r.at("utterances").size() == 4);
}
