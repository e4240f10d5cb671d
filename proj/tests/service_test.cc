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


#include <cmath>
#include <future>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/service.h"
// After Eigen: <resolv.h> defines a _res macro.
#include "httplib.h"

using namespace sketchvoice;
using nlohmann::json;

namespace {

std::shared_ptr<const Synthesizer> tiny_synth() {
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
  c.sampling_steps = 3;
  auto m = std::make_shared<Model>(c, 11);
  m->stage = "ldm";
  m->contour_stats.pitch = {200.0, 40.0, 80.0, 400.0, ProsodyKind::kPitch};
  m->contour_stats.energy = {-30.0, 10.0, -80.0, -5.0, ProsodyKind::kEnergy};
  return std::make_shared<Synthesizer>(m, std::make_shared<GriffinLimVocoder>(c.frames, 2));
}

const std::string kRequest =
    R"({"text": "She bought a red car.", "seed": 3,
        "sketch": {"kind": "pitch", "points": [[0, 0.2], [0.5, 1.0], [1, 0.1]]}})";

// Reference decoder for the base64 alphabet of RFC 4648.
std::string unbase64(const std::string& s) {
  const std::string alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  unsigned bits = 0;
  int count = 0;
  for (char ch : s) {
    if (ch == '=') break;
    bits = (bits << 6) | static_cast<unsigned>(alphabet.find(ch));
    count += 6;
    if (count >= 8) {
      count -= 8;
      out.push_back(static_cast<char>((bits >> count) & 0xff));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("service config keys") {
  const ServiceConfig c = ServiceConfig::from_json(
      {{"port", 9000}, {"max_concurrent_synthesis", 3}, {"host", "0.0.0.0"}});
  CHECK(c.port == 9000);
  CHECK(c.max_concurrent_synthesis == 3);
  CHECK(ServiceConfig::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_THROWS_AS(ServiceConfig::from_json({{"max_concurrent_synthesis", 0}}), ConfigError);
  CHECK_THROWS_AS(ServiceConfig::from_json({{"workers", 2}}), ConfigError);
  CHECK_THROWS_AS(ServiceConfig::from_json({{"port", "x"}}), ConfigError);
}

TEST_CASE("no model: health reports it and synthesis is 503") {
  SynthesisService s(nullptr, {});
  const ServiceReply h = s.health();
  CHECK(h.status == 200);
  CHECK(h.json().at("model_loaded") == false);
  CHECK(s.synthesize(kRequest, false).status == 503);
  // The front end needs no weights.
  CHECK(s.phonemize(R"({"text": "hello"})").status == 200);
}

TEST_CASE("phonemize reply") {
  SynthesisService s(tiny_synth(), {});
  const ServiceReply r = s.phonemize(R"({"text": "She bought a red car."})");
  REQUIRE(r.status == 200);
  const json j = r.json();
  CHECK(j.at("M") == j.at("phonemes").size());
  CHECK(j.at("words").size() == 5);
  CHECK(j.at("words")[3].at("word") == "red");

  CHECK(s.phonemize("{").status == 400);
  const ServiceReply missing = s.phonemize(R"({"txt": "hello"})");
  CHECK(missing.status == 400);
  CHECK(missing.json().at("error").at("field") == "text");
  CHECK(s.phonemize(R"({"text": 5})").json().at("error").at("field") == "text");
  CHECK(s.phonemize(R"({"text": "..."})").status == 400);
}

TEST_CASE("malformed requests are 400 with the field named") {
  SynthesisService s(tiny_synth(), {});
  auto field_of = [&](const std::string& body) {
    const ServiceReply r = s.synthesize(body, false);
    CHECK(r.status == 400);
    return r.json().at("error").value("field", std::string());
  };
  const ServiceReply back = s.synthesize(
      R"({"text": "hello there", "sketch": {"points": [[0, 0], [0.6, 1], [0.4, 0.5]]}})", false);
  CHECK(back.status == 400);
  CHECK(back.json().at("error").at("field") == "sketch");
  CHECK(back.json().at("error").at("message").get<std::string>().find("points[2].x") !=
        std::string::npos);
  CHECK(field_of(R"({"text": "hi", "sketch": {"points": [[0, 0], [1, 1.5]]}})") == "sketch");
  CHECK(field_of(R"({"text": "hi", "sketch": {"points": [[0, 0]]}})") == "sketch");
  CHECK(field_of(R"({"text": "hi", "sketch": {"kind": "tempo", "points": [[0, 0], [1, 1]]}})") ==
        "sketch");
  CHECK(field_of(R"({"text": "hi", "steps": 0})") == "steps");
  CHECK(field_of(R"({"text": "hi", "seed": -1})") == "seed");
  CHECK(field_of(R"({"text": "hi", "sampler": "euler"})") == "sampler");
  CHECK(field_of(R"({"sketch": null})") == "text");
}

TEST_CASE("binary and base64 replies agree and match the phoneme count") {
  SynthesisService s(tiny_synth(), {});
  const std::size_t m = s.phonemize(kRequest).json().at("M").get<std::size_t>();

  const ServiceReply bin = s.synthesize(kRequest, false);
  REQUIRE(bin.status == 200);
  CHECK(bin.content_type == "audio/wav");
  const json pitch = json::parse(bin.headers.at("X-Realized-Pitch"));
  const json spans = json::parse(bin.headers.at("X-Phoneme-Spans"));
  CHECK(pitch.size() == m);
  CHECK(json::parse(bin.headers.at("X-Realized-Energy")).size() == m);
  REQUIRE(spans.size() == m);
  CHECK(spans[0].at("start") == 0.0);
  for (std::size_t i = 1; i < m; ++i) CHECK(spans[i].at("start") == spans[i - 1].at("end"));
  int rate = 0;
  const std::vector<float> audio = decode_wav(bin.body, &rate);
  CHECK(rate == 22050);
  CHECK(audio.size() == static_cast<std::size_t>(std::lround(
                            spans.back().at("end").get<double>() * 22050)));

  const ServiceReply b64 = s.synthesize(kRequest, true);
  REQUIRE(b64.status == 200);
  const json j = b64.json();
  CHECK(j.at("M") == m);
  CHECK(j.at("realized_pitch") == pitch);
  CHECK(j.at("phoneme_spans") == spans);
  CHECK(unbase64(j.at("audio").get<std::string>()) == bin.body);
}

TEST_CASE("same request and seed give identical realized pitch") {
  SynthesisService s(tiny_synth(), {});
  const json a = s.synthesize(kRequest, true).json();
  const json b = s.synthesize(kRequest, true).json();
  CHECK(a.at("realized_pitch") == b.at("realized_pitch"));
  CHECK(a.at("audio") == b.at("audio"));
}

TEST_CASE("over http with concurrent clients") {
  ServiceConfig config;
  config.max_concurrent_synthesis = 2;
  SynthesisService s(tiny_synth(), config);
  const int port = s.start_background();
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body).at("model_loaded") == true);

  auto ph = client.Post("/v1/phonemize", R"({"text": "She bought a red car."})",
                        "application/json");
  REQUIRE(ph);
  const std::size_t m = json::parse(ph->body).at("M").get<std::size_t>();

  std::vector<std::future<std::string>> pending;
  for (int i = 0; i < 4; ++i) {
    pending.push_back(std::async(std::launch::async, [port] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(120, 0);
      auto r = c.Post("/v1/synthesize?format=base64", kRequest, "application/json");
      if (!r || r->status != 200) return std::string("failed");
      return json::parse(r->body).at("realized_pitch").dump();
    }));
  }
  std::vector<std::string> pitches;
  for (auto& p : pending) pitches.push_back(p.get());
  for (const std::string& p : pitches) {
    CHECK(p == pitches.front());
    CHECK(p != "failed");
  }
  CHECK(json::parse(pitches.front()).size() == m);

  auto bad = client.Post("/v1/synthesize", R"({"text": "hi", "sketch": {"points": [[0.5, 0]]}})",
                         "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto wav = client.Post("/v1/synthesize", kRequest, "application/json");
  REQUIRE(wav);
  CHECK(wav->status == 200);
  CHECK(wav->get_header_value("Content-Type") == "audio/wav");
  CHECK(json::parse(wav->get_header_value("X-Realized-Pitch")).dump() == pitches.front());
  s.stop();
}
