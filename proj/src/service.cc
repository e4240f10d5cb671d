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


#include "sketchvoice/service.h"

#include <openssl/evp.h>

#include <fstream>
#include <optional>

#include "httplib.h"
#include "sketchvoice/errors.h"

#ifndef SKETCHVOICE_VERSION
#define SKETCHVOICE_VERSION "0.0.0"
#endif

namespace sketchvoice {

using nlohmann::json;

std::string library_version() { return SKETCHVOICE_VERSION; }

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port: must be in [0, 65535]");
  if (max_concurrent_synthesis < 1) {
    throw ConfigError("max_concurrent_synthesis: must be at least 1");
  }
  if (http_threads < 1) throw ConfigError("http_threads: must be at least 1");
  if (max_text_length < 1) throw ConfigError("max_text_length: must be at least 1");
  if (max_steps < 1) throw ConfigError("max_steps: must be at least 1");
}

json ServiceConfig::to_json() const {
  return {{"host", host},
          {"port", port},
          {"max_concurrent_synthesis", max_concurrent_synthesis},
          {"http_threads", http_threads},
          {"max_text_length", max_text_length},
          {"max_steps", max_steps}};
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("service config: expected an object");
  ServiceConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "host") c.host = value.get<std::string>();
      else if (key == "port") c.port = value.get<int>();
      else if (key == "max_concurrent_synthesis") c.max_concurrent_synthesis = value.get<int>();
      else if (key == "http_threads") c.http_threads = value.get<int>();
      else if (key == "max_text_length") c.max_text_length = value.get<int>();
      else if (key == "max_steps") c.max_steps = value.get<int>();
      else throw ConfigError(key + ": unknown service config key");
    } catch (const json::exception&) {
      throw ConfigError(key + ": wrong type");
    }
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

namespace {

// Thrown while reading a request; becomes a 400.
struct FieldError {
  std::string field;
  std::string message;
};

ServiceReply json_reply(int status, const json& body) {
  ServiceReply r;
  r.status = status;
  r.body = body.dump();
  return r;
}

ServiceReply error_reply(int status, const std::string& field, const std::string& message) {
  json e = {{"message", message}};
  if (!field.empty()) e["field"] = field;
  return json_reply(status, {{"error", e}});
}

std::string base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw FieldError{"", "request body must be a JSON object"};
    return j;
  } catch (const json::parse_error&) {
    throw FieldError{"", "request body is not valid JSON"};
  }
}

std::string read_text(const json& j, int max_length) {
  if (!j.contains("text")) throw FieldError{"text", "text is required"};
  if (!j.at("text").is_string()) throw FieldError{"text", "text must be a string"};
  std::string text = j.at("text").get<std::string>();
  if (static_cast<int>(text.size()) > max_length) {
    throw FieldError{"text", "text longer than " + std::to_string(max_length) + " characters"};
  }
  return text;
}

PhonemeSequence phonemize_field(const std::string& text) {
  try {
    return phonemize(text);
  } catch (const InvalidArgument& e) {
    throw FieldError{"text", e.what()};
  } catch (const VocabularyError& e) {
    throw FieldError{"text", e.what()};
  }
}

json words_json(const PhonemeSequence& phonemes) {
  json words = json::array();
  for (const WordSpan& w : phonemes.words) {
    words.push_back({{"word", w.word}, {"begin", w.begin}, {"end", w.end}});
  }
  return words;
}

json spans_json(const SynthesisResult& r, const FrameConfig& frames) {
  json spans = json::array();
  const double hop = static_cast<double>(frames.hop_size) / frames.sample_rate;
  int at = 0;
  for (std::size_t m = 0; m < r.phonemes.size(); ++m) {
    const int d = r.durations.frames_per_phoneme[m];
    spans.push_back({{"phoneme", r.phonemes.symbols[m]},
                     {"start", at * hop},
                     {"end", (at + d) * hop}});
    at += d;
  }
  return spans;
}

// Holds one diffusion slot for the lifetime of a request.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

void send(const ServiceReply& reply, httplib::Response& res) {
  res.status = reply.status;
  for (const auto& [k, v] : reply.headers) res.set_header(k, v);
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

SynthesisService::SynthesisService(std::shared_ptr<const Synthesizer> synthesizer,
                                   ServiceConfig config)
    : synthesizer_(std::move(synthesizer)),
      config_(std::move(config)),
      slots_((config_.validate(), config_.max_concurrent_synthesis)) {}

SynthesisService::~SynthesisService() { stop(); }

ServiceReply SynthesisService::phonemize(const std::string& body) const {
  try {
    const json j = parse_body(body);
    const PhonemeSequence p = phonemize_field(read_text(j, config_.max_text_length));
    return json_reply(200, {{"phonemes", p.symbols},
                            {"M", p.size()},
                            {"words", words_json(p)}});
  } catch (const FieldError& e) {
    return error_reply(400, e.field, e.message);
  }
}

ServiceReply SynthesisService::synthesize(const std::string& body, bool base64_audio) const {
  if (!synthesizer_) return error_reply(503, "", "no model is loaded");
  SynthesisRequest request;
  try {
    const json j = parse_body(body);
    request.text = read_text(j, config_.max_text_length);
    const PhonemeSequence phonemes = phonemize_field(request.text);
    if (j.contains("sketch") && !j.at("sketch").is_null()) {
      try {
        const UserPolyline line = polyline_from_json(j.at("sketch"));
        request.sketches = route_user_sketch(
            resample_user_sketch(line, static_cast<int>(phonemes.size())));
      } catch (const InvalidArgument& e) {
        throw FieldError{"sketch", e.what()};
      }
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) {
        throw FieldError{"seed", "seed must be a non-negative integer"};
      }
      request.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("steps")) {
      const json& s = j.at("steps");
      if (!s.is_number_integer() || s.get<int>() < 1 || s.get<int>() > config_.max_steps) {
        throw FieldError{"steps", "steps must be an integer in [1, " +
                                      std::to_string(config_.max_steps) + "]"};
      }
      request.steps = s.get<int>();
    }
    if (j.contains("sampler")) {
      try {
        request.sampler = sampler_kind_from_string(j.at("sampler").get<std::string>());
      } catch (const std::exception& e) {
        throw FieldError{"sampler", "sampler must be \"deterministic\" or \"ancestral\""};
      }
    }
  } catch (const FieldError& e) {
    return error_reply(400, e.field, e.message);
  }

  std::optional<SynthesisResult> result;
  try {
    SlotGuard slot(slots_);
    result = synthesizer_->synthesize(request);
  } catch (const InvalidArgument& e) {
    return error_reply(400, "", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "", e.what());
  }

  const FrameConfig& frames = synthesizer_->model().config().frames;
  const std::string wav = encode_wav(result->audio, frames.sample_rate);
  const json pitch = result->realized_pitch.values;
  const json energy = result->realized_energy.values;
  const json spans = spans_json(*result, frames);
  if (base64_audio) {
    return json_reply(200, {{"audio", base64(wav)},
                            {"sample_rate", frames.sample_rate},
                            {"phonemes", result->phonemes.symbols},
                            {"M", result->phonemes.size()},
                            {"realized_pitch", pitch},
                            {"realized_energy", energy},
                            {"phoneme_spans", spans}});
  }
  ServiceReply r;
  r.content_type = "audio/wav";
  r.body = wav;
  r.headers = {{"X-Realized-Pitch", pitch.dump()},
               {"X-Realized-Energy", energy.dump()},
               {"X-Phoneme-Spans", spans.dump()},
               {"X-Phoneme-Count", std::to_string(result->phonemes.size())}};
  return r;
}

ServiceReply SynthesisService::health() const {
  json j = {{"status", synthesizer_ ? "ok" : "no_model"},
            {"version", library_version()},
            {"api", "v1"},
            {"model_loaded", static_cast<bool>(synthesizer_)},
            {"max_concurrent_synthesis", config_.max_concurrent_synthesis}};
  if (synthesizer_) {
    const Model& m = synthesizer_->model();
    j["model"] = {{"stage", m.stage},
                  {"vae_hash", m.vae_hash},
                  {"sampling_steps", m.config().sampling_steps},
                  {"sample_rate", m.config().frames.sample_rate}};
    j["vocoder"] = to_string(synthesizer_->vocoder().kind());
  }
  return json_reply(200, j);
}

void SynthesisService::mount(httplib::Server& server) const {
  server.Post("/v1/phonemize", [this](const httplib::Request& req, httplib::Response& res) {
    send(phonemize(req.body), res);
  });
  server.Post("/v1/synthesize", [this](const httplib::Request& req, httplib::Response& res) {
    const bool b64 = req.has_param("format") && req.get_param_value("format") == "base64";
    send(synthesize(req.body, b64), res);
  });
  server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    send(health(), res);
  });
}

namespace {

std::unique_ptr<httplib::Server> make_server(const ServiceConfig& config) {
  auto server = std::make_unique<httplib::Server>();
  const int threads = config.http_threads;
  server->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  return server;
}

}  // namespace

void SynthesisService::listen() {
  server_ = make_server(config_);
  mount(*server_);
  if (!server_->listen(config_.host, config_.port)) {
    throw IoError("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
}

int SynthesisService::start_background() {
  server_ = make_server(config_);
  mount(*server_);
  const int port = server_->bind_to_any_port(config_.host);
  if (port < 0) throw IoError("cannot bind " + config_.host);
  thread_ = std::make_unique<std::jthread>([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void SynthesisService::stop() {
  if (server_) server_->stop();
  thread_.reset();
}

}  // namespace sketchvoice
