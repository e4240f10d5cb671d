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


#ifndef SKETCHVOICE_SERVICE_H_
#define SKETCHVOICE_SERVICE_H_

#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>

#include "json.hpp"
#include "sketchvoice/synthesis.h"

namespace httplib {
class Server;
}

namespace sketchvoice {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  // Upper bound on diffusion runs in flight; further requests wait.
  int max_concurrent_synthesis = 2;
  // HTTP worker threads accepting connections.
  int http_threads = 8;
  // Longest accepted text, in characters.
  int max_text_length = 1000;
  int max_steps = 1000;

  // Throws ConfigError naming the key.
  void validate() const;
  nlohmann::json to_json() const;
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);
};

// Transport-independent response.
struct ServiceReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;

  nlohmann::json json() const { return nlohmann::json::parse(body); }
};

// /v1 endpoints over a shared, immutable synthesizer. Requests never touch
// each other's state; a null synthesizer answers synthesis with 503.
class SynthesisService {
 public:
  SynthesisService(std::shared_ptr<const Synthesizer> synthesizer, ServiceConfig config);
  ~SynthesisService();

  // POST /v1/phonemize {"text"} -> {"phonemes", "M", "words"}.
  ServiceReply phonemize(const std::string& body) const;
  // POST /v1/synthesize {"text", "sketch"?, "seed"?, "steps"?, "sampler"?}.
  // The default reply is the WAV with X-Realized-Pitch, X-Realized-Energy
  // and X-Phoneme-Spans JSON headers; base64 puts everything in JSON.
  ServiceReply synthesize(const std::string& body, bool base64) const;
  // GET /v1/health.
  ServiceReply health() const;

  // Registers the routes on `server`.
  void mount(httplib::Server& server) const;

  // Blocking; returns after stop().
  void listen();
  // Binds an ephemeral port on the configured host and serves from a
  // background thread. Returns the port.
  int start_background();
  void stop();

  const ServiceConfig& config() const { return config_; }

 private:
  std::shared_ptr<const Synthesizer> synthesizer_;
  ServiceConfig config_;
  mutable std::counting_semaphore<> slots_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<std::jthread> thread_;
};

// Library version reported by /v1/health.
std::string library_version();

}  // namespace sketchvoice

#endif  // SKETCHVOICE_SERVICE_H_
