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


// Command-line front end: one subcommand per pipeline stage.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sketchvoice/corpus.h"
#include "sketchvoice/dataset.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/evaluation.h"
#include "sketchvoice/service.h"
#include "sketchvoice/training.h"

using namespace sketchvoice;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

struct VocoderArgs {
  std::string kind = "griffin-lim";
  std::string weights;
  int iterations = 32;

  void add(CLI::App* app) {
    app->add_option("--vocoder", kind, "griffin-lim or hifigan")
        ->check(CLI::IsMember({"griffin-lim", "phase", "hifigan", "neural"}));
    app->add_option("--vocoder-weights", weights, "HiFi-GAN archive");
    app->add_option("--gl-iterations", iterations, "Griffin-Lim iterations")
        ->check(CLI::PositiveNumber);
  }

  std::shared_ptr<const Vocoder> make(const FrameConfig& frames) const {
    const VocoderKind k = vocoder_kind_from_string(kind);
    if (k == VocoderKind::kPhaseReconstruction) {
      return std::make_shared<GriffinLimVocoder>(frames, iterations);
    }
    return make_vocoder(k, frames, weights);
  }
};

std::shared_ptr<const Synthesizer> load_synthesizer(const fs::path& checkpoint,
                                                    const VocoderArgs& vocoder) {
  std::shared_ptr<const Model> model = Model::load(checkpoint);
  return std::make_shared<Synthesizer>(model, vocoder.make(model->config().frames));
}

// --- make-corpus -----------------------------------------------------------

struct MakeCorpusArgs {
  std::string out;
  std::uint64_t seed = CorpusOptions{}.seed;
};

int make_corpus(const MakeCorpusArgs& a) {
  CorpusOptions o;
  o.seed = a.seed;
  const fs::path manifest = write_micro_corpus(a.out, o);
  std::cout << manifest.string() << "\n";
  return kExitOk;
}

// --- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::string manifest;
  std::string cache;
  double max_skip = 0.10;
};

int ingest(const IngestArgs& a) {
  IngestOptions o;
  o.max_skip_fraction = a.max_skip;
  o.warn = [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };
  const IngestReport r = ingest_dataset(a.manifest, a.cache, o);
  std::cout << "processed " << r.processed << ", reused " << r.reused << ", skipped "
            << r.skipped.size() << "\n";
  return kExitOk;
}

// --- train-vae / train-ldm -------------------------------------------------

struct TrainArgs {
  std::string cache;
  std::string out;
  std::string vae;
  std::string config;
  std::string model_config;
  std::string resume;
  std::vector<std::string> overrides;
};

TrainConfig train_config(const TrainArgs& a, TrainStage stage) {
  TrainConfig c = TrainConfig::desk(stage);
  if (!a.config.empty()) {
    c = TrainConfig::from_json(read_json_file(a.config));
    if (c.stage != stage) throw ConfigError("stage: config is for " + to_string(c.stage));
  }
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

int train(const TrainArgs& a, TrainStage stage) {
  const TrainConfig config = train_config(a, stage);
  const FeatureCache cache = FeatureCache::load(a.cache);
  TrainOptions o;
  o.checkpoint = a.out;
  o.resume_from = a.resume;
  o.vae_checkpoint = a.vae;
  if (!a.model_config.empty()) o.model_config = ModelConfig::from_json(read_json_file(a.model_config));
  const auto t0 = std::chrono::steady_clock::now();
  // Logged values are means over the steps since the previous line.
  StepLosses sum;
  int count = 0;
  o.progress = [&](int step, const StepLosses& l) {
    sum.total += l.total;
    sum.reconstruction += l.reconstruction;
    sum.kl += l.kl;
    sum.diffusion += l.diffusion;
    sum.duration += l.duration;
    sum.contour += l.contour;
    ++count;
    if (step != 0 && (step + 1) % config.log_every != 0 && step + 1 != config.steps) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double n = count;
    if (stage == TrainStage::kVae) {
      std::fprintf(stderr, "step %d  loss %.4f  l1 %.4f  kl %.3f  %.0fs\n", step + 1,
                   sum.total / n, sum.reconstruction / n, sum.kl / n, s);
    } else {
      std::fprintf(stderr,
                   "step %d  loss %.4f  diffusion %.4f  duration %.4f  contour %.4f  %.0fs\n",
                   step + 1, sum.total / n, sum.diffusion / n, sum.duration / n,
                   sum.contour / n, s);
    }
    sum = {};
    count = 0;
  };
  const TrainResult r = stage == TrainStage::kVae ? train_vae(cache, config, o)
                                                  : train_ldm(cache, config, o);
  if (stage == TrainStage::kVae) {
    const auto model = Model::load(a.out);
    const VaeMetrics m = evaluate_vae(*model, cache.split("train"));
    std::cout << "train l1 " << m.l1 << ", correlation " << m.correlation << "\n";
  } else if (r.vae_hash_before != r.vae_hash_after) {
    throw NumericalError("the VAE changed during the second stage");
  }
  std::cout << "wrote " << a.out << "\n";
  return kExitOk;
}

// --- extract-sketch --------------------------------------------------------

struct ExtractArgs {
  std::string audio;
  std::string alignment;
  std::string kind = "pitch";
  std::string out;
  std::string contour_out;
};

int extract_sketch(const ExtractArgs& a) {
  ManifestEntry e;
  e.id = fs::path(a.audio).stem().string();
  e.audio_path = a.audio;
  e.alignment_path = a.alignment;
  const CacheRecord r = prepare_record(e, FrameConfig{});
  const bool pitch = prosody_kind_from_string(a.kind) == ProsodyKind::kPitch;
  const ProsodySketch& sketch = pitch ? r.pitch_sketch : r.energy_sketch;
  write_prosody_file(a.out, {sketch.kind, r.phonemes, sketch.values});
  if (!a.contour_out.empty()) {
    const ProsodyContour& c = pitch ? r.pitch : r.loudness;
    write_prosody_file(a.contour_out, {c.kind, r.phonemes, c.values});
  }
  std::cout << "wrote " << a.out << " (" << sketch.size() << " phonemes)\n";
  return kExitOk;
}

// --- synthesize ------------------------------------------------------------

struct SynthesizeArgs {
  std::string model;
  std::string text;
  std::string sketch;
  std::string energy_sketch;
  std::string polyline;
  std::uint64_t seed = 0;
  int steps = 0;
  std::string sampler = "deterministic";
  std::string out;
  std::string report;
  std::string plot;
  VocoderArgs vocoder;
};

// A sketch file drawn for other phonemes is treated as a curve over the
// utterance and resampled.
ProsodySketch sketch_from_file(const fs::path& path, const PhonemeSequence& phonemes) {
  const ProsodyFile f = read_prosody_file(path);
  const int m = static_cast<int>(phonemes.size());
  if (f.values.size() == phonemes.size()) return {f.values, f.kind};
  if (f.values.empty()) throw InvalidArgument(path.string() + ": empty sketch");
  std::cerr << "warning: " << path.string() << " has " << f.values.size()
            << " values for " << m << " phonemes; resampling\n";
  UserPolyline line;
  line.kind = f.kind;
  const double n = static_cast<double>(f.values.size());
  if (f.values.size() == 1) {
    line.points = {{0.0, f.values[0]}, {1.0, f.values[0]}};
  } else {
    for (std::size_t i = 0; i < f.values.size(); ++i) line.points.emplace_back((i + 0.5) / n, f.values[i]);
  }
  return resample_user_sketch(line, m);
}

int synthesize(const SynthesizeArgs& a) {
  const auto synth = load_synthesizer(a.model, a.vocoder);
  SynthesisRequest req;
  req.text = a.text;
  req.seed = a.seed;
  req.steps = a.steps;
  req.sampler = sampler_kind_from_string(a.sampler);
  const PhonemeSequence phonemes = synth->phonemize(a.text);
  const std::size_t m = phonemes.size();
  if (!a.sketch.empty() || !a.polyline.empty() || !a.energy_sketch.empty()) {
    SketchPair pair = SketchPair::absent(m);
    auto place = [&pair](const ProsodySketch& s) {
      (s.kind == ProsodyKind::kPitch ? pair.pitch : pair.energy) = s;
    };
    if (!a.sketch.empty()) place(sketch_from_file(a.sketch, phonemes));
    if (!a.energy_sketch.empty()) {
      ProsodySketch s = sketch_from_file(a.energy_sketch, phonemes);
      s.kind = ProsodyKind::kEnergy;
      place(s);
    }
    if (!a.polyline.empty()) {
      const json j = fs::exists(a.polyline) ? read_json_file(a.polyline) : json::parse(a.polyline);
      place(resample_user_sketch(polyline_from_json(j), static_cast<int>(m)));
    }
    req.sketches = pair;
  }
  const SynthesisResult r = synth->synthesize(req);
  const int rate = synth->model().config().frames.sample_rate;
  write_wav(a.out, r.audio, rate);

  json report = {{"text", a.text},
                 {"seed", a.seed},
                 {"steps", a.steps > 0 ? a.steps : synth->model().config().sampling_steps},
                 {"sampler", a.sampler},
                 {"audio", a.out},
                 {"sample_rate", rate},
                 {"phonemes", r.phonemes.symbols},
                 {"durations", r.durations.frames_per_phoneme},
                 {"predicted_pitch_hz", r.predicted_pitch.values},
                 {"predicted_energy_db", r.predicted_energy.values},
                 {"realized_pitch_hz", r.realized_pitch.values},
                 {"realized_energy_db", r.realized_energy.values}};
  if (!r.sketches.pitch.is_absent()) {
    report["pitch_sketch"] = r.sketches.pitch.values;
    report["pitch_adherence"] = sketch_adherence(r.sketches.pitch, r.realized_pitch);
  }
  if (!r.sketches.energy.is_absent()) {
    report["energy_sketch"] = r.sketches.energy.values;
    report["energy_adherence"] = sketch_adherence(r.sketches.energy, r.realized_energy);
  }
  if (!a.report.empty()) write_json_file(a.report, report);
  if (!a.plot.empty()) {
    std::ofstream svg(a.plot);
    if (!svg) throw IoError("cannot write " + a.plot);
    svg << contour_plot_svg(r.sketches.pitch, r.realized_pitch, r.phonemes.symbols, a.text);
  }
  std::cout << "wrote " << a.out << " (" << r.audio.size() << " samples)";
  if (report.contains("pitch_adherence")) {
    std::cout << ", pitch adherence " << report["pitch_adherence"].get<double>();
  }
  std::cout << "\n";
  return kExitOk;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string cache;
  std::string split = "test";
  std::uint64_t seed = 0;
  int steps = 0;
  bool no_baseline = false;
  std::string out;
  VocoderArgs vocoder;
};

int evaluate(const EvaluateArgs& a) {
  const auto synth = load_synthesizer(a.model, a.vocoder);
  const FeatureCache cache = FeatureCache::load(a.cache);
  const auto records = cache.split(a.split);
  if (records.empty()) throw ConfigError("split '" + a.split + "' is empty");
  EvaluationOptions o;
  o.seed = a.seed;
  o.steps = a.steps;
  o.baseline = !a.no_baseline;
  const EvaluationReport r = evaluate_records(*synth, records, o);
  json j = r.to_json();
  j["split"] = a.split;
  j["seed"] = a.seed;
  if (!a.out.empty()) write_json_file(a.out, j);
  std::printf("%zu utterances  pitch RMSE %.2f Hz  energy RMSE %.2f dB  adherence %.3f / %.3f\n",
              r.utterances.size(), r.mean_pitch_rmse_hz, r.mean_energy_rmse_db,
              r.mean_pitch_adherence, r.mean_energy_adherence);
  if (o.baseline) {
    std::printf("text-only baseline  pitch RMSE %.2f Hz  energy RMSE %.2f dB\n",
                r.mean_baseline_pitch_rmse_hz, r.mean_baseline_energy_rmse_db);
  }
  return kExitOk;
}

// --- vocode ----------------------------------------------------------------

struct VocodeArgs {
  std::string mel;
  std::string out;
  VocoderArgs vocoder;
};

// Mel JSON: {"mel": [[...], ...]}, T rows of log-mel values.
int vocode(const VocodeArgs& a) {
  const json j = read_json_file(a.mel);
  const json& rows = j.is_object() ? j.at("mel") : j;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
    throw InvalidArgument("mel: expected a non-empty array of rows");
  }
  Matrix mel(rows.size(), rows[0].size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows[0].size()) throw InvalidArgument("mel: ragged rows");
    for (std::size_t f = 0; f < rows[t].size(); ++f) mel(t, f) = rows[t][f].get<float>();
  }
  std::shared_ptr<const Vocoder> v;
  if (vocoder_kind_from_string(a.vocoder.kind) == VocoderKind::kNeural) {
    if (a.vocoder.weights.empty()) throw IoError("--vocoder-weights is required for hifigan");
    v = HifiGanVocoder::load(a.vocoder.weights);
  } else {
    v = a.vocoder.make(FrameConfig{});
  }
  const std::vector<float> audio = v->synthesize(mel, v->frame_config());
  write_wav(a.out, audio, v->frame_config().sample_rate);
  std::cout << "wrote " << a.out << " (" << audio.size() << " samples)\n";
  return kExitOk;
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string model;
  std::string config;
  std::string host;
  int port = -1;
  int max_concurrent = 0;
  VocoderArgs vocoder;
};

int serve(const ServeArgs& a) {
  ServiceConfig c;
  if (!a.config.empty()) c = ServiceConfig::load(a.config);
  if (!a.host.empty()) c.host = a.host;
  if (a.port >= 0) c.port = a.port;
  if (a.max_concurrent > 0) c.max_concurrent_synthesis = a.max_concurrent;
  c.validate();
  std::shared_ptr<const Synthesizer> synth;
  if (!a.model.empty()) {
    synth = load_synthesizer(a.model, a.vocoder);
  } else {
    std::cerr << "warning: no --model; /v1/synthesize will answer 503\n";
  }
  SynthesisService service(synth, c);
  std::cerr << "listening on http://" << c.host << ":" << c.port << "/v1/\n";
  service.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-conditioned expressive speech synthesis"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", library_version());

  MakeCorpusArgs corpus_args;
  auto* mc = app.add_subcommand("make-corpus", "Render the synthetic micro corpus");
  mc->add_option("--out", corpus_args.out, "Output directory")->required();
  mc->add_option("--seed", corpus_args.seed, "Rendering seed");

  IngestArgs ingest_args;
  auto* ig = app.add_subcommand("ingest", "Extract features from a manifest into a cache");
  ig->add_option("--manifest", ingest_args.manifest, "JSONL manifest")->required()
      ->check(CLI::ExistingFile);
  ig->add_option("--cache", ingest_args.cache, "Cache directory")->required();
  ig->add_option("--max-skip-fraction", ingest_args.max_skip, "Abort above this skip rate")
      ->check(CLI::Range(0.0, 1.0));

  TrainArgs vae_args, ldm_args;
  auto add_train = [](CLI::App* c, TrainArgs& a) {
    c->add_option("--cache", a.cache, "Feature cache")->required();
    c->add_option("--out", a.out, "Checkpoint to write")->required();
    c->add_option("--config", a.config, "Training config JSON");
    c->add_option("--model-config", a.model_config, "Model config JSON");
    c->add_option("--resume", a.resume, "Checkpoint to resume from")->check(CLI::ExistingFile);
    c->add_option("--set", a.overrides, "Config override key=value (repeatable)");
  };
  auto* tv = app.add_subcommand("train-vae", "Stage 1: fit the mel VAE");
  add_train(tv, vae_args);
  auto* tl = app.add_subcommand("train-ldm", "Stage 2: fit the diffusion model on frozen VAE");
  add_train(tl, ldm_args);
  tl->add_option("--vae", ldm_args.vae, "Trained VAE checkpoint")->check(CLI::ExistingFile);

  ExtractArgs extract_args;
  auto* ex = app.add_subcommand("extract-sketch", "Audio and alignment to a sketch file");
  ex->add_option("--audio", extract_args.audio, "WAV file")->required()->check(CLI::ExistingFile);
  ex->add_option("--alignment", extract_args.alignment, "Alignment JSON")->required()
      ->check(CLI::ExistingFile);
  ex->add_option("--kind", extract_args.kind, "pitch or energy")
      ->check(CLI::IsMember({"pitch", "energy"}));
  ex->add_option("--out", extract_args.out, "Sketch JSON to write")->required();
  ex->add_option("--contour-out", extract_args.contour_out, "Also write the detailed contour");

  SynthesizeArgs synth_args;
  auto* sy = app.add_subcommand("synthesize", "Text plus optional sketches to a WAV");
  sy->add_option("--model", synth_args.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  sy->add_option("--text", synth_args.text, "Input text")->required();
  sy->add_option("--sketch", synth_args.sketch, "Sketch JSON (phoneme-level)")
      ->check(CLI::ExistingFile);
  sy->add_option("--energy-sketch", synth_args.energy_sketch, "Energy sketch JSON")
      ->check(CLI::ExistingFile);
  sy->add_option("--polyline", synth_args.polyline, "Polyline JSON or file {kind, points}");
  sy->add_option("--seed", synth_args.seed, "Sampling seed");
  sy->add_option("--steps", synth_args.steps, "Sampling steps")->check(CLI::PositiveNumber);
  sy->add_option("--sampler", synth_args.sampler, "deterministic or ancestral")
      ->check(CLI::IsMember({"deterministic", "ancestral"}));
  sy->add_option("--out", synth_args.out, "WAV to write")->required();
  sy->add_option("--report", synth_args.report, "JSON report to write");
  sy->add_option("--plot", synth_args.plot, "SVG overlay to write");
  synth_args.vocoder.add(sy);

  EvaluateArgs eval_args;
  auto* ev = app.add_subcommand("evaluate", "RMSE and adherence on a cached split");
  ev->add_option("--model", eval_args.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--cache", eval_args.cache, "Feature cache")->required();
  ev->add_option("--split", eval_args.split, "train, val or test");
  ev->add_option("--seed", eval_args.seed, "Sampling seed");
  ev->add_option("--steps", eval_args.steps, "Sampling steps")->check(CLI::PositiveNumber);
  ev->add_flag("--no-baseline", eval_args.no_baseline, "Skip the text-only condition");
  ev->add_option("--out", eval_args.out, "JSON report to write");
  eval_args.vocoder.add(ev);

  VocodeArgs vocode_args;
  auto* vc = app.add_subcommand("vocode", "Log-mel JSON to a WAV");
  vc->add_option("--mel", vocode_args.mel, "Mel JSON")->required()->check(CLI::ExistingFile);
  vc->add_option("--out", vocode_args.out, "WAV to write")->required();
  vocode_args.vocoder.add(vc);

  ServeArgs serve_args;
  auto* sv = app.add_subcommand("serve", "HTTP service under /v1/");
  sv->add_option("--model", serve_args.model, "Checkpoint")->check(CLI::ExistingFile);
  sv->add_option("--config", serve_args.config, "Service config JSON")->check(CLI::ExistingFile);
  sv->add_option("--host", serve_args.host, "Bind address");
  sv->add_option("--port", serve_args.port, "Port")->check(CLI::Range(0, 65535));
  sv->add_option("--max-concurrent", serve_args.max_concurrent, "Diffusion runs in flight")
      ->check(CLI::PositiveNumber);
  serve_args.vocoder.add(sv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (mc->parsed()) return make_corpus(corpus_args);
    if (ig->parsed()) return ingest(ingest_args);
    if (tv->parsed()) return train(vae_args, TrainStage::kVae);
    if (tl->parsed()) return train(ldm_args, TrainStage::kLdm);
    if (ex->parsed()) return extract_sketch(extract_args);
    if (sy->parsed()) return synthesize(synth_args);
    if (ev->parsed()) return evaluate(eval_args);
    if (vc->parsed()) return vocode(vocode_args);
    if (sv->parsed()) return serve(serve_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
