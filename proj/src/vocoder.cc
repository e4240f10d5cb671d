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

#include "sketchvoice/vocoder.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <random>

#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {
constexpr float kMaxLogMel = 12.0f;
}  // namespace

std::string to_string(VocoderKind kind) {
  return kind == VocoderKind::kNeural ? "hifigan" : "griffin-lim";
}

VocoderKind vocoder_kind_from_string(const std::string& name) {
  if (name == "hifigan" || name == "neural") return VocoderKind::kNeural;
  if (name == "griffin-lim" || name == "phase") return VocoderKind::kPhaseReconstruction;
  throw InvalidArgument("unknown vocoder '" + name + "' (hifigan, griffin-lim)");
}

std::vector<float> Vocoder::synthesize(const Matrix& mel,
                                       const FrameConfig& expected) const {
  if (!(expected == frame_config())) {
    throw ConfigError("vocoder frame configuration does not match the acoustic model");
  }
  if (mel.cols() != frame_config().mel_bins) {
    throw InvalidArgument("mel has " + std::to_string(mel.cols()) + " bins, vocoder expects " +
                          std::to_string(frame_config().mel_bins));
  }
  if (!mel.allFinite()) throw NumericalError("non-finite mel passed to the vocoder");
  std::vector<float> audio = run(mel);
  for (float& s : audio) s = std::clamp(s, -1.0f, 1.0f);
  return audio;
}

// ---------------------------------------------------------------------------

GriffinLimVocoder::GriffinLimVocoder(const FrameConfig& config, int iterations,
                                     std::uint64_t seed)
    : stft_(config), iterations_(iterations), seed_(seed) {
  if (iterations < 0) throw ConfigError("griffin-lim iterations must be >= 0");
  const Eigen::MatrixXd basis = mel_filterbank(config).cast<double>();
  inverse_basis_ = basis.completeOrthogonalDecomposition().pseudoInverse().cast<float>();
}

Matrix GriffinLimVocoder::mel_to_magnitude(const Matrix& mel) const {
  // An untrained or diverged model can emit huge values; keep exp finite.
  const Matrix power = mel.array().min(kMaxLogMel).exp().matrix();
  Matrix mag = power * inverse_basis_.transpose();
  return mag.cwiseMax(0.0f);
}

std::vector<float> GriffinLimVocoder::run(const Matrix& mel) const {
  const FrameConfig& cfg = stft_.config();
  const int frames = static_cast<int>(mel.rows());
  if (frames * cfg.hop_size < cfg.window_size) {
    throw InvalidArgument("mel too short for the vocoder window");
  }
  const Matrix mag = mel_to_magnitude(mel);
  const int bins = stft_.bins();
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<float> angle(0.0f, 2.0f * std::numbers::pi_v<float>);
  ComplexSpectrogram spec(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    spec[t].resize(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) spec[t][k] = std::polar(mag(t, k), angle(rng));
  }
  for (int it = 0; it < iterations_; ++it) {
    const std::vector<float> signal = stft_.inverse(spec);
    const ComplexSpectrogram rebuilt = stft_.forward(signal);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        const std::complex<float> z = rebuilt[t][k];
        const float a = std::abs(z);
        spec[t][k] = a > 1e-12f ? z * (mag(t, k) / a) : std::complex<float>(mag(t, k), 0.0f);
      }
    }
  }
  return stft_.inverse(spec);
}

// ---------------------------------------------------------------------------

nlohmann::json HifiGanConfig::to_json() const {
  return {{"sample_rate", frames.sample_rate},
          {"n_fft", frames.fft_size},
          {"win_size", frames.window_size},
          {"hop_size", frames.hop_size},
          {"num_mels", frames.mel_bins},
          {"fmin", frames.mel_fmin},
          {"fmax", frames.mel_fmax},
          {"upsample_rates", upsample_rates},
          {"upsample_kernel_sizes", upsample_kernel_sizes},
          {"upsample_initial_channel", upsample_initial_channel},
          {"resblock_kernel_sizes", resblock_kernel_sizes},
          {"resblock_dilation_sizes", resblock_dilation_sizes}};
}

HifiGanConfig HifiGanConfig::from_json(const nlohmann::json& j) {
  HifiGanConfig c;
  try {
    c.frames.sample_rate = j.at("sample_rate").get<int>();
    c.frames.fft_size = j.at("n_fft").get<int>();
    c.frames.window_size = j.at("win_size").get<int>();
    c.frames.hop_size = j.at("hop_size").get<int>();
    c.frames.mel_bins = j.at("num_mels").get<int>();
    c.frames.mel_fmin = j.at("fmin").get<double>();
    c.frames.mel_fmax = j.at("fmax").get<double>();
    c.upsample_rates = j.at("upsample_rates").get<std::vector<int>>();
    c.upsample_kernel_sizes = j.at("upsample_kernel_sizes").get<std::vector<int>>();
    c.upsample_initial_channel = j.at("upsample_initial_channel").get<int>();
    c.resblock_kernel_sizes = j.at("resblock_kernel_sizes").get<std::vector<int>>();
    c.resblock_dilation_sizes =
        j.at("resblock_dilation_sizes").get<std::vector<std::vector<int>>>();
    if (j.contains("resblock") && j.at("resblock").get<std::string>() != "1") {
      throw ConfigError("only residual block type 1 is supported");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("vocoder config: ") + e.what());
  }
  c.validate();
  return c;
}

void HifiGanConfig::validate() const {
  if (upsample_rates.empty() || upsample_rates.size() != upsample_kernel_sizes.size()) {
    throw ConfigError("upsample rates and kernel sizes must be non-empty and equal in length");
  }
  int product = 1;
  for (int r : upsample_rates) product *= r;
  if (product != frames.hop_size) {
    throw ConfigError("upsampling product " + std::to_string(product) +
                      " differs from hop size " + std::to_string(frames.hop_size));
  }
  if (resblock_kernel_sizes.size() != resblock_dilation_sizes.size()) {
    throw ConfigError("resblock kernel and dilation lists differ in length");
  }
  if (upsample_initial_channel >> upsample_rates.size() < 1) {
    throw ConfigError("too few initial channels for the upsampling stages");
  }
}

namespace {

using Signal = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

const nn::Tensor& weight(const Archive& a, const std::string& name, int rank) {
  const nn::Tensor& t = a.get(name);
  if (t.rank() != rank) throw IoError("vocoder tensor " + name + " has wrong rank");
  return t;
}

// x: [in, L]; w: [out, in, k]. Same-length output.
Signal conv1d(const Signal& x, const nn::Tensor& w, const nn::Tensor& b, int dilation) {
  const int out = w.dim(0), in = w.dim(1), k = w.dim(2);
  if (in != x.rows()) throw IoError("vocoder conv input channel mismatch");
  const int length = static_cast<int>(x.cols());
  const int pad = dilation * (k - 1) / 2;
  Signal cols = Signal::Zero(static_cast<Eigen::Index>(in) * k, length);
  for (int c = 0; c < in; ++c) {
    for (int j = 0; j < k; ++j) {
      const int shift = j * dilation - pad;
      const int lo = std::max(0, -shift), hi = std::min(length, length - shift);
      if (hi > lo) {
        cols.row(c * k + j).segment(lo, hi - lo) = x.row(c).segment(lo + shift, hi - lo);
      }
    }
  }
  const Eigen::Map<const Signal> wm(w.data().data(), out, static_cast<Eigen::Index>(in) * k);
  Signal y = wm * cols;
  for (int o = 0; o < out; ++o) y.row(o).array() += b.data()[o];
  return y;
}

// x: [in, L]; w: [in, out, k] as in a transposed convolution.
Signal conv_transpose1d(const Signal& x, const nn::Tensor& w, const nn::Tensor& b,
                        int stride, int padding) {
  const int in = w.dim(0), out = w.dim(1), k = w.dim(2);
  if (in != x.rows()) throw IoError("vocoder upsampling channel mismatch");
  const int length = static_cast<int>(x.cols());
  const int full = (length - 1) * stride + k;
  const int out_len = full - 2 * padding;
  const Eigen::Map<const Signal> wm(w.data().data(), in, static_cast<Eigen::Index>(out) * k);
  const Signal cols = wm.transpose() * x;  // [out * k, L]
  Signal y = Signal::Zero(out, out_len);
  for (int o = 0; o < out; ++o) {
    for (int j = 0; j < k; ++j) {
      const auto row = cols.row(static_cast<Eigen::Index>(o) * k + j);
      for (int l = 0; l < length; ++l) {
        const int at = l * stride + j - padding;
        if (at >= 0 && at < out_len) y(o, at) += row(l);
      }
    }
    y.row(o).array() += b.data()[o];
  }
  return y;
}

Signal leaky(const Signal& x, float slope) {
  return x.unaryExpr([slope](float v) { return v > 0.0f ? v : v * slope; });
}

constexpr float kLeakySlope = 0.1f;

}  // namespace

HifiGanVocoder::HifiGanVocoder(const HifiGanConfig& config, Archive weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  // Fail at load time rather than on the first request.
  weight(weights_, "conv_pre.weight", 3);
  weight(weights_, "conv_post.weight", 3);
  const std::size_t nk = config_.resblock_kernel_sizes.size();
  for (std::size_t i = 0; i < config_.upsample_rates.size(); ++i) {
    weight(weights_, "ups." + std::to_string(i) + ".weight", 3);
    for (std::size_t j = 0; j < nk; ++j) {
      const std::string base = "resblocks." + std::to_string(i * nk + j) + ".";
      for (std::size_t d = 0; d < config_.resblock_dilation_sizes[j].size(); ++d) {
        weight(weights_, base + "convs1." + std::to_string(d) + ".weight", 3);
        weight(weights_, base + "convs2." + std::to_string(d) + ".weight", 3);
      }
    }
  }
}

std::unique_ptr<HifiGanVocoder> HifiGanVocoder::load(const std::filesystem::path& path) {
  Archive archive = Archive::read(path);
  if (!archive.meta().contains("hifigan")) {
    throw IoError(path.string() + " does not hold vocoder weights");
  }
  const HifiGanConfig config = HifiGanConfig::from_json(archive.meta().at("hifigan"));
  return std::make_unique<HifiGanVocoder>(config, std::move(archive));
}

std::vector<float> HifiGanVocoder::run(const Matrix& mel) const {
  const auto& w = weights_;
  auto conv = [&](const Signal& x, const std::string& name, int dilation) {
    return conv1d(x, w.get(name + ".weight"), w.get(name + ".bias"), dilation);
  };
  Signal x = conv(mel.transpose(), "conv_pre", 1);
  const std::size_t nk = config_.resblock_kernel_sizes.size();
  for (std::size_t i = 0; i < config_.upsample_rates.size(); ++i) {
    const int rate = config_.upsample_rates[i], kernel = config_.upsample_kernel_sizes[i];
    const std::string up = "ups." + std::to_string(i);
    x = conv_transpose1d(leaky(x, kLeakySlope), w.get(up + ".weight"), w.get(up + ".bias"),
                         rate, (kernel - rate) / 2);
    Signal sum = Signal::Zero(x.rows(), x.cols());
    for (std::size_t j = 0; j < nk; ++j) {
      const std::string base = "resblocks." + std::to_string(i * nk + j) + ".";
      Signal h = x;
      const auto& dilations = config_.resblock_dilation_sizes[j];
      for (std::size_t d = 0; d < dilations.size(); ++d) {
        Signal t = conv(leaky(h, kLeakySlope), base + "convs1." + std::to_string(d),
                        dilations[d]);
        t = conv(leaky(t, kLeakySlope), base + "convs2." + std::to_string(d), 1);
        h += t;
      }
      sum += h;
    }
    x = sum / static_cast<float>(nk);
  }
  x = conv(leaky(x, 0.01f), "conv_post", 1);
  std::vector<float> audio(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) audio[i] = std::tanh(x(0, i));
  return audio;
}

std::unique_ptr<Vocoder> make_vocoder(VocoderKind kind, const FrameConfig& frames,
                                      const std::filesystem::path& weights) {
  if (kind == VocoderKind::kPhaseReconstruction) {
    return std::make_unique<GriffinLimVocoder>(frames);
  }
  std::filesystem::path path = weights;
  if (path.empty()) {
    if (const char* env = std::getenv("SKETCHVOICE_HIFIGAN")) path = env;
  }
  if (path.empty() || !std::filesystem::exists(path)) {
    throw IoError("neural vocoder weights not found" +
                  (path.empty() ? std::string() : " at " + path.string()) +
                  "; convert them with tools/convert_hifigan.py or use --vocoder griffin-lim");
  }
  auto vocoder = HifiGanVocoder::load(path);
  if (!(vocoder->frame_config() == frames)) {
    throw ConfigError("vocoder frame configuration does not match the acoustic model");
  }
  return vocoder;
}

}  // namespace sketchvoice
