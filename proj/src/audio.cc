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

#include "sketchvoice/audio.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {

// The FFTW planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftwf_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftwf_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

double hz_to_mel(double hz) {
  // Slaney: linear below 1 kHz, logarithmic above.
  constexpr double kMinLogHz = 1000.0;
  constexpr double kSpacing = 200.0 / 3.0;
  constexpr double kMinLogMel = kMinLogHz / kSpacing;
  const double log_step = std::log(6.4) / 27.0;
  if (hz < kMinLogHz) return hz / kSpacing;
  return kMinLogMel + std::log(hz / kMinLogHz) / log_step;
}

double mel_to_hz(double mel) {
  constexpr double kMinLogHz = 1000.0;
  constexpr double kSpacing = 200.0 / 3.0;
  constexpr double kMinLogMel = kMinLogHz / kSpacing;
  const double log_step = std::log(6.4) / 27.0;
  if (mel < kMinLogMel) return mel * kSpacing;
  return kMinLogHz * std::exp(log_step * (mel - kMinLogMel));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}
std::uint16_t get_u16(const std::string& s, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

}  // namespace

int frame_count(std::size_t num_samples, const FrameConfig& config) {
  if (num_samples < static_cast<std::size_t>(config.window_size)) {
    throw InvalidArgument("audio too short");
  }
  return static_cast<int>(num_samples / static_cast<std::size_t>(config.hop_size));
}

std::vector<float> analysis_frame(std::span<const float> signal, int index,
                                  const FrameConfig& config) {
  const long n = static_cast<long>(signal.size());
  const long start = static_cast<long>(index) * config.hop_size -
                     (config.window_size - config.hop_size) / 2;
  std::vector<float> frame(static_cast<std::size_t>(config.window_size));
  for (int i = 0; i < config.window_size; ++i) {
    long j = start + i;
    // Reflect without repeating the edge sample.
    while (j < 0 || j >= n) {
      if (j < 0) j = -j;
      if (j >= n) j = 2 * (n - 1) - j;
    }
    frame[static_cast<std::size_t>(i)] = signal[static_cast<std::size_t>(j)];
  }
  return frame;
}

std::string encode_wav(std::span<const float> samples, int sample_rate) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate * 2));
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (float s : samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    const auto v = static_cast<std::int16_t>(std::lrint(c * 32767.0f));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

std::vector<float> decode_wav(const std::string& bytes, int* sample_rate) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw IoError("not a RIFF/WAVE file");
  }
  std::size_t at = 12;
  int channels = 0, bits = 0, rate = 0, format = 0;
  while (at + 8 <= bytes.size()) {
    const std::string id = bytes.substr(at, 4);
    const std::uint32_t size = get_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (body + size > bytes.size()) throw IoError("truncated WAV chunk " + id);
    if (id == "fmt ") {
      if (size < 16) throw IoError("short fmt chunk");
      format = get_u16(bytes, body);
      channels = get_u16(bytes, body + 2);
      rate = static_cast<int>(get_u32(bytes, body + 4));
      bits = get_u16(bytes, body + 14);
    } else if (id == "data") {
      if (format != 1 || bits != 16 || channels < 1) {
        throw IoError("only 16-bit PCM WAV is supported");
      }
      const std::size_t frames = size / (2u * static_cast<unsigned>(channels));
      std::vector<float> out(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          acc += static_cast<std::int16_t>(get_u16(bytes, body + 2 * (i * channels + c)));
        }
        out[i] = static_cast<float>(acc / channels / 32768.0);
      }
      if (sample_rate) *sample_rate = rate;
      return out;
    }
    at = body + size + (size & 1u);
  }
  throw IoError("WAV file has no data chunk");
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = encode_wav(samples, sample_rate);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<float> read_wav(const std::filesystem::path& path, int* sample_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return decode_wav(buffer.str(), sample_rate);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Matrix mel_filterbank(const FrameConfig& config) {
  const int bins = config.fft_size / 2 + 1;
  Matrix weights = Matrix::Zero(config.mel_bins, bins);
  const double mel_lo = hz_to_mel(config.mel_fmin);
  const double mel_hi = hz_to_mel(config.mel_fmax);
  std::vector<double> edges(static_cast<std::size_t>(config.mel_bins) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      (config.mel_bins + 1));
  }
  for (int m = 0; m < config.mel_bins; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * config.sample_rate / config.fft_size;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rise, fall));
      weights(m, k) = static_cast<float>(w * norm);
    }
  }
  return weights;
}

Stft::Stft(const FrameConfig& config) : config_(config) {
  if (config.fft_size < config.window_size) {
    throw ConfigError("fft size must be at least the window size");
  }
  window_.resize(static_cast<std::size_t>(config.window_size));
  for (int i = 0; i < config.window_size; ++i) {
    // Periodic Hann.
    window_[i] = static_cast<float>(
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / config.window_size));
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  FftwBuffer real(sizeof(float) * config.fft_size);
  FftwBuffer spec(sizeof(fftwf_complex) * (config.fft_size / 2 + 1));
  forward_plan_ = fftwf_plan_dft_r2c_1d(
      config.fft_size, static_cast<float*>(real.ptr),
      static_cast<fftwf_complex*>(spec.ptr), FFTW_ESTIMATE);
  inverse_plan_ = fftwf_plan_dft_c2r_1d(
      config.fft_size, static_cast<fftwf_complex*>(spec.ptr),
      static_cast<float*>(real.ptr), FFTW_ESTIMATE);
}

Stft::~Stft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftwf_destroy_plan(static_cast<fftwf_plan>(forward_plan_));
  fftwf_destroy_plan(static_cast<fftwf_plan>(inverse_plan_));
}

ComplexSpectrogram Stft::forward(std::span<const float> signal) const {
  const int frames = frame_count(signal.size(), config_);
  const int n = config_.fft_size;
  FftwBuffer real(sizeof(float) * n);
  FftwBuffer spec(sizeof(fftwf_complex) * bins());
  auto* in = static_cast<float*>(real.ptr);
  auto* out = static_cast<fftwf_complex*>(spec.ptr);
  ComplexSpectrogram result(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const std::vector<float> frame = analysis_frame(signal, t, config_);
    std::fill(in, in + n, 0.0f);
    for (int i = 0; i < config_.window_size; ++i) in[i] = frame[i] * window_[i];
    fftwf_execute_dft_r2c(static_cast<fftwf_plan>(forward_plan_), in, out);
    auto& row = result[static_cast<std::size_t>(t)];
    row.resize(static_cast<std::size_t>(bins()));
    for (int k = 0; k < bins(); ++k) row[k] = {out[k][0], out[k][1]};
  }
  return result;
}

std::vector<float> Stft::inverse(const ComplexSpectrogram& spectrum) const {
  const int frames = static_cast<int>(spectrum.size());
  const int n = config_.fft_size;
  const int hop = config_.hop_size;
  const int offset = (config_.window_size - hop) / 2;
  const std::size_t span = static_cast<std::size_t>(frames - 1) * hop + config_.window_size;
  std::vector<double> acc(span, 0.0), norm(span, 0.0);
  FftwBuffer real(sizeof(float) * n);
  FftwBuffer spec(sizeof(fftwf_complex) * bins());
  auto* out = static_cast<float*>(real.ptr);
  auto* in = static_cast<fftwf_complex*>(spec.ptr);
  for (int t = 0; t < frames; ++t) {
    const auto& row = spectrum[static_cast<std::size_t>(t)];
    if (static_cast<int>(row.size()) != bins()) {
      throw InvalidArgument("spectrum row has wrong bin count");
    }
    for (int k = 0; k < bins(); ++k) {
      in[k][0] = row[k].real();
      in[k][1] = row[k].imag();
    }
    fftwf_execute_dft_c2r(static_cast<fftwf_plan>(inverse_plan_), in, out);
    for (int i = 0; i < config_.window_size; ++i) {
      const std::size_t at = static_cast<std::size_t>(t) * hop + i;
      acc[at] += out[i] / n * window_[i];
      norm[at] += static_cast<double>(window_[i]) * window_[i];
    }
  }
  std::vector<float> signal(static_cast<std::size_t>(frames) * hop, 0.0f);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const std::size_t at = i + offset;
    if (at < span && norm[at] > 1e-8) {
      signal[i] = static_cast<float>(acc[at] / norm[at]);
    }
  }
  return signal;
}

Matrix Stft::magnitude(std::span<const float> signal) const {
  const ComplexSpectrogram spec = forward(signal);
  Matrix mag(static_cast<int>(spec.size()), bins());
  for (std::size_t t = 0; t < spec.size(); ++t) {
    for (int k = 0; k < bins(); ++k) {
      mag(static_cast<int>(t), k) = std::abs(spec[t][k]);
    }
  }
  return mag;
}

Matrix log_mel_spectrogram(std::span<const float> signal,
                           const FrameConfig& config) {
  const Stft stft(config);
  const Matrix mag = stft.magnitude(signal);
  const Matrix basis = mel_filterbank(config);
  Matrix mel = mag * basis.transpose();
  return mel.array().max(kMelFloor).log().matrix();
}

double matrix_correlation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0) {
    throw InvalidArgument("correlation needs equally sized, non-empty matrices");
  }
  const double ma = a.cast<double>().mean();
  const double mb = b.cast<double>().mean();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double da = a.data()[i] - ma, db = b.data()[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace sketchvoice
