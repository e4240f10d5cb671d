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

#ifndef SKETCHVOICE_AUDIO_H_
#define SKETCHVOICE_AUDIO_H_

#include <Eigen/Core>
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sketchvoice {

using Matrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Analysis parameters shared by the mel, pitch and energy front ends, and by
// the vocoder that inverts them.
struct FrameConfig {
  int sample_rate = 22050;
  int window_size = 1024;
  int hop_size = 256;
  int fft_size = 1024;
  int mel_bins = 80;
  double mel_fmin = 0.0;
  double mel_fmax = 8000.0;

  bool operator==(const FrameConfig&) const = default;
};

// Number of analysis frames for a signal: one per hop. Throws
// InvalidArgument("audio too short") when the signal is shorter than one
// window.
int frame_count(std::size_t num_samples, const FrameConfig& config);

// Frame `index` as `window_size` samples centred on the hop, with reflect
// padding at the signal edges.
std::vector<float> analysis_frame(std::span<const float> signal, int index,
                                  const FrameConfig& config);

// 16-bit PCM mono WAV.
std::string encode_wav(std::span<const float> samples, int sample_rate);
std::vector<float> decode_wav(const std::string& bytes, int* sample_rate);
void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate);
std::vector<float> read_wav(const std::filesystem::path& path, int* sample_rate);

// Slaney-style mel filterbank (area normalised), [mel_bins, fft_size/2 + 1].
Matrix mel_filterbank(const FrameConfig& config);

using ComplexSpectrogram = std::vector<std::vector<std::complex<float>>>;

// Hann-windowed short-time Fourier transform using the framing of
// analysis_frame(). Thread-safe.
class Stft {
 public:
  explicit Stft(const FrameConfig& config);
  ~Stft();
  Stft(const Stft&) = delete;
  Stft& operator=(const Stft&) = delete;

  ComplexSpectrogram forward(std::span<const float> signal) const;
  // Inverse by weighted overlap-add; returns frames * hop_size samples.
  std::vector<float> inverse(const ComplexSpectrogram& spectrum) const;
  Matrix magnitude(std::span<const float> signal) const;
  int bins() const { return config_.fft_size / 2 + 1; }
  const FrameConfig& config() const { return config_; }

 private:
  FrameConfig config_;
  std::vector<float> window_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

inline constexpr float kMelFloor = 1e-5f;

// Natural-log mel magnitude spectrogram, [frames, mel_bins].
Matrix log_mel_spectrogram(std::span<const float> signal,
                           const FrameConfig& config);

// Pearson correlation between two equally sized matrices (flattened).
double matrix_correlation(const Matrix& a, const Matrix& b);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_AUDIO_H_
