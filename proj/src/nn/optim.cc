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

#include "sketchvoice/nn/optim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sketchvoice/errors.h"

namespace sketchvoice::nn {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const Tensor& p : params_) {
    m_.emplace_back(p.size(), 0.0f);
    v_.emplace_back(p.size(), 0.0f);
  }
}

void Adam::step(float learning_rate) {
  ++step_;
  const float b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(static_cast<double>(b1), static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(static_cast<double>(b2), static_cast<double>(step_));
  const float step_size = static_cast<float>(learning_rate * std::sqrt(c2) / c1);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = params_[k];
    if (!p.has_grad()) continue;
    auto w = p.mutable_data();
    auto g = p.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      float gi = g[i];
      if (options_.weight_decay > 0.0f) {
        if (options_.decoupled) {
          w[i] -= learning_rate * options_.weight_decay * w[i];
        } else {
          gi += options_.weight_decay * w[i];
        }
      }
      m[i] = b1 * m[i] + (1.0f - b1) * gi;
      v[i] = b2 * v[i] + (1.0f - b2) * gi * gi;
      w[i] -= step_size * m[i] / (std::sqrt(v[i]) + options_.eps);
    }
    p.zero_grad();
  }
}

std::vector<float> Adam::state() const {
  std::vector<float> out;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    out.insert(out.end(), m_[k].begin(), m_[k].end());
    out.insert(out.end(), v_[k].begin(), v_[k].end());
  }
  return out;
}

void Adam::load_state(const std::vector<float>& state, std::int64_t step) {
  std::size_t offset = 0;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const std::size_t n = m_[k].size();
    if (offset + 2 * n > state.size()) {
      throw ConfigError("optimizer state does not match parameters");
    }
    std::copy_n(state.begin() + offset, n, m_[k].begin());
    std::copy_n(state.begin() + offset + n, n, v_[k].begin());
    offset += 2 * n;
  }
  if (offset != state.size()) {
    throw ConfigError("optimizer state does not match parameters");
  }
  step_ = step;
}

float clip_grad_norm(std::vector<Tensor>& params, float max_norm) {
  double total = 0.0;
  for (Tensor& p : params) {
    if (!p.has_grad()) continue;
    for (float g : p.grad()) total += static_cast<double>(g) * g;
  }
  const float norm = static_cast<float>(std::sqrt(total));
  if (norm > max_norm && norm > 0.0f) {
    const float factor = max_norm / norm;
    for (Tensor& p : params) {
      if (!p.has_grad()) continue;
      for (float& g : p.grad()) g *= factor;
    }
  }
  return norm;
}

float warmup_cosine_lr(std::int64_t step, std::int64_t warmup,
                       std::int64_t total_steps, float peak, float floor) {
  if (warmup > 0 && step < warmup) {
    return peak * static_cast<float>(step + 1) / static_cast<float>(warmup);
  }
  const std::int64_t span = std::max<std::int64_t>(1, total_steps - warmup);
  const double progress =
      std::clamp(static_cast<double>(step - warmup) / span, 0.0, 1.0);
  return floor + (peak - floor) * 0.5f *
                     static_cast<float>(1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace sketchvoice::nn
