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

#include "sketchvoice/nn/module.h"

#include <cmath>

#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"

namespace sketchvoice::nn {

std::vector<std::pair<std::string, Tensor>> Module::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  collect("", &out);
  return out;
}

std::vector<Tensor> Module::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

std::size_t Module::parameter_count() const {
  std::size_t n = 0;
  for (auto& [name, t] : named_parameters()) n += t.size();
  return n;
}

void Module::zero_grad() {
  for (Tensor t : parameters()) t.zero_grad();
}

Tensor Module::add_parameter(std::string name, Tensor value) {
  value.node()->requires_grad = true;
  params_.emplace_back(std::move(name), value);
  return value;
}

void Module::add_module(std::string name, Module* child) {
  children_.emplace_back(std::move(name), child);
}

void Module::collect(const std::string& prefix,
                     std::vector<std::pair<std::string, Tensor>>* out) const {
  for (const auto& [name, t] : params_) out->emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_) {
    child->collect(prefix + name + ".", out);
  }
}

Tensor uniform_parameter(Shape shape, float bound, Rng& rng) {
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> values(shape_size(shape));
  for (float& v : values) v = dist(rng);
  return Tensor::from(std::move(shape), std::move(values), true);
}

Linear::Linear(int in, int out, Rng& rng, bool bias) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in));
  weight_ = add_parameter("weight", uniform_parameter({in, out}, bound, rng));
  if (bias) bias_ = add_parameter("bias", uniform_parameter({out}, bound, rng));
}

Tensor Linear::forward(const Tensor& x) const {
  return linear(x, weight_, bias_);
}

Conv1d::Conv1d(int in, int out, int kernel, Rng& rng) {
  if (kernel % 2 == 0) throw ConfigError("conv1d kernel must be odd");
  const float bound = 1.0f / std::sqrt(static_cast<float>(in * kernel));
  weight_ = add_parameter("weight", uniform_parameter({kernel, in, out}, bound, rng));
  bias_ = add_parameter("bias", uniform_parameter({out}, bound, rng));
}

Tensor Conv1d::forward(const Tensor& x) const {
  return conv1d(x, weight_, bias_);
}

Conv2d::Conv2d(int in, int out, int kernel, int stride, int pad, Rng& rng)
    : stride_(stride), pad_(pad) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in * kernel * kernel));
  weight_ = add_parameter("weight",
                          uniform_parameter({out, in, kernel, kernel}, bound, rng));
  bias_ = add_parameter("bias", uniform_parameter({out}, bound, rng));
}

Tensor Conv2d::forward(const Tensor& x) const {
  return conv2d(x, weight_, bias_, stride_, pad_);
}

void Conv2d::scale_weights(float factor) {
  for (float& v : weight_.mutable_data()) v *= factor;
  for (float& v : bias_.mutable_data()) v *= factor;
}

LayerNorm::LayerNorm(int dim) {
  gain_ = add_parameter("gain", Tensor::full({dim}, 1.0f));
  bias_ = add_parameter("bias", Tensor::zeros({dim}));
}

Tensor LayerNorm::forward(const Tensor& x) const {
  return layer_norm(x, gain_, bias_);
}

GroupNorm::GroupNorm(int groups, int channels) : groups_(groups) {
  if (channels % groups != 0) {
    throw ConfigError("group norm channels must be divisible by groups");
  }
  gain_ = add_parameter("gain", Tensor::full({channels}, 1.0f));
  bias_ = add_parameter("bias", Tensor::zeros({channels}));
}

Tensor GroupNorm::forward(const Tensor& x) const {
  return group_norm(x, groups_, gain_, bias_);
}

Embedding::Embedding(int vocab, int dim, Rng& rng, float stddev) {
  std::normal_distribution<float> dist(0.0f, stddev);
  std::vector<float> values(static_cast<std::size_t>(vocab) * dim);
  for (float& v : values) v = dist(rng);
  table_ = add_parameter("table", Tensor::from({vocab, dim}, std::move(values)));
}

Embedding::Embedding(int vocab, int dim, std::vector<float> init) {
  table_ = add_parameter("table", Tensor::from({vocab, dim}, std::move(init)));
}

Tensor Embedding::forward(std::span<const int> indices) const {
  return embedding(table_, indices);
}

MultiHeadAttention::MultiHeadAttention(int dim, int heads, Rng& rng)
    : heads_(heads),
      query_(dim, dim, rng),
      key_(dim, dim, rng),
      value_(dim, dim, rng),
      output_(dim, dim, rng) {
  if (dim % heads != 0) throw ConfigError("attention dim must divide by heads");
  add_module("query", &query_);
  add_module("key", &key_);
  add_module("value", &value_);
  add_module("output", &output_);
}

Tensor MultiHeadAttention::forward(const Tensor& x) const {
  const int dim = x.dim(1);
  const int head_dim = dim / heads_;
  const float inv_sqrt = 1.0f / std::sqrt(static_cast<float>(head_dim));
  Tensor q = query_.forward(x);
  Tensor k = key_.forward(x);
  Tensor v = value_.forward(x);
  std::vector<Tensor> heads;
  for (int h = 0; h < heads_; ++h) {
    const int b = h * head_dim, e = b + head_dim;
    Tensor qh = slice_cols(q, b, e);
    Tensor kh = slice_cols(k, b, e);
    Tensor vh = slice_cols(v, b, e);
    Tensor weights = softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt));
    heads.push_back(matmul(weights, vh));
  }
  return output_.forward(heads_ == 1 ? heads[0] : concat_cols(heads));
}

ConvTransformerBlock::ConvTransformerBlock(int dim, int heads, int filter,
                                           int kernel, Rng& rng)
    : attention_(dim, heads, rng),
      attention_norm_(dim),
      ffn_in_(dim, filter, kernel, rng),
      ffn_out_(filter, dim, 1, rng),
      ffn_norm_(dim) {
  add_module("attention", &attention_);
  add_module("attention_norm", &attention_norm_);
  add_module("ffn_in", &ffn_in_);
  add_module("ffn_out", &ffn_out_);
  add_module("ffn_norm", &ffn_norm_);
}

Tensor ConvTransformerBlock::forward(const Tensor& x) const {
  Tensor h = attention_norm_.forward(add(x, attention_.forward(x)));
  Tensor f = ffn_out_.forward(relu(ffn_in_.forward(h)));
  return ffn_norm_.forward(add(h, f));
}

Tensor sinusoidal_positions(int length, int dim) {
  std::vector<float> values(static_cast<std::size_t>(length) * dim);
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < dim; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      const double angle = pos * rate;
      values[static_cast<std::size_t>(pos) * dim + i] =
          static_cast<float>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return Tensor::from({length, dim}, std::move(values));
}

Tensor sinusoidal_embedding(float position, int dim) {
  const int half = dim / 2;
  std::vector<float> values(static_cast<std::size_t>(dim), 0.0f);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    values[i] = static_cast<float>(std::sin(position * freq));
    values[half + i] = static_cast<float>(std::cos(position * freq));
  }
  return Tensor::from({1, dim}, std::move(values));
}

}  // namespace sketchvoice::nn
