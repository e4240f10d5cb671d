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

#ifndef SKETCHVOICE_NN_MODULE_H_
#define SKETCHVOICE_NN_MODULE_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sketchvoice/nn/tensor.h"

namespace sketchvoice::nn {

using Rng = std::mt19937_64;

// Owner of named parameters and child modules. Children are registered by
// address, so modules are neither copyable nor movable.
class Module {
 public:
  Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;
  virtual ~Module() = default;

  // Dotted names, depth-first in registration order.
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

 protected:
  Tensor add_parameter(std::string name, Tensor value);
  void add_module(std::string name, Module* child);

 private:
  void collect(const std::string& prefix,
               std::vector<std::pair<std::string, Tensor>>* out) const;

  std::vector<std::pair<std::string, Tensor>> params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

// Uniform(-bound, bound) initialised tensor.
Tensor uniform_parameter(Shape shape, float bound, Rng& rng);

class Linear : public Module {
 public:
  Linear(int in, int out, Rng& rng, bool bias = true);
  Tensor forward(const Tensor& x) const;
  int in_features() const { return weight_.dim(0); }
  int out_features() const { return weight_.dim(1); }

 private:
  Tensor weight_;
  Tensor bias_;
};

// Same-padded temporal convolution over [T, C] sequences.
class Conv1d : public Module {
 public:
  Conv1d(int in, int out, int kernel, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  Tensor weight_;
  Tensor bias_;
};

class Conv2d : public Module {
 public:
  Conv2d(int in, int out, int kernel, int stride, int pad, Rng& rng);
  Tensor forward(const Tensor& x) const;
  // Scales the initial weights, e.g. to start a residual branch near zero.
  void scale_weights(float factor);

 private:
  Tensor weight_;
  Tensor bias_;
  int stride_;
  int pad_;
};

class LayerNorm : public Module {
 public:
  explicit LayerNorm(int dim);
  Tensor forward(const Tensor& x) const;

 private:
  Tensor gain_;
  Tensor bias_;
};

class GroupNorm : public Module {
 public:
  GroupNorm(int groups, int channels);
  Tensor forward(const Tensor& x) const;

 private:
  int groups_;
  Tensor gain_;
  Tensor bias_;
};

class Embedding : public Module {
 public:
  Embedding(int vocab, int dim, Rng& rng, float stddev = 1.0f);
  // Initialises from explicit row-major values instead of random.
  Embedding(int vocab, int dim, std::vector<float> init);
  Tensor forward(std::span<const int> indices) const;
  int vocab() const { return table_.dim(0); }
  int dim() const { return table_.dim(1); }

 private:
  Tensor table_;
};

class MultiHeadAttention : public Module {
 public:
  MultiHeadAttention(int dim, int heads, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  int heads_;
  Linear query_;
  Linear key_;
  Linear value_;
  Linear output_;
};

// Post-norm Transformer block whose feed-forward network is a pair of 1-D
// convolutions (kernel `kernel`, then 1).
class ConvTransformerBlock : public Module {
 public:
  ConvTransformerBlock(int dim, int heads, int filter, int kernel, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  MultiHeadAttention attention_;
  LayerNorm attention_norm_;
  Conv1d ffn_in_;
  Conv1d ffn_out_;
  LayerNorm ffn_norm_;
};

// Standard sinusoidal position table, [length, dim].
Tensor sinusoidal_positions(int length, int dim);
// Sinusoidal embedding of a scalar (diffusion timestep), [1, dim].
Tensor sinusoidal_embedding(float position, int dim);

}  // namespace sketchvoice::nn

#endif  // SKETCHVOICE_NN_MODULE_H_
