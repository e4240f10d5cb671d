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

#ifndef SKETCHVOICE_NN_OPTIM_H_
#define SKETCHVOICE_NN_OPTIM_H_

#include <cstdint>
#include <vector>

#include "sketchvoice/nn/tensor.h"

namespace sketchvoice::nn {

struct AdamOptions {
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.0f;
  // true: AdamW (decay applied to weights directly); false: L2 folded into
  // the gradient as in classic Adam.
  bool decoupled = false;
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  // Applies one update with the given learning rate, then clears grads.
  void step(float learning_rate);
  std::int64_t steps_taken() const { return step_; }

  // Moment buffers, flattened in parameter order, for checkpointing.
  std::vector<float> state() const;
  void load_state(const std::vector<float>& state, std::int64_t step);

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  std::int64_t step_ = 0;
};

// Rescales gradients so their global L2 norm is at most `max_norm`.
// Returns the norm before clipping.
float clip_grad_norm(std::vector<Tensor>& params, float max_norm);

// Linear warmup to `peak` then cosine decay to `floor` at `total_steps`.
float warmup_cosine_lr(std::int64_t step, std::int64_t warmup,
                       std::int64_t total_steps, float peak, float floor);

}  // namespace sketchvoice::nn

#endif  // SKETCHVOICE_NN_OPTIM_H_
