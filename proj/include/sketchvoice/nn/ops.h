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

#ifndef SKETCHVOICE_NN_OPS_H_
#define SKETCHVOICE_NN_OPS_H_

#include <span>
#include <vector>

#include "sketchvoice/nn/tensor.h"

// Differentiable ops. Sequence tensors are [length, channels]; image-like
// tensors are [channels, height, width] with one sample per call.
namespace sketchvoice::nn {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
// x[n, in] * w[in, out] (+ b[out]).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);
// x[n, m] + v[m] on every row.
Tensor add_row_vector(const Tensor& x, const Tensor& v);
// x[C, ...] + v[C] on every element of channel c.
Tensor add_channel_vector(const Tensor& x, const Tensor& v);

Tensor relu(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor exp(const Tensor& x);

Tensor softmax_rows(const Tensor& x);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  float eps = 1e-5f);
Tensor group_norm(const Tensor& x, int groups, const Tensor& gain,
                  const Tensor& bias, float eps = 1e-5f);

// Same-padded 1-D convolution over time. w is [kernel, in, out].
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b);
// w is [out, in, k, k]. Output size (H + 2 pad - k) / stride + 1.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
              int pad);
Tensor upsample_nearest2x(const Tensor& x);
Tensor avg_pool2d(const Tensor& x, int factor);
// Keeps the leading [height, width] block of every channel.
Tensor crop2d(const Tensor& x, int height, int width);

// Concatenation along dimension 0 (rows or channels).
Tensor concat0(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& x, int begin, int end);
Tensor slice_rows(const Tensor& x, int begin, int end);
Tensor reshape(const Tensor& x, Shape shape);

Tensor embedding(const Tensor& table, std::span<const int> indices);
// Row i of x repeated counts[i] times, order preserved.
Tensor repeat_rows(const Tensor& x, std::span<const int> counts);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mse_loss(const Tensor& prediction, const Tensor& target);
Tensor l1_loss(const Tensor& prediction, const Tensor& target);
// Mean over elements of KL(N(mean, exp(logvar)) || N(0, 1)).
Tensor gaussian_kl(const Tensor& mean, const Tensor& logvar);

}  // namespace sketchvoice::nn

#endif  // SKETCHVOICE_NN_OPS_H_
