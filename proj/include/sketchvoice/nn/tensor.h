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

#ifndef SKETCHVOICE_NN_TENSOR_H_
#define SKETCHVOICE_NN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sketchvoice::nn {

using Shape = std::vector<int>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// One vertex of the dynamic autograd graph. Values are dense row-major
// float32. `grad` is allocated on first use.
struct Node {
  Shape shape;
  std::vector<float> value;
  std::vector<float> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this->grad into the parents' grads. Empty for leaves.
  std::function<void(Node&)> backward_fn;

  std::vector<float>& ensure_grad();
};

// Reference-semantics handle to a Node. Copies alias the same storage, which
// is what parameters and optimizers rely on.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value);
  static Tensor from(Shape shape, std::vector<float> values,
                     bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  int dim(int i) const;
  std::size_t size() const;

  std::span<const float> data() const;
  std::span<float> mutable_data();
  const std::vector<float>& values() const;
  float item() const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<float> grad();
  void zero_grad();

  // Returns a leaf holding a copy of the value with no history.
  Tensor detach() const;
  // Back-propagates from a scalar. Gradients accumulate into every reachable
  // node that requires grad.
  void backward() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Autograd recording is on by default and tracked per thread, so inference
// threads can disable it without affecting a training thread.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Builds the output node of an op. When recording is enabled and any parent
// requires grad, the node keeps its parents and backward closure.
Tensor make_result(Shape shape, std::vector<float> value,
                   std::vector<Tensor> parents,
                   std::function<void(Node&)> backward_fn);

}  // namespace sketchvoice::nn

#endif  // SKETCHVOICE_NN_TENSOR_H_
