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

#include "sketchvoice/nn/tensor.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "sketchvoice/errors.h"

namespace sketchvoice::nn {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw InvalidArgument("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ")";
  return out.str();
}

std::vector<float>& Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0f);
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->value.assign(shape_size(shape), 0.0f);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::full(Shape shape, float value) {
  Tensor t = zeros(std::move(shape));
  std::fill(t.node_->value.begin(), t.node_->value.end(), value);
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<float> values,
                    bool requires_grad) {
  if (shape_size(shape) != values.size()) {
    throw InvalidArgument("tensor shape " + shape_string(shape) +
                          " does not match " + std::to_string(values.size()) +
                          " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const { return node_->shape; }

int Tensor::dim(int i) const {
  const Shape& s = node_->shape;
  if (i < 0) i += static_cast<int>(s.size());
  if (i < 0 || i >= static_cast<int>(s.size())) {
    throw InvalidArgument("dimension index out of range for shape " +
                          shape_string(s));
  }
  return s[static_cast<std::size_t>(i)];
}

std::size_t Tensor::size() const { return node_->value.size(); }

std::span<const float> Tensor::data() const { return node_->value; }
std::span<float> Tensor::mutable_data() { return node_->value; }
const std::vector<float>& Tensor::values() const { return node_->value; }

float Tensor::item() const {
  if (node_->value.size() != 1) {
    throw InvalidArgument("item() on tensor of shape " +
                          shape_string(node_->shape));
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const {
  return node_->grad.size() == node_->value.size() && !node_->value.empty();
}
std::span<float> Tensor::grad() { return node_->ensure_grad(); }
void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0f);
}

Tensor Tensor::detach() const {
  return Tensor::from(node_->shape, node_->value, false);
}

void Tensor::backward() const {
  if (node_->value.size() != 1) {
    throw InvalidArgument("backward() needs a scalar, got shape " +
                          shape_string(node_->shape));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS; graphs from long sequences get deep.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->ensure_grad()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->grad.size() == n->value.size()) {
      n->backward_fn(*n);
    }
  }
  // Release intermediate gradients so repeated backward passes through shared
  // parameters only accumulate on leaves.
  for (Node* n : order) {
    if (n->backward_fn) {
      std::vector<float>().swap(n->grad);
    }
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor make_result(Shape shape, std::vector<float> value,
                   std::vector<Tensor> parents,
                   std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const Tensor& p : parents) any = any || p.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->parents.reserve(parents.size());
      for (const Tensor& p : parents) node->parents.push_back(p.node());
      node->backward_fn = std::move(backward_fn);
    }
  }
  return Tensor(std::move(node));
}

}  // namespace sketchvoice::nn
