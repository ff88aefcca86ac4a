// Copyright 2026 The repurpose-loc Authors
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

#include "repurpose/autograd/tape.hpp"

#include <algorithm>

#include "repurpose/error.hpp"
#include "repurpose/simd/kernels.hpp"

namespace repurpose::autograd {

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, false, nullptr, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::leaf(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, recording_, nullptr, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(Parameter& param) {
  nodes_.push_back(Node{{}, &param.value, {}, recording_, &param, {}});
  return Var{nodes_.size() - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& node = nodes_[v.id];
  return node.external ? *node.external : node.value;
}

Var Tape::record(Matrix value, bool requires_grad, BackwardFn backward) {
  const bool tracked = recording_ && requires_grad;
  nodes_.push_back(
      Node{std::move(value), nullptr, {}, tracked, nullptr, tracked ? std::move(backward) : BackwardFn{}});
  return Var{nodes_.size() - 1};
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& node = nodes_[id];
  if (node.grad.empty()) {
    const Matrix& v = node.external ? *node.external : node.value;
    node.grad = Matrix(v.rows(), v.cols());
  }
  return node.grad;
}

const Matrix& Tape::grad(Var v) { return grad_buffer(v.id); }

void Tape::backward(std::span<const std::pair<Var, Matrix>> seeds) {
  if (!recording_) raise(Errc::kInvalidArgument, "backward on a tape that does not record");
  std::size_t highest = 0;
  for (const auto& [var, seed] : seeds) {
    if (!nodes_[var.id].requires_grad) continue;
    Matrix& g = grad_buffer(var.id);
    if (!g.same_shape(seed)) raise(Errc::kShapeMismatch, "gradient seed shape mismatch");
    simd::axpy(1.0f, seed.values(), g.values());
    highest = std::max(highest, var.id + 1);
  }
  for (std::size_t id = highest; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.empty()) continue;
    if (node.backward) {
      node.backward(*this, id);
    } else if (node.param != nullptr) {
      Parameter& p = *node.param;
      if (p.grad.empty()) p.zero_grad();
      simd::axpy(1.0f, node.grad.values(), p.grad.values());
    }
  }
}

}  // namespace repurpose::autograd
