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

#pragma once

#include <span>
#include <vector>

#include "repurpose/autograd/tape.hpp"

namespace repurpose::train {

/// Adam with bias correction.
class Adam {
 public:
  struct Params {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam() = default;
  explicit Adam(Params params) : params_(params) {}

  /// One update using each parameter's accumulated gradient. Parameters
  /// must be passed in the same order on every call.
  void step(std::span<autograd::Parameter> parameters, double learning_rate);
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  Params params_{};
  std::size_t t_ = 0;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
};

/// L2 norm over every parameter gradient.
double global_grad_norm(std::span<const autograd::Parameter> parameters);

/// Rescales gradients so their global norm is at most max_norm. Returns
/// the norm before clipping.
double clip_grad_norm(std::span<autograd::Parameter> parameters, double max_norm);

}  // namespace repurpose::train
