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

#include "repurpose/train/optimizer.hpp"

#include <cmath>

namespace repurpose::train {

void Adam::step(std::span<autograd::Parameter> parameters, double learning_rate) {
  if (m_.empty()) {
    for (const auto& p : parameters) {
      m_.emplace_back(p.value.size(), 0.0f);
      v_.emplace_back(p.value.size(), 0.0f);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
  const float b1 = static_cast<float>(params_.beta1);
  const float b2 = static_cast<float>(params_.beta2);
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    auto& p = parameters[i];
    if (p.grad.empty()) continue;
    auto value = p.value.values();
    auto grad = p.grad.values();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const float g = grad[j];
      m[j] = b1 * m[j] + (1.0f - b1) * g;
      v[j] = b2 * v[j] + (1.0f - b2) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      value[j] -= static_cast<float>(learning_rate * m_hat / (std::sqrt(v_hat) + params_.epsilon));
    }
  }
}

double global_grad_norm(std::span<const autograd::Parameter> parameters) {
  double sq = 0.0;
  for (const auto& p : parameters) {
    for (float g : p.grad.values()) sq += static_cast<double>(g) * g;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(std::span<autograd::Parameter> parameters, double max_norm) {
  const double norm = global_grad_norm(parameters);
  if (norm > max_norm && norm > 0.0) {
    const float factor = static_cast<float>(max_norm / norm);
    for (auto& p : parameters) {
      for (float& g : p.grad.values()) g *= factor;
    }
  }
  return norm;
}

}  // namespace repurpose::train
