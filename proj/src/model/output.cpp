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

#include "repurpose/model/output.hpp"

#include <algorithm>
#include <cmath>

namespace repurpose::model {

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ModelOutput activate(const HeadOutputs& h) {
  ModelOutput out;
  const std::size_t n = h.size();
  out.branch_heads = h.branch_heads;
  out.prob_visual.resize(n);
  out.prob_audio.resize(n);
  out.prob_fused.resize(n);
  out.start_offset.resize(n);
  out.end_offset.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    out.prob_visual[t] = sigmoid(h.logit_visual[t]);
    out.prob_audio[t] = sigmoid(h.logit_audio[t]);
    out.prob_fused[t] = sigmoid(h.logit_fused[t]);
    out.start_offset[t] = h.regression_scale * std::max(0.0, h.raw_start[t]);
    out.end_offset[t] = h.regression_scale * std::max(0.0, h.raw_end[t]);
  }
  return out;
}

}  // namespace repurpose::model
