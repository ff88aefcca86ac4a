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

#include <cstddef>
#include <vector>

namespace repurpose::model {

enum class Branch { kVisual, kAudio, kFused };

/// Raw head values for one video: pre-sigmoid logits and pre-rectifier
/// regression outputs. Losses differentiate with respect to these.
struct HeadOutputs {
  std::vector<double> logit_visual;
  std::vector<double> logit_audio;
  std::vector<double> logit_fused;
  std::vector<double> raw_start;
  std::vector<double> raw_end;
  /// False when the configuration has no uni-modal heads; the visual and
  /// audio logits then mirror the fused ones.
  bool branch_heads = true;
  double regression_scale = 1.0;

  std::size_t size() const noexcept { return logit_fused.size(); }
};

/// Per-segment predictions for one video.
struct ModelOutput {
  std::vector<double> prob_visual;
  std::vector<double> prob_audio;
  std::vector<double> prob_fused;
  std::vector<double> start_offset;  // seconds
  std::vector<double> end_offset;    // seconds
  bool branch_heads = true;

  std::size_t size() const noexcept { return prob_fused.size(); }
};

double sigmoid(double x) noexcept;

/// Sigmoid on logits; rectifier times regression_scale on offsets.
ModelOutput activate(const HeadOutputs& heads);

}  // namespace repurpose::model
