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

#include "repurpose/core/interval.hpp"
#include "repurpose/model/output.hpp"

namespace repurpose::eval {

struct ClipPrediction {
  Interval interval;
  double score = 0.0;
  std::size_t source_segment = 0;
};

/// Candidates whose endpoints agree within this many seconds are merged.
inline constexpr double kDuplicateTolerance = 1e-9;

/// One candidate per segment whose fused probability reaches
/// `conf_threshold`, clamped to [0, duration]. Zero-length candidates are
/// dropped and duplicates merged keeping the higher score. Output is
/// ordered by start, then end.
std::vector<ClipPrediction> decode(const model::ModelOutput& output, double segment_length, double duration,
                                   double conf_threshold = 0.5);

struct SoftNmsParams {
  double sigma = 0.5;
  double score_floor = 1e-3;
  bool operator==(const SoftNmsParams&) const = default;
};

/// Gaussian soft-NMS. Result is sorted by final score, descending; ties
/// go to the earlier start, then the lower source segment.
std::vector<ClipPrediction> soft_nms(std::vector<ClipPrediction> candidates, const SoftNmsParams& params = {});

/// max(1, round_half_up(3 * duration / 600)).
std::size_t top_k_for_duration(double duration);

/// decode, soft_nms, then keep the first top_k_for_duration(duration).
std::vector<ClipPrediction> postprocess(const model::ModelOutput& output, double segment_length, double duration,
                                        double conf_threshold = 0.5, const SoftNmsParams& nms = {});

}  // namespace repurpose::eval
